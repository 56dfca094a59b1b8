// index.hpp: exact rational elements of S = Σ_j S_j over a finite Ω

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace dilation {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Parses "p/q", "p" or "-p/q". Throws PreconditionError on malformed input
// or a zero denominator.
Rational parse_rational(const std::string& text);
std::string format_rational(const Rational& r);

// Finitely supported map {0, ..., omega_size - 1} -> Q. Zero coordinates are
// not stored, so equality is structural.
class IndexElement {
 public:
  explicit IndexElement(std::size_t omega_size = 0) : omega_size_(omega_size) {}
  IndexElement(std::size_t omega_size, const std::vector<Rational>& dense);

  // The element r * e_j.
  static IndexElement unit(std::size_t omega_size, std::size_t j,
                           const Rational& r = Rational(1));

  std::size_t omega_size() const noexcept { return omega_size_; }
  Rational operator[](std::size_t j) const;
  void set(std::size_t j, const Rational& value);
  const std::map<std::size_t, Rational>& support() const noexcept { return coords_; }
  std::vector<Rational> dense() const;

  // All coordinates nonnegative.
  bool in_semigroup() const;
  bool is_zero() const noexcept { return coords_.empty(); }

  IndexElement operator+(const IndexElement& other) const;
  IndexElement operator-(const IndexElement& other) const;
  IndexElement operator-() const;
  IndexElement scaled(const BigInt& k) const;

  bool operator==(const IndexElement& other) const = default;
  // Lexicographic over dense coordinates.
  std::strong_ordering operator<=>(const IndexElement& other) const;

  std::string to_string() const;

 private:
  void check_coord(std::size_t j) const;
  void check_same_omega(const IndexElement& other) const;

  std::size_t omega_size_;
  std::map<std::size_t, Rational> coords_;
};

// Sorted, duplicate-free subset u ⊆ Ω.
class SubsetMask {
 public:
  SubsetMask(std::vector<std::size_t> members, std::size_t omega_size);
  static SubsetMask full(std::size_t omega_size);

  const std::vector<std::size_t>& members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  std::size_t omega_size() const noexcept { return omega_size_; }
  bool contains(std::size_t j) const;
  SubsetMask complement() const;

 private:
  std::vector<std::size_t> members_;
  std::size_t omega_size_;
};

struct PosNegParts {
  IndexElement plus;
  IndexElement minus;
};

struct LatticeReduction {
  // s_0(j) > 0 per coordinate; 1 where every input vanishes.
  std::vector<Rational> base;
  // coords[i][j] = s_i(j) / s_0(j), a nonnegative integer.
  std::vector<std::vector<BigInt>> coords;
};

PosNegParts pos_neg_parts(const IndexElement& g);

// s[u] = e[u] · s.
IndexElement mask(const IndexElement& s, const SubsetMask& u);

// Per-coordinate rational gcd of the inputs and their integer multiples.
LatticeReduction commensurable_reduce(const std::vector<IndexElement>& elements);

// Σ_j c_j g_j for c_j ∈ [0, depth] (or [-depth, depth] when `signed_box`),
// sorted lexicographically with duplicates removed.
std::vector<IndexElement> group_box(const std::vector<IndexElement>& generators,
                                    std::size_t depth, bool signed_box = false);

}  // namespace dilation
