#include "dilation/index.hpp"

#include "dilation/error.hpp"

#include <algorithm>
#include <sstream>

namespace dilation {

namespace mp = boost::multiprecision;

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  try {
    const std::string num = text.substr(0, slash);
    const std::string den = slash == std::string::npos ? "1" : text.substr(slash + 1);
    auto valid = [](const std::string& s, bool allow_sign) {
      if (s.empty()) return false;
      std::size_t i = 0;
      if (allow_sign && (s[0] == '-' || s[0] == '+')) i = 1;
      if (i == s.size()) return false;
      return std::all_of(s.begin() + static_cast<long>(i), s.end(),
                         [](char c) { return c >= '0' && c <= '9'; });
    };
    if (!valid(num, true) || !valid(den, false)) {
      throw PreconditionError("bad_rational", "cannot parse rational '" + text + "'");
    }
    const BigInt n(num[0] == '+' ? num.substr(1) : num);
    const BigInt d(den);
    if (d == 0) throw PreconditionError("bad_rational", "zero denominator in '" + text + "'");
    return Rational(n, d);
  } catch (const PreconditionError&) {
    throw;
  } catch (const std::exception&) {
    throw PreconditionError("bad_rational", "cannot parse rational '" + text + "'");
  }
}

std::string format_rational(const Rational& r) {
  const BigInt n = mp::numerator(r);
  const BigInt d = mp::denominator(r);
  if (d == 1) return n.str();
  return n.str() + "/" + d.str();
}

// -- IndexElement ------------------------------------------------------------

IndexElement::IndexElement(std::size_t omega_size, const std::vector<Rational>& dense)
    : omega_size_(omega_size) {
  if (dense.size() > omega_size) {
    throw PreconditionError("out_of_range", "more coordinates than |Ω|");
  }
  for (std::size_t j = 0; j < dense.size(); ++j) set(j, dense[j]);
}

IndexElement IndexElement::unit(std::size_t omega_size, std::size_t j, const Rational& r) {
  IndexElement e(omega_size);
  e.set(j, r);
  return e;
}

void IndexElement::check_coord(std::size_t j) const {
  if (j >= omega_size_) {
    throw PreconditionError("out_of_range", "coordinate " + std::to_string(j) +
                                                " outside Ω of size " +
                                                std::to_string(omega_size_));
  }
}

void IndexElement::check_same_omega(const IndexElement& other) const {
  if (other.omega_size_ != omega_size_) {
    throw PreconditionError("omega_mismatch", "index elements over different Ω");
  }
}

Rational IndexElement::operator[](std::size_t j) const {
  check_coord(j);
  const auto it = coords_.find(j);
  return it == coords_.end() ? Rational(0) : it->second;
}

void IndexElement::set(std::size_t j, const Rational& value) {
  check_coord(j);
  if (value == 0) {
    coords_.erase(j);
  } else {
    coords_[j] = value;
  }
}

std::vector<Rational> IndexElement::dense() const {
  std::vector<Rational> out(omega_size_, Rational(0));
  for (const auto& [j, v] : coords_) out[j] = v;
  return out;
}

bool IndexElement::in_semigroup() const {
  return std::all_of(coords_.begin(), coords_.end(),
                     [](const auto& kv) { return kv.second > 0; });
}

IndexElement IndexElement::operator+(const IndexElement& other) const {
  check_same_omega(other);
  IndexElement out = *this;
  for (const auto& [j, v] : other.coords_) out.set(j, out[j] + v);
  return out;
}

IndexElement IndexElement::operator-(const IndexElement& other) const {
  return *this + (-other);
}

IndexElement IndexElement::operator-() const {
  IndexElement out(omega_size_);
  for (const auto& [j, v] : coords_) out.coords_[j] = -v;
  return out;
}

IndexElement IndexElement::scaled(const BigInt& k) const {
  IndexElement out(omega_size_);
  for (const auto& [j, v] : coords_) out.set(j, v * Rational(k));
  return out;
}

std::strong_ordering IndexElement::operator<=>(const IndexElement& other) const {
  if (auto c = omega_size_ <=> other.omega_size_; c != 0) return c;
  for (std::size_t j = 0; j < omega_size_; ++j) {
    const Rational a = (*this)[j];
    const Rational b = other[j];
    if (a < b) return std::strong_ordering::less;
    if (a > b) return std::strong_ordering::greater;
  }
  return std::strong_ordering::equal;
}

std::string IndexElement::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t j = 0; j < omega_size_; ++j) {
    if (j) os << ", ";
    os << format_rational((*this)[j]);
  }
  os << ')';
  return os.str();
}

// -- SubsetMask --------------------------------------------------------------

SubsetMask::SubsetMask(std::vector<std::size_t> members, std::size_t omega_size)
    : members_(std::move(members)), omega_size_(omega_size) {
  std::sort(members_.begin(), members_.end());
  if (std::adjacent_find(members_.begin(), members_.end()) != members_.end()) {
    throw PreconditionError("bad_subset", "duplicate coordinate in subset");
  }
  if (!members_.empty() && members_.back() >= omega_size_) {
    throw PreconditionError("out_of_range",
                            "subset member " + std::to_string(members_.back()) +
                                " outside Ω of size " + std::to_string(omega_size_));
  }
}

SubsetMask SubsetMask::full(std::size_t omega_size) {
  std::vector<std::size_t> all(omega_size);
  for (std::size_t j = 0; j < omega_size; ++j) all[j] = j;
  return SubsetMask(std::move(all), omega_size);
}

bool SubsetMask::contains(std::size_t j) const {
  return std::binary_search(members_.begin(), members_.end(), j);
}

SubsetMask SubsetMask::complement() const {
  std::vector<std::size_t> rest;
  for (std::size_t j = 0; j < omega_size_; ++j) {
    if (!contains(j)) rest.push_back(j);
  }
  return SubsetMask(std::move(rest), omega_size_);
}

// -- operations --------------------------------------------------------------

PosNegParts pos_neg_parts(const IndexElement& g) {
  IndexElement plus(g.omega_size());
  for (const auto& [j, v] : g.support()) {
    if (v > 0) plus.set(j, v);
  }
  IndexElement minus = plus - g;
  return {std::move(plus), std::move(minus)};
}

IndexElement mask(const IndexElement& s, const SubsetMask& u) {
  if (u.omega_size() != s.omega_size()) {
    throw PreconditionError("omega_mismatch", "subset and element over different Ω");
  }
  IndexElement out(s.omega_size());
  for (const auto& [j, v] : s.support()) {
    if (u.contains(j)) out.set(j, v);
  }
  return out;
}

LatticeReduction commensurable_reduce(const std::vector<IndexElement>& elements) {
  if (elements.empty()) {
    throw PreconditionError("empty_input", "commensurable_reduce needs at least one element");
  }
  const std::size_t omega = elements.front().omega_size();
  for (const auto& e : elements) {
    if (e.omega_size() != omega) {
      throw PreconditionError("omega_mismatch", "elements over different Ω");
    }
    if (!e.in_semigroup()) {
      throw PreconditionError("negative_coordinate",
                              "element " + e.to_string() + " is not in S");
    }
  }

  LatticeReduction out;
  out.base.assign(omega, Rational(1));
  out.coords.assign(elements.size(), std::vector<BigInt>(omega, BigInt(0)));
  for (std::size_t j = 0; j < omega; ++j) {
    BigInt common_den = 1;
    bool any = false;
    for (const auto& e : elements) {
      const Rational v = e[j];
      if (v == 0) continue;
      any = true;
      common_den = mp::lcm(common_den, BigInt(mp::denominator(v)));
    }
    if (!any) continue;
    BigInt g = 0;
    for (const auto& e : elements) {
      const Rational v = e[j];
      if (v == 0) continue;
      const BigInt scaled = mp::numerator(v) * (common_den / mp::denominator(v));
      g = mp::gcd(g, scaled);
    }
    out.base[j] = Rational(g, common_den);
    for (std::size_t i = 0; i < elements.size(); ++i) {
      const Rational q = elements[i][j] / out.base[j];
      out.coords[i][j] = mp::numerator(q);
    }
  }
  return out;
}

std::vector<IndexElement> group_box(const std::vector<IndexElement>& generators,
                                    std::size_t depth, bool signed_box) {
  if (generators.empty()) {
    throw PreconditionError("empty_input", "group_box needs at least one generator");
  }
  const std::size_t omega = generators.front().omega_size();
  for (const auto& g : generators) {
    if (g.omega_size() != omega) {
      throw PreconditionError("omega_mismatch", "generators over different Ω");
    }
  }
  const long lo = signed_box ? -static_cast<long>(depth) : 0;
  const long hi = static_cast<long>(depth);
  const std::size_t width = static_cast<std::size_t>(hi - lo + 1);
  double count = 1.0;
  for (std::size_t i = 0; i < generators.size(); ++i) count *= static_cast<double>(width);
  if (count > 1e6) throw PreconditionError("box_too_large", "group box exceeds 1e6 points", count);

  std::vector<IndexElement> out;
  std::vector<long> c(generators.size(), lo);
  while (true) {
    IndexElement p(omega);
    for (std::size_t i = 0; i < generators.size(); ++i) {
      if (c[i] != 0) p = p + generators[i].scaled(BigInt(c[i]));
    }
    out.push_back(std::move(p));
    std::size_t k = 0;
    while (k < c.size() && c[k] == hi) c[k++] = lo;
    if (k == c.size()) break;
    ++c[k];
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace dilation
