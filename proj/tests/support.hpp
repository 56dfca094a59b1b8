#pragma once

#include "dilation/matcore.hpp"

#include <initializer_list>

namespace testing_support {

using dilation::Complex;
using dilation::ComplexMatrix;
using dilation::Index;

// Row-major real entries.
inline ComplexMatrix real_matrix(Index rows, Index cols, std::initializer_list<double> values) {
  ComplexMatrix m(rows, cols);
  auto it = values.begin();
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = *it++;
  return m;
}

inline ComplexMatrix scalar(double x) { return real_matrix(1, 1, {x}); }

inline ComplexMatrix nilpotent() { return real_matrix(2, 2, {0, 0.9, 0, 0}); }

inline double dist(const ComplexMatrix& a, const ComplexMatrix& b) {
  return dilation::spectral_norm(a - b);
}

}  // namespace testing_support
