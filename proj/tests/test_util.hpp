#pragma once

#include <complex>

#include "qrate/linalg.hpp"

namespace testutil {

inline qrate::cmat pauli_x() {
  qrate::cmat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline qrate::cmat pauli_y() {
  const std::complex<double> i(0, 1);
  qrate::cmat m(2, 2);
  m << 0, -i, i, 0;
  return m;
}

inline qrate::cmat pauli_z() {
  qrate::cmat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

inline qrate::cmat ident(int m) { return qrate::cmat::Identity(m, m); }

inline qrate::cmat diag2(double a, double b) {
  qrate::cmat m = qrate::cmat::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace testutil
