#pragma once

// Perron-Frobenius data of nonnegative integer matrices.

#include <vector>

namespace mtorus {

using IntMatrix = std::vector<std::vector<long>>;

// Strongly connected as a directed graph (i -> j when m[i][j] > 0).
bool is_irreducible(const IntMatrix& m);

// Coefficients c_0..c_n of det(xI - m), leading coefficient 1. Exact.
std::vector<long long> characteristic_polynomial(const IntMatrix& m);

struct PerronData {
  double lambda = 0;
  std::vector<double> right;  // m v = lambda v, sum 1
  std::vector<double> left;   // m^T w = lambda w, sum 1
  double residual = 0;        // max |m v - lambda v| and |m^T w - lambda w|
  bool irreducible = false;
  // The characteristic polynomial changes sign on [lambda - 1e-12, lambda + 1e-12]
  // and has no larger real root (checked for n <= 6).
  bool certified = false;
};

PerronData perron_frobenius(const IntMatrix& m);

}  // namespace mtorus
