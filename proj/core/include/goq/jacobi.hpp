#pragma once

#include "goq/types.hpp"

namespace goq {

struct SymmetricEigen {
  Vec values;   // ascending
  Mat vectors;  // column k belongs to values(k)
  int sweeps = 0;
};

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops
/// below `tol` (relative to the matrix norm when that exceeds 1).
SymmetricEigen jacobi_eigen(const Mat& a, double tol = 1e-12, int max_sweeps = 100);

/// Largest |a - a^T| entry.
double asymmetry(const Mat& a);

}  // namespace goq
