#pragma once

#include <vector>

#include "ellspec/matrix.hpp"

namespace ellspec {

struct HermitianEigen {
  std::vector<double> values;  // ascending
  CMatrix vectors;             // column i belongs to values[i]; empty if not requested
  int sweeps = 0;
};

/// Cyclic Jacobi eigensolver for Hermitian matrices. Each rotation first
/// removes the phase of the pivot a_pq, then applies the real symmetric
/// rotation that annihilates it.
HermitianEigen jacobi_eigh(CMatrix a, bool want_vectors = true, int max_sweeps = 100);

}  // namespace ellspec
