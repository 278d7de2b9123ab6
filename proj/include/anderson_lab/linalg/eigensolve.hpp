#pragma once

#include <vector>

namespace anderson_lab::linalg {

/// Symmetric eigensolve of the column-major n x n matrix in `a` (upper
/// triangle read). Eigenvalues ascending in `w`; with vectors, `a` is
/// overwritten by orthonormal eigenvector columns. Returns the LAPACK info code.
int symmetric_eigen(int n, double* a, double* w, bool vectors);

}  // namespace anderson_lab::linalg
