#include "anderson_lab/linalg/eigensolve.hpp"

#include <lapacke.h>

namespace anderson_lab::linalg {

int symmetric_eigen(int n, double* a, double* w, bool vectors) {
  if (n == 0) return 0;
  return LAPACKE_dsyevd(LAPACK_COL_MAJOR, vectors ? 'V' : 'N', 'U', n, a, n, w);
}

}  // namespace anderson_lab::linalg
