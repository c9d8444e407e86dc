#include "zkmcp/kernels/exec.hpp"

#ifdef ZKMCP_HAVE_OPENMP
#include <omp.h>
#endif

namespace zkmcp {

bool openmp_enabled() {
#ifdef ZKMCP_HAVE_OPENMP
  return true;
#else
  return false;
#endif
}

int max_threads() {
#ifdef ZKMCP_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace zkmcp
