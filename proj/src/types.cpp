#include "mlr/types.hpp"

#include <cstdio>

namespace mlr {

std::string fmt17(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace mlr
