#include "veclap/common.hpp"

#include <cstdio>

namespace veclap {

RankDeficientError::RankDeficientError(double cond, int point_index)
    : NumericalError("rank-deficient local fit (condition estimate " + std::to_string(cond) +
                     (point_index >= 0 ? ", point " + std::to_string(point_index) : std::string()) +
                     ")"),
      cond_(cond),
      point_index_(point_index) {}

std::string format_full(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

} // namespace veclap
