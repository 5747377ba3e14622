#include "qns/csv.hpp"

#include <cstdio>

namespace qns {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace qns
