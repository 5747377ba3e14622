#pragma once

#include <string>

namespace qns {

// "%.17g" formatting: round-trips doubles exactly, '.' decimal, no locale.
std::string format_g17(double v);

}  // namespace qns
