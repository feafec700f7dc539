#pragma once

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

namespace kgeo::detail {

// Value rounded to 12 significant digits, so JSON dumps print at most that many.
inline double round12(double x) {
    if (!std::isfinite(x)) return x;
    std::ostringstream os;
    os << std::setprecision(12) << x;
    return std::stod(os.str());
}

inline void comment_header(std::ostream& os, const std::string& header) {
    std::istringstream in(header);
    std::string line;
    while (std::getline(in, line)) os << "# " << line << '\n';
}

}  // namespace kgeo::detail
