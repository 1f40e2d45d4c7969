#include "msqg/csv.hpp"

#include <charconv>
#include <cstdio>

namespace msqg::csv {

std::string num(double v) {
    char buf[40];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

} // namespace msqg::csv
