#ifndef MSQG_CSV_HPP
#define MSQG_CSV_HPP

#include <string>

namespace msqg::csv {

/// Shortest round-trip decimal form of a double, locale-independent
/// ('.' decimal separator always). All CSV output goes through this.
std::string num(double v);

} // namespace msqg::csv

#endif
