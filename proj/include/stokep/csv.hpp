#pragma once

#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

namespace stokep::csv {

/// Scientific notation with 17 significant digits: round-trips every double.
std::string format_real(double value);

void write_header(std::ostream& os, std::span<const std::string> columns);
void write_header(std::ostream& os, std::initializer_list<std::string_view> columns);
void write_row(std::ostream& os, std::span<const double> values);
void write_row(std::ostream& os, std::initializer_list<double> values);
/// `# text` comment line.
void write_comment(std::ostream& os, std::string_view text);

}  // namespace stokep::csv
