#include "stokep/csv.hpp"

#include <cstdio>
#include <ostream>

namespace stokep::csv {

std::string format_real(double value) {
  char buf[40];
  const int n = std::snprintf(buf, sizeof buf, "%.16e", value);
  return std::string(buf, static_cast<std::size_t>(n));
}

namespace {

template <typename Range>
void join(std::ostream& os, const Range& items) {
  bool first = true;
  for (const auto& item : items) {
    if (!first) os << ',';
    os << item;
    first = false;
  }
  os << '\n';
}

template <typename Range>
void join_reals(std::ostream& os, const Range& values) {
  bool first = true;
  for (double v : values) {
    if (!first) os << ',';
    os << format_real(v);
    first = false;
  }
  os << '\n';
}

}  // namespace

void write_header(std::ostream& os, std::span<const std::string> columns) { join(os, columns); }

void write_header(std::ostream& os, std::initializer_list<std::string_view> columns) {
  join(os, columns);
}

void write_row(std::ostream& os, std::span<const double> values) { join_reals(os, values); }

void write_row(std::ostream& os, std::initializer_list<double> values) {
  join_reals(os, values);
}

void write_comment(std::ostream& os, std::string_view text) { os << "# " << text << '\n'; }

}  // namespace stokep::csv
