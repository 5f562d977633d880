#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace levcode {

/// Shortest round-trippable decimal form of a double ("%.17g"), so repeated
/// runs with identical seeds produce byte-identical CSV output.
std::string csv_double(double v);

void write_csv_row(std::ostream& out, std::span<const std::string> fields);

}  // namespace levcode
