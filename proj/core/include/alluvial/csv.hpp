#pragma once

#include <string>
#include <vector>

namespace alluvial::csv {

/// One line into fields. Handles double-quoted fields with "" escapes and
/// strips a trailing carriage return.
std::vector<std::string> split_row(const std::string& line);

/// Whole document into rows, skipping blank lines. Quoted fields may span
/// newlines.
std::vector<std::vector<std::string>> parse(const std::string& text);

/// Fields into one line, quoting any field containing a comma, quote or
/// newline.
std::string join_row(const std::vector<std::string>& fields);

} // namespace alluvial::csv
