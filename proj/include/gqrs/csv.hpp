#pragma once

#include "gqrs/common.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace gqrs::csv {

/// Shortest-safe decimal form with 17 significant digits; reads back bit-exact.
std::string format_double(double value);

/// Parses a full cell as a double; throws ErrorKind::Format otherwise.
double parse_double(std::string_view cell);

enum class HeaderMode { Auto, Present, Absent };

struct Table {
  std::vector<std::string> header;  // empty when the input had none
  Matrix values;
};

/// Comma-separated numeric table. In Auto mode the first line is a header
/// when any of its cells is not a number. Blank lines are ignored.
Table parse_table(std::string_view text, HeaderMode mode = HeaderMode::Auto);
Table read_table(const std::filesystem::path& path, HeaderMode mode = HeaderMode::Auto);

std::string format_matrix(const Matrix& values, const std::vector<std::string>& header = {});

std::string read_text(const std::filesystem::path& path);

/// Writes to a temporary sibling and renames it over the target.
void write_text_atomic(const std::filesystem::path& path, std::string_view content);

void write_matrix(const std::filesystem::path& path, const Matrix& values,
                  const std::vector<std::string>& header = {});

}  // namespace gqrs::csv
