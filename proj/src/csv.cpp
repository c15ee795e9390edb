#include "gqrs/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace gqrs::csv {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool try_parse(std::string_view cell, double& out) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return false;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return res.ec == std::errc() && res.ptr == cell.data() + cell.size();
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

}  // namespace

double parse_double(std::string_view cell) {
  double v = 0.0;
  if (!try_parse(cell, v)) throw Error(ErrorKind::Format, "not a number: '" + std::string(cell) + "'");
  return v;
}

Table parse_table(std::string_view text, HeaderMode mode) {
  std::vector<std::pair<std::size_t, std::string_view>> lines;
  std::size_t line_no = 0;
  for (std::size_t pos = 0; pos <= text.size();) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    ++line_no;
    const auto line = trim(text.substr(pos, nl - pos));
    if (!line.empty()) lines.emplace_back(line_no, line);
    pos = nl + 1;
  }

  Table table;
  std::size_t first_data = 0;
  if (!lines.empty()) {
    bool header = mode == HeaderMode::Present;
    if (mode == HeaderMode::Auto) {
      double dummy = 0.0;
      for (auto cell : split(lines.front().second)) header = header || !try_parse(cell, dummy);
    }
    if (header) {
      for (auto cell : split(lines.front().second)) table.header.emplace_back(trim(cell));
      first_data = 1;
    }
  }

  const std::size_t rows = lines.size() - first_data;
  std::size_t cols = table.header.size();
  if (rows > 0) {
    const auto width = split(lines[first_data].second).size();
    require(cols == 0 || width == cols, ErrorKind::Format,
            "line " + std::to_string(lines[first_data].first) + ": expected " + std::to_string(cols) + " cells");
    cols = width;
  }
  table.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& [no, line] = lines[first_data + r];
    const auto cells = split(line);
    require(cells.size() == cols, ErrorKind::Format,
            "line " + std::to_string(no) + ": ragged row with " + std::to_string(cells.size()) + " cells, expected " +
                std::to_string(cols));
    for (std::size_t c = 0; c < cols; ++c) {
      double v = 0.0;
      require(try_parse(cells[c], v), ErrorKind::Format,
              "line " + std::to_string(no) + ": non-numeric cell '" + std::string(cells[c]) + "'");
      table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    }
  }
  return table;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Table read_table(const std::filesystem::path& path, HeaderMode mode) { return parse_table(read_text(path), mode); }

std::string format_matrix(const Matrix& values, const std::vector<std::string>& header) {
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) out += (c ? "," : "") + header[c];
  if (!header.empty()) out += '\n';
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      if (c) out += ',';
      out += format_double(values(r, c));
    }
    out += '\n';
  }
  return out;
}

void write_text_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorKind::Io, "cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    require(static_cast<bool>(out), ErrorKind::Io, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorKind::Io, "cannot move output into '" + path.string() + "'");
  }
}

void write_matrix(const std::filesystem::path& path, const Matrix& values, const std::vector<std::string>& header) {
  write_text_atomic(path, format_matrix(values, header));
}

}  // namespace gqrs::csv
