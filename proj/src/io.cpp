#include "nsaflow/io.hpp"

#include <atomic>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include "nsaflow/errors.hpp"

namespace nsaflow {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

enum class Delim { comma, tab, space };

Delim detect(std::string_view line) {
  if (line.find(',') != std::string_view::npos) return Delim::comma;
  if (line.find('\t') != std::string_view::npos) return Delim::tab;
  return Delim::space;
}

std::vector<std::string_view> split(std::string_view line, Delim d) {
  std::vector<std::string_view> cells;
  if (d == Delim::space) {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      if (i >= line.size()) break;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
      cells.push_back(line.substr(i, j - i));
      i = j;
    }
    return cells;
  }
  const char c = d == Delim::comma ? ',' : '\t';
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(c, start);
    cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

bool parse_cell(std::string_view cell, double& out) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return false;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size();
}

}  // namespace

DenseMatrix parse_matrix(std::string_view text) {
  std::vector<std::vector<double>> rows;
  bool header_allowed = true;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    const std::string_view raw =
        text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;

    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto cells = split(line, detect(line));
    std::vector<double> values(cells.size());
    bool numeric = true;
    for (std::size_t i = 0; i < cells.size(); ++i) numeric = numeric && parse_cell(cells[i], values[i]);
    if (!numeric) {
      if (header_allowed) {
        header_allowed = false;
        continue;
      }
      throw IoError("line " + std::to_string(line_no) + ": non-numeric cell");
    }
    header_allowed = false;
    if (!rows.empty() && values.size() != rows.front().size()) {
      throw IoError("line " + std::to_string(line_no) + ": ragged row (" + std::to_string(values.size()) +
                    " cells, expected " + std::to_string(rows.front().size()) + ")");
    }
    for (double v : values) {
      if (!std::isfinite(v)) throw IoError("line " + std::to_string(line_no) + ": non-finite value");
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty() || rows.front().empty()) throw IoError("no matrix data");

  DenseMatrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return m;
}

DenseMatrix read_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_matrix(buf.str());
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

std::string format_double(double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

std::string format_matrix(const DenseMatrix& m, const std::vector<std::string>& comments) {
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\n";
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

void write_matrix(const std::string& path, const DenseMatrix& m, const std::vector<std::string>& comments) {
  write_text_atomic(path, format_matrix(m, comments));
}

std::string format_trace(const std::vector<TraceRecord>& traces, const std::vector<std::string>& comments) {
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\n";
  out += kTraceHeader;
  out += '\n';
  for (const auto& r : traces) {
    out += std::to_string(r.iter);
    for (double v : {r.time_s, r.fidelity, r.orth_defect, r.energy, r.grad_norm, r.lr, r.best_energy}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  static std::atomic<unsigned> counter{0};
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp" + std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename into " + path);
  }
}

}  // namespace nsaflow
