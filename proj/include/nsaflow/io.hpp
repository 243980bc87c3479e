#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nsaflow/flow.hpp"
#include "nsaflow/matrix.hpp"

namespace nsaflow {

/// Delimiter-separated matrix text: one row per line, comma, tab or
/// whitespace separated (auto-detected), '#' comment lines ignored, and an
/// optional single non-numeric header line. Throws IoError on ragged rows,
/// unparsable cells or an empty body.
DenseMatrix parse_matrix(std::string_view text);
DenseMatrix read_matrix(const std::string& path);

/// Comma-separated rows at 17 significant digits, each comment emitted as a
/// leading "# " line.
std::string format_matrix(const DenseMatrix& m, const std::vector<std::string>& comments = {});
void write_matrix(const std::string& path, const DenseMatrix& m, const std::vector<std::string>& comments = {});

inline constexpr std::string_view kTraceHeader = "iter,time_s,fidelity,orth_defect,energy,grad_norm,lr,best_energy";
std::string format_trace(const std::vector<TraceRecord>& traces, const std::vector<std::string>& comments = {});

/// Writes to a sibling temporary file and renames it over `path`.
void write_text_atomic(const std::string& path, const std::string& content);

/// "%.17g".
std::string format_double(double v);

}  // namespace nsaflow
