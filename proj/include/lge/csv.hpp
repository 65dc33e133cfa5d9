#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>

namespace lge::csv {

// Headerless row-major CSV, comma separated, 17 significant digits.
// Round-trips IEEE doubles exactly.
void write_matrix(const std::string& path, const Eigen::MatrixXd& m);
std::string format_matrix(const Eigen::MatrixXd& m);

// Throws std::runtime_error with row/column diagnostics on malformed input.
Eigen::MatrixXd read_matrix(const std::string& path);
Eigen::MatrixXd parse_matrix(const std::string& text, const std::string& origin);

// Flat key=value files ('#' starts a comment, blank lines ignored).
using KeyValues = std::map<std::string, std::string>;
KeyValues read_key_values(const std::string& path);
void write_key_values(const std::string& path, const KeyValues& kv);

// Atomic write: temp file in the same directory, then rename.
void write_text_atomic(const std::string& path, const std::string& text);

}  // namespace lge::csv
