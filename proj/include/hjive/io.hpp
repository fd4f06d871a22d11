#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hjive/linalg.hpp"

namespace hjive::io {

/// Headerless CSV, one unit per row. Ragged rows or non-numeric cells are
/// InvalidInput; unreadable files are Io.
Matrix read_csv_matrix(const std::filesystem::path& path);

/// Every value written with 17 significant digits.
void write_csv_matrix(const std::filesystem::path& path, const Matrix& m);

std::string format_double(double value);

void write_text(const std::filesystem::path& path, const std::string& text);

/// Expands shell-style patterns (`*`, `?` in the file name part) and sorts the
/// matches naturally, so view_10.csv follows view_9.csv. Plain paths are kept
/// as given.
std::vector<std::filesystem::path> expand_views(const std::vector<std::string>& patterns);

/// "1,2,3" → {1, 2, 3}
std::vector<double> parse_number_list(const std::string& text);

}  // namespace hjive::io
