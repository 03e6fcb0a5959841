#pragma once

// Text interchange: matrices as CSV (one row per line), arrays as a small
// self-describing JSON document with hex-float entries, and the comma lists
// used on the command line.

#include "kronchaos/errors.hpp"
#include "kronchaos/tensor_core.hpp"

#include <string>
#include <vector>

namespace kronchaos {

/// Rows separated by newlines, entries by commas (whitespace ignored, blank
/// lines and lines starting with '#' skipped). Every row must have the same
/// length.
Matrix parse_matrix_csv(const std::string& text);
Matrix read_matrix_csv(const std::string& path);
/// Entries printed with 17 significant digits, so values round-trip.
std::string format_matrix_csv(const Matrix& A);
void write_matrix_csv(const std::string& path, const Matrix& A);

/// {"format": "kronchaos-array", "version": 1, "labels": [...], "dims": [...],
///  "data": ["0x1p+0", ...]} with the row-major buffer in hex floats.
std::string array_to_json(const TensorArray& B);
/// Accepts hex-float strings or plain JSON numbers in "data".
TensorArray array_from_json(const std::string& text);

/// "2,3,4" -> {2, 3, 4}; every entry >= 1.
std::vector<std::size_t> parse_size_list(const std::string& text);
/// "2,4,8" or "0.5, 1e-3" -> reals.
std::vector<double> parse_real_list(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes);
/// 16 lowercase hex digits.
std::string hex64(std::uint64_t v);

}  // namespace kronchaos
