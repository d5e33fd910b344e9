#pragma once

#include <string>

#include "dfclrr/types.hpp"

namespace dfclrr {

/// Plain CSV of rows. Rejects ragged rows and non-finite values.
Matrix read_csv(const std::string& path);
void write_csv(const std::string& path, const Matrix& a);

/// Binary format: magic "DFCM", then rows and cols as unsigned 64-bit
/// little-endian, then rows*cols IEEE-754 little-endian doubles in
/// column-major order. Rejects non-finite values.
Matrix read_dfcm(const std::string& path);
void write_dfcm(const std::string& path, const Matrix& a);

/// Dispatch on extension: ".csv" -> CSV, anything else -> DFCM.
Matrix read_matrix(const std::string& path);
void write_matrix(const std::string& path, const Matrix& a);

}  // namespace dfclrr
