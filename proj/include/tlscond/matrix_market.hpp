#pragma once

#include <iosfwd>
#include <string>

#include "tlscond/kernel.hpp"

namespace tlscond {

/// Reads a Matrix Market file (array or coordinate, real or integer, general)
/// into a dense matrix. Coordinate entries not listed are zero; repeated
/// entries are summed. Throws ParseError naming the file and line.
DenseMatrix read_matrix_market(const std::string& path);
DenseMatrix read_matrix_market(std::istream& in, const std::string& name);

/// Reads a right-hand side: an m x 1 Matrix Market file, or a plain text file
/// of whitespace-separated numbers.
DenseVector read_vector(const std::string& path);
DenseVector read_vector(std::istream& in, const std::string& name);

/// Array format, 17 significant digits (round-trips exactly).
void write_matrix_market(std::ostream& out, const DenseMatrix& m);
void write_matrix_market(const std::string& path, const DenseMatrix& m);

}  // namespace tlscond
