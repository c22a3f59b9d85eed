#pragma once

#include <string>
#include <utility>
#include <vector>

#include "spacedec/types.h"

namespace spacedec::io {

// Reads "matrix array real general" and "matrix coordinate real general"
// (also integer/pattern fields) into a dense matrix.
Matrix read_matrix_market(const std::string& path);
SparseMatrix read_matrix_market_sparse(const std::string& path);

void write_matrix_market_array(const std::string& path, const Matrix& A);
void write_matrix_market_coordinate(const std::string& path, const SparseMatrix& A);

// "u v" per line, 1-indexed; '#' and '%' start comments. Returns 0-indexed pairs.
std::vector<std::pair<Index, Index>> read_edge_list(const std::string& path, Index* max_node = nullptr);

} // namespace spacedec::io
