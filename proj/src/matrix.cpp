#include "affectcl/matrix.hpp"

#include <algorithm>

#include "affectcl/errors.hpp"

namespace affectcl {

Matrix Matrix::gather_rows(std::span<const std::size_t> indices) const {
  Matrix out(indices.size(), cols_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= rows_) throw ConfigError("gather_rows: row index out of range");
    auto src = row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  Matrix out(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != out.cols()) throw ConfigError("from_rows: ragged rows");
    std::copy(rows[r].begin(), rows[r].end(), out.row(r).begin());
  }
  return out;
}

}  // namespace affectcl
