#pragma once

#include <string>
#include <vector>

namespace stokes {

struct Triplet {
    int row = 0;
    int col = 0;
    double value = 0.0;
};

/// Compressed-row sparse matrix with sorted, unique column indices per row.
/// Explicit zeros are kept (Dirichlet elimination zeroes values in place).
class SparseMatrix {
  public:
    SparseMatrix() = default;
    SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

    /// Duplicate triplets are summed in input order.
    static SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet> triplets);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int nnz() const { return static_cast<int>(col_.size()); }

    const std::vector<int>& row_ptr() const { return row_ptr_; }
    const std::vector<int>& col_index() const { return col_; }
    const std::vector<double>& values() const { return val_; }
    std::vector<double>& values() { return val_; }

    double coeff(int i, int j) const;  // 0 if not stored

    std::vector<double> multiply(const std::vector<double>& x) const;
    std::vector<double> multiply_transpose(const std::vector<double>& x) const;

    /// Coordinate text export, one "i j value" line per stored entry,
    /// 17 significant digits.
    std::string to_coordinate_text() const;

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<int> row_ptr_{0};
    std::vector<int> col_;
    std::vector<double> val_;
};

}  // namespace stokes
