#include "stokes/sparse.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace stokes {

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, std::vector<Triplet> triplets) {
    for (const auto& t : triplets)
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
            throw std::invalid_argument("SparseMatrix::from_triplets: index out of range");
    std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return std::make_pair(a.row, a.col) < std::make_pair(b.row, b.col);
    });
    SparseMatrix m(rows, cols);
    m.col_.reserve(triplets.size());
    m.val_.reserve(triplets.size());
    size_t i = 0;
    for (int r = 0; r < rows; ++r) {
        while (i < triplets.size() && triplets[i].row == r) {
            int c = triplets[i].col;
            double v = 0.0;
            while (i < triplets.size() && triplets[i].row == r && triplets[i].col == c)
                v += triplets[i++].value;
            m.col_.push_back(c);
            m.val_.push_back(v);
        }
        m.row_ptr_[r + 1] = static_cast<int>(m.col_.size());
    }
    return m;
}

double SparseMatrix::coeff(int i, int j) const {
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
        if (col_[k] == j) return val_[k];
    return 0.0;
}

std::vector<double> SparseMatrix::multiply(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != cols_)
        throw std::invalid_argument("SparseMatrix::multiply: size mismatch");
    std::vector<double> y(rows_, 0.0);
    for (int r = 0; r < rows_; ++r) {
        double s = 0.0;
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += val_[k] * x[col_[k]];
        y[r] = s;
    }
    return y;
}

std::vector<double> SparseMatrix::multiply_transpose(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != rows_)
        throw std::invalid_argument("SparseMatrix::multiply_transpose: size mismatch");
    std::vector<double> y(cols_, 0.0);
    for (int r = 0; r < rows_; ++r)
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) y[col_[k]] += val_[k] * x[r];
    return y;
}

std::string SparseMatrix::to_coordinate_text() const {
    std::string o;
    char buf[96];
    for (int r = 0; r < rows_; ++r)
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            std::snprintf(buf, sizeof buf, "%d %d %.17g\n", r, col_[k], val_[k]);
            o += buf;
        }
    return o;
}

}  // namespace stokes
