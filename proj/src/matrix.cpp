#include "fsel/matrix.hpp"

#include <stdexcept>

namespace fsel {

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return {};
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != m.cols_) throw std::invalid_argument("from_rows: ragged input");
        for (std::size_t c = 0; c < m.cols_; ++c) m(r, c) = rows[r][c];
    }
    return m;
}

std::vector<double> Matrix::column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
}

void Matrix::set_column(std::size_t c, std::span<const double> values) {
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = values[r];
}

Matrix Matrix::take_rows(std::span<const std::size_t> idx) const {
    Matrix out(idx.size(), cols_);
    for (std::size_t r = 0; r < idx.size(); ++r) {
        const double* src = data_.data() + idx[r] * cols_;
        double* dst = out.data_.data() + r * cols_;
        std::copy(src, src + cols_, dst);
    }
    return out;
}

Matrix Matrix::take_columns(std::span<const std::size_t> idx) const {
    Matrix out(rows_, idx.size());
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < idx.size(); ++c) out(r, c) = (*this)(r, idx[c]);
    return out;
}

}  // namespace fsel
