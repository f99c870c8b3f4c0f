#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace varl::numerics {

/// Row-major dense matrix; one row per batch sample.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }

    void resize(std::size_t rows, std::size_t cols) {
        rows_ = rows;
        cols_ = cols;
        data_.assign(rows * cols, 0.0);
    }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Stacks equally sized vectors as matrix rows.
template <typename Range>
Matrix stack_rows(const Range& rows, std::size_t cols) {
    Matrix out(std::size(rows), cols);
    std::size_t r = 0;
    for (const auto& v : rows) {
        auto dst = out.row(r++);
        for (std::size_t c = 0; c < cols; ++c) dst[c] = v[c];
    }
    return out;
}

}  // namespace varl::numerics
