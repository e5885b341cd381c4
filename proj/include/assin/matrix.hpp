#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "assin/error.hpp"

namespace assin {

/// Dense row-major matrix of doubles; rows are observations.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m.cols_) throw dimension_error("ragged rows");
      std::copy(rows[i].begin(), rows[i].end(), m.data_.begin() + i * m.cols_);
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  void append_row(std::span<const double> values) {
    if (rows_ == 0 && cols_ == 0) cols_ = values.size();
    if (values.size() != cols_) throw dimension_error("row length differs from column count");
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
  }

  // Rows selected by index, in the given order.
  Matrix select_rows(std::span<const std::size_t> idx) const {
    Matrix out(idx.size(), cols_);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      auto src = row(idx[k]);
      std::copy(src.begin(), src.end(), out.row(k).begin());
    }
    return out;
  }

  const std::vector<double>& data() const noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace assin
