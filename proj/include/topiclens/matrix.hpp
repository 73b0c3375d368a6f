#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <span>
#include <tuple>
#include <vector>

namespace topiclens {

/// Dense row-major matrix of doubles. Used for φ (topics × terms),
/// Θ (documents × topics), document embeddings and projection inputs.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    assert(data_.size() == rows_ * cols_);
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<double> column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
  }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Sparse nonnegative integer counts in compressed-row form (documents × terms).
class SparseCounts {
 public:
  struct Entry {
    std::uint32_t column;
    std::uint64_t count;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  SparseCounts() = default;
  SparseCounts(std::size_t rows, std::size_t cols) : cols_(cols), row_start_(rows + 1, 0) {}

  /// Builds from unsorted (row, column, count) triplets; duplicates are summed,
  /// zero counts dropped.
  static SparseCounts from_triplets(std::size_t rows, std::size_t cols,
                                    std::vector<std::tuple<std::size_t, std::size_t, std::uint64_t>> triplets);

  std::size_t rows() const { return row_start_.empty() ? 0 : row_start_.size() - 1; }
  std::size_t cols() const { return cols_; }
  std::size_t nonzeros() const { return entries_.size(); }

  std::span<const Entry> row(std::size_t r) const {
    return {entries_.data() + row_start_[r], row_start_[r + 1] - row_start_[r]};
  }
  std::uint64_t at(std::size_t r, std::size_t c) const;
  std::uint64_t row_sum(std::size_t r) const;
  std::vector<std::uint64_t> row_sums() const;

  friend bool operator==(const SparseCounts&, const SparseCounts&) = default;

 private:
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_start_;
  std::vector<Entry> entries_;
};

}  // namespace topiclens
