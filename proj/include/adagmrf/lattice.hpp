#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "adagmrf/random.hpp"

namespace adagmrf {

// Physical coordinate frame of a lattice. Units are lattice cells unless a
// millimetre spacing is supplied.
struct Frame {
  double origin_row = 0.0;
  double origin_col = 0.0;
  double spacing = 1.0;
};

// Rectangular rows x cols lattice with row-major linear indexing
// (index = row * cols + col, both 0-based).
class LatticeGrid {
 public:
  static constexpr int kMinExtent = 5;

  LatticeGrid(int rows, int cols, Frame frame = {});

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return std::size_t(rows_) * cols_; }
  const Frame& frame() const noexcept { return frame_; }

  std::size_t index(int row, int col) const noexcept {
    return std::size_t(row) * cols_ + col;
  }
  std::pair<int, int> coords(std::size_t index) const noexcept {
    return {int(index / cols_), int(index % cols_)};
  }

  double row_coord(int row) const noexcept {
    return frame_.origin_row + frame_.spacing * row;
  }
  double col_coord(int col) const noexcept {
    return frame_.origin_col + frame_.spacing * col;
  }

  bool is_interior(int row, int col) const noexcept {
    return row > 0 && row < rows_ - 1 && col > 0 && col < cols_ - 1;
  }
  bool is_boundary(std::size_t index) const noexcept {
    auto [r, c] = coords(index);
    return !is_interior(r, c);
  }

  // Number of stencil rows, (rows-2)(cols-2).
  std::size_t interior_count() const noexcept {
    return std::size_t(rows_ - 2) * (cols_ - 2);
  }
  // Dimension of the null space of the interior-only precision, which equals
  // the number of boundary nodes.
  std::size_t null_space_dim() const noexcept {
    return size() - interior_count();
  }

  LatticeGrid transposed() const;

  friend bool operator==(const LatticeGrid& a, const LatticeGrid& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_;
  }

 private:
  int rows_;
  int cols_;
  Frame frame_;
};

// Transpose a row-major rows x cols field into a row-major cols x rows one.
template <typename T>
std::vector<T> transpose_field(std::span<const T> field, int rows, int cols) {
  std::vector<T> out(field.size());
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      out[std::size_t(c) * rows + r] = field[std::size_t(r) * cols + c];
  return out;
}

// Interior 5-point Laplacian, one row per interior node (in row-major order
// of the interior nodes). Row-compressed storage with integer coefficients.
class DiffOperator {
 public:
  std::size_t rows() const noexcept { return row_ptr_.size() - 1; }
  std::size_t cols() const noexcept { return cols_; }
  int lattice_rows() const noexcept { return lattice_rows_; }
  int lattice_cols() const noexcept { return lattice_cols_; }
  // Half-bandwidth of B'DB under row-major ordering.
  std::size_t precision_bandwidth() const noexcept {
    return 2 * std::size_t(lattice_cols_);
  }

  std::span<const std::size_t> row_indices(std::size_t r) const {
    return {col_index_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  std::span<const int> row_values(std::size_t r) const {
    return {values_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  // Lattice index of the node the stencil is centred on.
  std::size_t center(std::size_t r) const { return centers_[r]; }

  // out = B z
  void apply(std::span<const double> z, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> z) const;

  std::vector<double> to_dense() const;

 private:
  friend DiffOperator build_diff_operator(const LatticeGrid& grid);

  std::size_t cols_ = 0;
  int lattice_rows_ = 0;
  int lattice_cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_index_;
  std::vector<int> values_;
  std::vector<std::size_t> centers_;
};

DiffOperator build_diff_operator(const LatticeGrid& grid);

// Symmetric banded matrix, lower band stored row by row. Entry (i, j) with
// 0 <= i - j <= bandwidth lives at data[i * (bandwidth + 1) + bandwidth - (i - j)],
// so each stored row is contiguous in ascending column order.
class BandedMatrix {
 public:
  BandedMatrix() = default;
  BandedMatrix(std::size_t n, std::size_t bandwidth);

  std::size_t size() const noexcept { return n_; }
  std::size_t bandwidth() const noexcept { return bw_; }

  // Lower-triangle element, requires 0 <= i - j <= bandwidth.
  double& at(std::size_t i, std::size_t j) {
    return data_[i * (bw_ + 1) + bw_ - (i - j)];
  }
  double at(std::size_t i, std::size_t j) const {
    return data_[i * (bw_ + 1) + bw_ - (i - j)];
  }
  // Symmetric element access; zero outside the band.
  double operator()(std::size_t i, std::size_t j) const;

  // First stored column of row i.
  std::size_t row_begin(std::size_t i) const noexcept {
    return i > bw_ ? i - bw_ : 0;
  }
  // Contiguous stored entries of row i for columns [row_begin(i), i].
  double* row_data(std::size_t i) noexcept {
    return data_.data() + i * (bw_ + 1) + bw_ - (i - row_begin(i));
  }
  const double* row_data(std::size_t i) const noexcept {
    return data_.data() + i * (bw_ + 1) + bw_ - (i - row_begin(i));
  }

  void fill(double value);
  void scale(double factor);
  void add_diagonal(double value);
  void add_diagonal(std::span<const double> values);
  // this += factor * other (same shape)
  void add_scaled(const BandedMatrix& other, double factor);

  // out = M x
  void multiply(std::span<const double> x, std::span<double> out) const;
  double quadratic_form(std::span<const double> x) const;

  std::vector<double> to_dense() const;

  // Coordinate-format dump (row, col, value), lower triangle, 0-based.
  void write_coordinates(std::ostream& os) const;

 private:
  std::size_t n_ = 0;
  std::size_t bw_ = 0;
  std::vector<double> data_;
};

// B' diag(1 / gamma_sq) B plus the local variances it was built from.
struct AdaptivePrecision {
  std::vector<double> gamma_sq;
  BandedMatrix matrix;

  // z' A z computed through the stencil increments.
  double quadratic_form(const DiffOperator& op,
                        std::span<const double> z) const;
};

// out += scale * B' diag(1 / gamma_sq) B. `out` must have the precision
// bandwidth of the lattice. No positivity check.
void accumulate_precision(const DiffOperator& op,
                          std::span<const double> gamma_sq, double scale,
                          BandedMatrix& out);

// Throws DomainError on a non-positive local variance.
AdaptivePrecision assemble_precision(const DiffOperator& op,
                                     std::span<const double> gamma_sq);

// Factor M = L L' in place; the lower band of `m` is overwritten by L.
void banded_cholesky_inplace(BandedMatrix& m);

BandedMatrix banded_cholesky(BandedMatrix m);

// Solve L y = b in place, L lower banded factor.
void solve_lower(const BandedMatrix& factor, std::span<double> b);
// Solve L' x = y in place.
void solve_upper(const BandedMatrix& factor, std::span<double> y);

// One draw from N(Q^{-1} b, Q^{-1}) where Q = `precision` and b =
// `linear_term`.
std::vector<double> sample_gaussian_field(const BandedMatrix& precision,
                                          std::span<const double> linear_term,
                                          Rng& rng);

// Workspace variant: `precision` is factored in place and the draw is
// written to `out`.
void sample_gaussian_field_inplace(BandedMatrix& precision,
                                   std::span<const double> linear_term,
                                   Rng& rng, std::span<double> out);

}  // namespace adagmrf
