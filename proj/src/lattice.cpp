#include "adagmrf/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "adagmrf/errors.hpp"

namespace adagmrf {
namespace {

// Four independent accumulators keep the reduction order fixed while letting
// the compiler pipeline the multiply-adds.
inline double dot(const double* a, const double* b, std::size_t len) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t k = 0;
  for (; k + 4 <= len; k += 4) {
    s0 += a[k] * b[k];
    s1 += a[k + 1] * b[k + 1];
    s2 += a[k + 2] * b[k + 2];
    s3 += a[k + 3] * b[k + 3];
  }
  for (; k < len; ++k) s0 += a[k] * b[k];
  return (s0 + s1) + (s2 + s3);
}

}  // namespace

LatticeGrid::LatticeGrid(int rows, int cols, Frame frame)
    : rows_(rows), cols_(cols), frame_(frame) {
  if (rows < kMinExtent || cols < kMinExtent)
    throw DimensionError("lattice must be at least 5x5, got " +
                         std::to_string(rows) + "x" + std::to_string(cols));
  if (!(frame.spacing > 0.0))
    throw DomainError("lattice spacing must be positive");
}

LatticeGrid LatticeGrid::transposed() const {
  return LatticeGrid(cols_, rows_,
                     Frame{frame_.origin_col, frame_.origin_row,
                           frame_.spacing});
}

DiffOperator build_diff_operator(const LatticeGrid& grid) {
  DiffOperator op;
  op.cols_ = grid.size();
  op.lattice_rows_ = grid.rows();
  op.lattice_cols_ = grid.cols();
  const std::size_t m = grid.interior_count();
  op.row_ptr_.reserve(m + 1);
  op.col_index_.reserve(5 * m);
  op.values_.reserve(5 * m);
  op.centers_.reserve(m);
  for (int r = 1; r < grid.rows() - 1; ++r) {
    for (int c = 1; c < grid.cols() - 1; ++c) {
      // Ascending column order: up, left, centre, right, down.
      const std::size_t idx[5] = {grid.index(r - 1, c), grid.index(r, c - 1),
                                  grid.index(r, c), grid.index(r, c + 1),
                                  grid.index(r + 1, c)};
      const int val[5] = {1, 1, -4, 1, 1};
      for (int k = 0; k < 5; ++k) {
        op.col_index_.push_back(idx[k]);
        op.values_.push_back(val[k]);
      }
      op.centers_.push_back(grid.index(r, c));
      op.row_ptr_.push_back(op.col_index_.size());
    }
  }
  return op;
}

void DiffOperator::apply(std::span<const double> z,
                         std::span<double> out) const {
  if (z.size() != cols_ || out.size() != rows())
    throw DimensionError("DiffOperator::apply: size mismatch");
  for (std::size_t r = 0; r < rows(); ++r) {
    double s = 0.0;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      s += values_[k] * z[col_index_[k]];
    out[r] = s;
  }
}

std::vector<double> DiffOperator::apply(std::span<const double> z) const {
  std::vector<double> out(rows());
  apply(z, out);
  return out;
}

std::vector<double> DiffOperator::to_dense() const {
  std::vector<double> dense(rows() * cols_, 0.0);
  for (std::size_t r = 0; r < rows(); ++r)
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      dense[r * cols_ + col_index_[k]] = values_[k];
  return dense;
}

BandedMatrix::BandedMatrix(std::size_t n, std::size_t bandwidth)
    : n_(n), bw_(bandwidth), data_(n * (bandwidth + 1), 0.0) {}

double BandedMatrix::operator()(std::size_t i, std::size_t j) const {
  if (i < j) std::swap(i, j);
  if (i - j > bw_) return 0.0;
  return at(i, j);
}

void BandedMatrix::fill(double value) {
  std::fill(data_.begin(), data_.end(), value);
}

void BandedMatrix::scale(double factor) {
  for (double& v : data_) v *= factor;
}

void BandedMatrix::add_diagonal(double value) {
  for (std::size_t i = 0; i < n_; ++i) at(i, i) += value;
}

void BandedMatrix::add_diagonal(std::span<const double> values) {
  if (values.size() != n_)
    throw DimensionError("BandedMatrix::add_diagonal: size mismatch");
  for (std::size_t i = 0; i < n_; ++i) at(i, i) += values[i];
}

void BandedMatrix::add_scaled(const BandedMatrix& other, double factor) {
  if (other.n_ != n_ || other.bw_ != bw_)
    throw DimensionError("BandedMatrix::add_scaled: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k)
    data_[k] += factor * other.data_[k];
}

void BandedMatrix::multiply(std::span<const double> x,
                            std::span<double> out) const {
  if (x.size() != n_ || out.size() != n_)
    throw DimensionError("BandedMatrix::multiply: size mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t b = row_begin(i);
    const double* row = row_data(i);
    double s = 0.0;
    for (std::size_t j = b; j < i; ++j) {
      s += row[j - b] * x[j];
      out[j] += row[j - b] * x[i];
    }
    out[i] += s + row[i - b] * x[i];
  }
}

double BandedMatrix::quadratic_form(std::span<const double> x) const {
  std::vector<double> mx(n_);
  multiply(x, mx);
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) s += x[i] * mx[i];
  return s;
}

std::vector<double> BandedMatrix::to_dense() const {
  std::vector<double> dense(n_ * n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = row_begin(i); j <= i; ++j)
      dense[i * n_ + j] = dense[j * n_ + i] = at(i, j);
  return dense;
}

void BandedMatrix::write_coordinates(std::ostream& os) const {
  const auto old = os.precision(17);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = row_begin(i); j <= i; ++j)
      if (at(i, j) != 0.0) os << i << ' ' << j << ' ' << at(i, j) << '\n';
  os.precision(old);
}

double AdaptivePrecision::quadratic_form(const DiffOperator& op,
                                         std::span<const double> z) const {
  const auto inc = op.apply(z);
  double s = 0.0;
  for (std::size_t j = 0; j < inc.size(); ++j)
    s += inc[j] * inc[j] / gamma_sq[j];
  return s;
}

void accumulate_precision(const DiffOperator& op,
                          std::span<const double> gamma_sq, double scale,
                          BandedMatrix& out) {
  if (gamma_sq.size() != op.rows())
    throw DimensionError("precision assembly: gamma_sq length " +
                         std::to_string(gamma_sq.size()) + " != " +
                         std::to_string(op.rows()));
  for (std::size_t r = 0; r < op.rows(); ++r) {
    const double w = scale / gamma_sq[r];
    const auto idx = op.row_indices(r);
    const auto val = op.row_values(r);
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = 0; b <= a; ++b)
        out.at(idx[a], idx[b]) += w * val[a] * val[b];
  }
}

AdaptivePrecision assemble_precision(const DiffOperator& op,
                                     std::span<const double> gamma_sq) {
  for (std::size_t j = 0; j < gamma_sq.size(); ++j)
    if (!(gamma_sq[j] > 0.0))
      throw DomainError("local variance gamma_sq[" + std::to_string(j) +
                        "] must be positive");
  AdaptivePrecision p{std::vector<double>(gamma_sq.begin(), gamma_sq.end()),
                      BandedMatrix(op.cols(), op.precision_bandwidth())};
  accumulate_precision(op, gamma_sq, 1.0, p.matrix);
  return p;
}

void banded_cholesky_inplace(BandedMatrix& m) {
  const std::size_t n = m.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ib = m.row_begin(i);
    double* li = m.row_data(i);
    for (std::size_t j = ib; j < i; ++j) {
      const std::size_t jb = m.row_begin(j);
      const double* lj = m.row_data(j);
      const std::size_t k0 = std::max(ib, jb);
      const double s = li[j - ib] - dot(li + (k0 - ib), lj + (k0 - jb), j - k0);
      li[j - ib] = s / lj[j - jb];
    }
    const double d = li[i - ib] - dot(li, li, i - ib);
    if (!(d > 0.0)) throw FactorizationError(i, d);
    li[i - ib] = std::sqrt(d);
  }
}

BandedMatrix banded_cholesky(BandedMatrix m) {
  banded_cholesky_inplace(m);
  return m;
}

void solve_lower(const BandedMatrix& factor, std::span<double> b) {
  const std::size_t n = factor.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ib = factor.row_begin(i);
    const double* li = factor.row_data(i);
    b[i] = (b[i] - dot(li, b.data() + ib, i - ib)) / li[i - ib];
  }
}

void solve_upper(const BandedMatrix& factor, std::span<double> y) {
  for (std::size_t i = factor.size(); i-- > 0;) {
    const std::size_t ib = factor.row_begin(i);
    const double* li = factor.row_data(i);
    const double xi = y[i] / li[i - ib];
    y[i] = xi;
    double* yb = y.data() + ib;
    for (std::size_t k = 0; k < i - ib; ++k) yb[k] -= li[k] * xi;
  }
}

void sample_gaussian_field_inplace(BandedMatrix& precision,
                                   std::span<const double> linear_term,
                                   Rng& rng, std::span<double> out) {
  const std::size_t n = precision.size();
  if (linear_term.size() != n || out.size() != n)
    throw DimensionError("sample_gaussian_field: size mismatch");
  banded_cholesky_inplace(precision);
  std::copy(linear_term.begin(), linear_term.end(), out.begin());
  solve_lower(precision, out);
  for (std::size_t i = 0; i < n; ++i) out[i] += rng.normal();
  solve_upper(precision, out);
}

std::vector<double> sample_gaussian_field(const BandedMatrix& precision,
                                          std::span<const double> linear_term,
                                          Rng& rng) {
  BandedMatrix work = precision;
  std::vector<double> out(precision.size());
  sample_gaussian_field_inplace(work, linear_term, rng, out);
  return out;
}

}  // namespace adagmrf
