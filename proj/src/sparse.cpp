#include "gepup/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gepup {

CsrMatrix::CsrMatrix(int n_rows, int n_cols, std::vector<int> row_ptr, std::vector<int> cols,
                     std::vector<double> vals)
    : n_rows_(n_rows),
      n_cols_(n_cols),
      row_ptr_(std::move(row_ptr)),
      cols_(std::move(cols)),
      vals_(std::move(vals)) {
  if (static_cast<int>(row_ptr_.size()) != n_rows_ + 1 || cols_.size() != vals_.size() ||
      static_cast<std::size_t>(row_ptr_.back()) != cols_.size())
    throw std::invalid_argument("inconsistent CSR arrays");
}

CsrMatrix CsrMatrix::from_pattern(int n_rows, int n_cols, std::vector<std::vector<int>> rows) {
  std::vector<int> row_ptr(n_rows + 1, 0);
  std::vector<int> cols;
  for (int i = 0; i < n_rows; ++i) {
    auto& r = rows[i];
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    cols.insert(cols.end(), r.begin(), r.end());
    row_ptr[i + 1] = static_cast<int>(cols.size());
  }
  std::vector<double> vals(cols.size(), 0.0);
  return CsrMatrix(n_rows, n_cols, std::move(row_ptr), std::move(cols), std::move(vals));
}

CsrMatrix CsrMatrix::identity(int n) {
  std::vector<int> row_ptr(n + 1), cols(n);
  for (int i = 0; i <= n; ++i) row_ptr[i] = i;
  for (int i = 0; i < n; ++i) cols[i] = i;
  return CsrMatrix(n, n, std::move(row_ptr), std::move(cols), std::vector<double>(n, 1.0));
}

std::int64_t CsrMatrix::find(int i, int j) const {
  const auto begin = cols_.begin() + row_ptr_[i];
  const auto end = cols_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return -1;
  return it - cols_.begin();
}

double CsrMatrix::at(int i, int j) const {
  const auto p = find(i, j);
  return p < 0 ? 0.0 : vals_[p];
}

void CsrMatrix::add(int i, int j, double v) {
  const auto p = find(i, j);
  if (p < 0) throw std::out_of_range("entry not in sparsity pattern");
  vals_[p] += v;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  const int* rp = row_ptr_.data();
  const int* c = cols_.data();
  const double* v = vals_.data();
  const double* xp = x.data();
  for (int i = 0; i < n_rows_; ++i) {
    double s = 0.0;
    for (int p = rp[i]; p < rp[i + 1]; ++p) s += v[p] * xp[c[p]];
    y[i] = s;
  }
}

Vector CsrMatrix::operator*(std::span<const double> x) const {
  Vector y(n_rows_);
  multiply(x, y);
  return y;
}

void CsrMatrix::multiply_transpose(std::span<const double> x, std::span<double> y) const {
  std::fill(y.begin(), y.end(), 0.0);
  for (int i = 0; i < n_rows_; ++i)
    for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) y[cols_[p]] += vals_[p] * x[i];
}

Vector CsrMatrix::diagonal() const {
  Vector d(n_rows_, 0.0);
  for (int i = 0; i < n_rows_; ++i) d[i] = at(i, i);
  return d;
}

CsrMatrix CsrMatrix::transpose() const {
  std::vector<int> row_ptr(n_cols_ + 1, 0);
  for (int c : cols_) ++row_ptr[c + 1];
  for (int i = 0; i < n_cols_; ++i) row_ptr[i + 1] += row_ptr[i];
  std::vector<int> cols(cols_.size());
  std::vector<double> vals(vals_.size());
  std::vector<int> next(row_ptr.begin(), row_ptr.end() - 1);
  for (int i = 0; i < n_rows_; ++i)
    for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      const int q = next[cols_[p]]++;
      cols[q] = i;
      vals[q] = vals_[p];
    }
  return CsrMatrix(n_cols_, n_rows_, std::move(row_ptr), std::move(cols), std::move(vals));
}

bool CsrMatrix::same_pattern(const CsrMatrix& other) const {
  return n_rows_ == other.n_rows_ && n_cols_ == other.n_cols_ && row_ptr_ == other.row_ptr_ &&
         cols_ == other.cols_;
}

bool CsrMatrix::all_finite() const {
  return std::all_of(vals_.begin(), vals_.end(), [](double v) { return std::isfinite(v); });
}

CsrMatrix CsrMatrix::combine(double alpha, const CsrMatrix& a, double beta, const CsrMatrix& b) {
  if (!a.same_pattern(b)) throw std::invalid_argument("combine requires identical patterns");
  CsrMatrix out = a;
  for (std::size_t p = 0; p < out.vals_.size(); ++p)
    out.vals_[p] = alpha * a.vals_[p] + beta * b.vals_[p];
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace gepup
