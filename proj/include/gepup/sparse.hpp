#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace gepup {

using Vector = std::vector<double>;

/// Square compressed-sparse-row matrix. Column indices are strictly
/// increasing within each row.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  CsrMatrix(int n_rows, int n_cols, std::vector<int> row_ptr, std::vector<int> cols,
            std::vector<double> vals);

  /// Builds the pattern from per-row column lists (need not be sorted/unique).
  static CsrMatrix from_pattern(int n_rows, int n_cols, std::vector<std::vector<int>> rows);
  static CsrMatrix identity(int n);

  int n_rows() const { return n_rows_; }
  int n_cols() const { return n_cols_; }
  std::size_t nnz() const { return cols_.size(); }

  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& cols() const { return cols_; }
  const std::vector<double>& values() const { return vals_; }
  std::vector<double>& values() { return vals_; }

  /// Position of (i, j) in the value array, or -1 if not in the pattern.
  std::int64_t find(int i, int j) const;
  double at(int i, int j) const;
  void add(int i, int j, double v);

  /// y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  Vector operator*(std::span<const double> x) const;
  /// y = A^T x
  void multiply_transpose(std::span<const double> x, std::span<double> y) const;

  Vector diagonal() const;
  CsrMatrix transpose() const;
  bool same_pattern(const CsrMatrix& other) const;
  bool all_finite() const;

  /// alpha*A + beta*B for matrices sharing one sparsity pattern.
  static CsrMatrix combine(double alpha, const CsrMatrix& a, double beta, const CsrMatrix& b);

 private:
  int n_rows_ = 0;
  int n_cols_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> cols_;
  std::vector<double> vals_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
/// y += alpha x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

}  // namespace gepup
