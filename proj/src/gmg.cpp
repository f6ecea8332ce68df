#include <algorithm>
#include <cmath>
#include <string>

#include "gepup/linsolve.hpp"

namespace gepup {

CsrMatrix build_prolongation(const FeSpace& coarse, const FeSpace& fine) {
  const auto& cm = coarse.mesh();
  const auto& fm = fine.mesh();
  if (coarse.degree() != fine.degree() || fm.nx() != 2 * cm.nx() || fm.ny() != 2 * cm.ny())
    throw ConfigurationError("prolongation requires nested meshes of equal degree");
  std::vector<int> row_ptr(fine.n_dofs() + 1, 0);
  std::vector<int> cols;
  std::vector<double> vals;
  for (int f = 0; f < fine.n_dofs(); ++f) {
    const Vec2 p = fine.support_point(f);
    const int e = cm.locate(p);
    const Vec2 o = cm.element_origin(e);
    const Vec2 ref{std::clamp((p.x - o.x) / cm.hx(), 0.0, 1.0),
                   std::clamp((p.y - o.y) / cm.hy(), 0.0, 1.0)};
    const auto sv = shape_eval(coarse.degree(), ref);
    const auto dofs = coarse.element_dofs(e);
    std::vector<std::pair<int, double>> row;
    for (std::size_t i = 0; i < dofs.size(); ++i)
      if (std::abs(sv.values[i]) > 1e-14) row.emplace_back(dofs[i], sv.values[i]);
    std::sort(row.begin(), row.end());
    for (const auto& [c, v] : row) {
      cols.push_back(c);
      vals.push_back(v);
    }
    row_ptr[f + 1] = static_cast<int>(cols.size());
  }
  return CsrMatrix(fine.n_dofs(), coarse.n_dofs(), std::move(row_ptr), std::move(cols),
                   std::move(vals));
}

GmgPreconditioner::GmgPreconditioner(std::vector<CsrMatrix> operators,
                                     std::vector<CsrMatrix> prolongations, GmgSettings settings,
                                     bool singular, std::vector<std::vector<char>> constrained)
    : settings_(settings), singular_(singular) {
  const std::size_t nl = operators.size();
  if (nl == 0) throw ConfigurationError("multigrid needs at least one level");
  if (prolongations.size() != nl) throw ConfigurationError("one prolongation per level expected");
  if (!constrained.empty() && constrained.size() != nl)
    throw ConfigurationError("constraint masks must be given for every level");
  levels_.resize(nl);
  for (std::size_t l = 0; l < nl; ++l) {
    Level& lv = levels_[l];
    lv.op = std::move(operators[l]);
    const int n = lv.op.n_rows();
    lv.inv_diag = lv.op.diagonal();
    for (double& d : lv.inv_diag) {
      if (!(d > 0.0)) throw ConfigurationError("multigrid level operator has a non-positive diagonal");
      d = 1.0 / d;
    }
    if (!constrained.empty()) {
      if (static_cast<int>(constrained[l].size()) != n)
        throw ConfigurationError("constraint mask size mismatch");
      lv.constrained = std::move(constrained[l]);
    }
    if (l > 0) {
      lv.prolong = std::move(prolongations[l]);
      if (lv.prolong.n_rows() != n || lv.prolong.n_cols() != levels_[l - 1].op.n_rows())
        throw ConfigurationError("prolongation shape does not match level sizes at level " +
                                 std::to_string(l));
      lv.restrict_ = lv.prolong.transpose();
      lv.rc.resize(levels_[l - 1].op.n_rows());
      lv.xc.resize(levels_[l - 1].op.n_rows());
    }
    lv.res.resize(n);
    lv.tmp.resize(n);
  }

  const CsrMatrix& a0 = levels_[0].op;
  coarse_n_ = a0.n_rows();
  if (coarse_n_ <= settings_.dense_coarse_limit) {
    const int n = coarse_n_;
    chol_.assign(static_cast<std::size_t>(n) * n, 0.0);
    double trace = 0.0;
    for (int i = 0; i < n; ++i)
      for (int p = a0.row_ptr()[i]; p < a0.row_ptr()[i + 1]; ++p) {
        chol_[static_cast<std::size_t>(i) * n + a0.cols()[p]] = a0.values()[p];
        if (a0.cols()[p] == i) trace += a0.values()[p];
      }
    if (singular_) {
      // lift the constant nullspace: A + alpha * 1 1^T
      const double alpha = trace / (static_cast<double>(n) * n);
      for (double& v : chol_) v += alpha;
    }
    for (int j = 0; j < n; ++j) {
      double d = chol_[static_cast<std::size_t>(j) * n + j];
      for (int k = 0; k < j; ++k) d -= chol_[static_cast<std::size_t>(j) * n + k] * chol_[static_cast<std::size_t>(j) * n + k];
      if (!(d > 0.0)) throw NumericalBreakdown("coarse Cholesky factorization failed");
      d = std::sqrt(d);
      chol_[static_cast<std::size_t>(j) * n + j] = d;
      for (int i = j + 1; i < n; ++i) {
        double s = chol_[static_cast<std::size_t>(i) * n + j];
        for (int k = 0; k < j; ++k) s -= chol_[static_cast<std::size_t>(i) * n + k] * chol_[static_cast<std::size_t>(j) * n + k];
        chol_[static_cast<std::size_t>(i) * n + j] = s / d;
      }
    }
  }
}

void GmgPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
  if (static_cast<int>(r.size()) != levels_.back().op.n_rows() || z.size() != r.size())
    throw ConfigurationError("multigrid applied to a vector of the wrong size");
  vcycle(n_levels() - 1, r, z);
}

void GmgPreconditioner::smooth(const Level& lv, std::span<const double> r, std::span<double> x,
                               int sweeps, bool zero_guess) const {
  const double w = settings_.damping;
  const std::size_t n = r.size();
  int s = 0;
  if (zero_guess && sweeps > 0) {
    for (std::size_t i = 0; i < n; ++i) x[i] = w * lv.inv_diag[i] * r[i];
    s = 1;
  }
  for (; s < sweeps; ++s) {
    lv.op.multiply(x, lv.tmp);
    for (std::size_t i = 0; i < n; ++i) x[i] += w * lv.inv_diag[i] * (r[i] - lv.tmp[i]);
  }
}

void GmgPreconditioner::coarse_solve(std::span<const double> r, std::span<double> x) const {
  const Level& lv = levels_[0];
  if (chol_.empty()) {
    std::fill(x.begin(), x.end(), 0.0);
    smooth(lv, r, x, settings_.coarse_sweeps, true);
    return;
  }
  const int n = coarse_n_;
  // L y = r, L^T x = y
  for (int i = 0; i < n; ++i) {
    double s = r[i];
    for (int k = 0; k < i; ++k) s -= chol_[static_cast<std::size_t>(i) * n + k] * x[k];
    x[i] = s / chol_[static_cast<std::size_t>(i) * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = x[i];
    for (int k = i + 1; k < n; ++k) s -= chol_[static_cast<std::size_t>(k) * n + i] * x[k];
    x[i] = s / chol_[static_cast<std::size_t>(i) * n + i];
  }
}

void GmgPreconditioner::vcycle(int l, std::span<const double> r, std::span<double> x) const {
  if (l == 0) {
    coarse_solve(r, x);
    return;
  }
  const Level& lv = levels_[l];
  const Level& coarse = levels_[l - 1];
  const std::size_t n = r.size();
  if (settings_.pre_sweeps == 0) std::fill(x.begin(), x.end(), 0.0);
  smooth(lv, r, x, settings_.pre_sweeps, true);

  lv.op.multiply(x, lv.res);
  for (std::size_t i = 0; i < n; ++i) lv.res[i] = r[i] - lv.res[i];
  if (!lv.constrained.empty())
    for (std::size_t i = 0; i < n; ++i)
      if (lv.constrained[i]) lv.res[i] = 0.0;
  lv.restrict_.multiply(lv.res, lv.rc);
  if (!coarse.constrained.empty())
    for (std::size_t i = 0; i < lv.rc.size(); ++i)
      if (coarse.constrained[i]) lv.rc[i] = 0.0;

  vcycle(l - 1, lv.rc, lv.xc);

  lv.prolong.multiply(lv.xc, lv.tmp);
  if (!lv.constrained.empty())
    for (std::size_t i = 0; i < n; ++i)
      if (lv.constrained[i]) lv.tmp[i] = 0.0;
  for (std::size_t i = 0; i < n; ++i) x[i] += lv.tmp[i];

  smooth(lv, r, x, settings_.post_sweeps, false);
}

}  // namespace gepup
