#include "prodsdp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace prodsdp {

std::vector<std::string> SolverConfig::defects() const {
  std::vector<std::string> out;
  if (!(gap_tol > 0)) out.push_back("gap_tol must be positive");
  if (!(feas_tol > 0)) out.push_back("feas_tol must be positive");
  if (max_iters <= 0) out.push_back("max_iters must be positive");
  if (!(step_fraction > 0 && step_fraction < 1)) out.push_back("step_fraction must be in (0,1)");
  if (!(divergence_bound > 0)) out.push_back("divergence_bound must be positive");
  return out;
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "Optimal";
    case SolveStatus::kMaxIters: return "MaxIters";
    case SolveStatus::kInfeasible: return "Infeasible";
    case SolveStatus::kUnbounded: return "Unbounded";
  }
  return "?";
}

SymMatrix dual_slack(const SdpProgram& p, std::span<const double> y, std::span<const double> z,
                     SlackSign sign) {
  if (y.size() != p.constraints.size() || z.size() != p.nonneg.size()) {
    throw std::invalid_argument("dual_slack: multiplier length does not match constraint count");
  }
  Matrix ya(p.dim(), p.dim());
  for (std::size_t k = 0; k < y.size(); ++k)
    if (y[k] != 0.0) ya += y[k] * p.constraints[k].a;
  Matrix zb = p.objective;
  for (std::size_t k = 0; k < z.size(); ++k)
    if (z[k] != 0.0) zb += z[k] * p.nonneg[k];
  return SymMatrix::symmetrize(sign == SlackSign::kMinus ? ya - zb : ya + zb);
}

SdpSolution evaluate_solution(const SdpProgram& p, SymMatrix x, std::vector<double> y,
                              std::vector<double> z) {
  SdpSolution s;
  s.primal_value = frobenius_dot(p.objective, x);
  s.dual_value = 0.0;
  for (std::size_t k = 0; k < p.constraints.size(); ++k) s.dual_value += p.constraints[k].rhs * y[k];
  s.constraint_residuals.resize(p.constraints.size());
  for (std::size_t k = 0; k < p.constraints.size(); ++k) {
    const auto& c = p.constraints[k];
    const double v = frobenius_dot(c.a, x) - c.rhs;
    s.constraint_residuals[k] = c.rel == Relation::kEq ? std::abs(v) : std::max(0.0, v);
  }
  s.nonneg_residuals.resize(p.nonneg.size());
  for (std::size_t k = 0; k < p.nonneg.size(); ++k)
    s.nonneg_residuals[k] = std::max(0.0, -frobenius_dot(p.nonneg[k], x));
  s.psd_residual = std::max(0.0, -min_eigenvalue(x));
  s.dual_psd_residual = std::max(0.0, -min_eigenvalue(dual_slack(p, y, z, SlackSign::kMinus)));
  s.x = std::move(x);
  s.y = std::move(y);
  s.z = std::move(z);
  return s;
}

bool meets_optimality_contract(const SdpProgram& p, const SdpSolution& s,
                               const SolverConfig& cfg) {
  const double tol = cfg.feas_tol;
  if (s.psd_residual > tol || s.dual_psd_residual > tol) return false;
  for (double r : s.constraint_residuals)
    if (r > tol) return false;
  for (double r : s.nonneg_residuals)
    if (r > tol) return false;
  for (double v : s.z)
    if (v < -tol) return false;
  for (std::size_t k = 0; k < p.constraints.size(); ++k)
    if (p.constraints[k].rel == Relation::kLe && s.y[k] < -tol) return false;
  return std::abs(s.primal_value - s.dual_value) <= cfg.gap_tol * (1.0 + std::abs(s.primal_value));
}

namespace {

// Packed upper triangle with sqrt(2) on off-diagonal entries, so that
// svec(A) . svec(B) == A . B for symmetric A, B.
class SvecIndex {
 public:
  explicit SvecIndex(std::size_t n) : n_(n) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) pairs_.emplace_back(i, j);
  }
  std::size_t n() const { return n_; }
  std::size_t size() const { return pairs_.size(); }
  const std::pair<std::size_t, std::size_t>& pair(std::size_t p) const { return pairs_[p]; }

  std::vector<double> pack(const Matrix& m) const {
    std::vector<double> v(size());
    for (std::size_t p = 0; p < size(); ++p) {
      const auto [i, j] = pairs_[p];
      v[p] = i == j ? m(i, i) : kSqrt2 * m(i, j);
    }
    return v;
  }
  SymMatrix unpack(std::span<const double> v) const {
    SymMatrix m(n_);
    for (std::size_t p = 0; p < size(); ++p) {
      const auto [i, j] = pairs_[p];
      m.set(i, j, i == j ? v[p] : v[p] / kSqrt2);
    }
    return m;
  }

  static constexpr double kSqrt2 = 1.41421356237309504880;

 private:
  std::size_t n_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
};

struct SparseRow {
  std::vector<std::size_t> idx;
  std::vector<double> val;

  double dot(std::span<const double> x) const {
    double s = 0.0;
    for (std::size_t k = 0; k < idx.size(); ++k) s += val[k] * x[idx[k]];
    return s;
  }
  void axpy(double a, std::span<double> out) const {
    for (std::size_t k = 0; k < idx.size(); ++k) out[idx[k]] += a * val[k];
  }
};

SparseRow sparse_svec(const SvecIndex& sv, const Matrix& m, double scale) {
  SparseRow r;
  for (std::size_t p = 0; p < sv.size(); ++p) {
    const auto [i, j] = sv.pair(p);
    const double v = i == j ? m(i, i) : SvecIndex::kSqrt2 * m(i, j);
    if (v != 0.0) {
      r.idx.push_back(p);
      r.val.push_back(scale * v);
    }
  }
  return r;
}

// Largest alpha in (0, inf] keeping X + alpha dX positive definite, given the
// Cholesky factor of X.
double max_step(const Matrix& x_chol_inv, const Matrix& dx) {
  const Matrix m = x_chol_inv * dx * x_chol_inv.transpose();
  const double lmin = min_eigenvalue(SymMatrix::symmetrize(m));
  return lmin >= 0 ? std::numeric_limits<double>::infinity() : -1.0 / lmin;
}

double max_step(std::span<const double> v, std::span<const double> dv) {
  double a = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < v.size(); ++k)
    if (dv[k] < 0) a = std::min(a, -v[k] / dv[k]);
  return a;
}

using DenseMatrix = Eigen::MatrixXd;
using DenseLlt = Eigen::LLT<DenseMatrix>;
using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

DenseMatrix to_dense(const Matrix& m) {
  return Eigen::Map<const RowMajor>(m.entries().data(), m.rows(), m.cols());
}

Matrix from_dense(const DenseMatrix& d) {
  Matrix m(d.rows(), d.cols());
  Eigen::Map<RowMajor>(m.entries().data(), d.rows(), d.cols()) = d;
  return m;
}

// Cholesky of the lower triangle with a growing diagonal shift for matrices
// that lost definiteness to rounding.
bool robust_llt(const DenseMatrix& m, DenseLlt& out) {
  out.compute(m);
  if (out.info() == Eigen::Success) return true;
  const double diag_max = std::max(m.diagonal().cwiseAbs().maxCoeff(), 1.0);
  double shift = diag_max * 1e-14;
  for (int attempt = 0; attempt < 8; ++attempt) {
    DenseMatrix t = m;
    t.diagonal().array() += shift;
    out.compute(t);
    if (out.info() == Eigen::Success) return true;
    shift *= 100.0;
  }
  return false;
}

class InteriorPoint {
 public:
  InteriorPoint(const SdpProgram& p, const SolverConfig& cfg)
      : p_(p), cfg_(cfg), n_(p.dim()), sv_(p.dim()) {
    c_ = p.objective;
    for (std::size_t k = 0; k < p.constraints.size(); ++k) {
      const auto& con = p.constraints[k];
      if (con.rel == Relation::kEq) {
        slot_.push_back({true, eq_rows_.size()});
        eq_rows_.push_back(sparse_svec(sv_, con.a, 1.0));
        eq_mats_.push_back(&con.a);
        b_.push_back(con.rhs);
      } else {
        slot_.push_back({false, in_rows_.size()});
        in_rows_.push_back(sparse_svec(sv_, con.a, 1.0));
        in_mats_.push_back({&con.a, 1.0});
        h_.push_back(con.rhs);
      }
    }
    nonneg_offset_ = in_rows_.size();
    for (const auto& bm : p.nonneg) {
      in_rows_.push_back(sparse_svec(sv_, bm, -1.0));
      in_mats_.push_back({&bm, -1.0});
      h_.push_back(0.0);
    }
  }

  SolveReport run();

 private:
  struct Slot {
    bool eq;
    std::size_t index;
  };
  struct Direction {
    Matrix dx, ds;
    std::vector<double> dy, dw, dslack;
  };

  void initialize();
  void residuals();
  bool factor();
  Direction direction(double target_mu);
  void kkt_solve(std::span<const double> f, std::span<const double> rp, std::vector<double>& dx,
                 std::vector<double>& dy) const;
  void kkt_residual(std::span<const double> f, std::span<const double> rp,
                    std::span<const double> dx, std::span<const double> dy,
                    std::vector<double>& e1, std::vector<double>& e2) const;
  double complementarity(const Matrix& x, const Matrix& s, std::span<const double> sl,
                         std::span<const double> w) const {
    return frobenius_dot(x, s) + dot(sl, w);
  }
  SdpSolution extract() const;

  const SdpProgram& p_;
  const SolverConfig& cfg_;
  std::size_t n_;
  SvecIndex sv_;
  Matrix c_;
  std::vector<Slot> slot_;
  std::vector<SparseRow> eq_rows_, in_rows_;
  std::vector<const Matrix*> eq_mats_;
  std::vector<std::pair<const Matrix*, double>> in_mats_;
  std::vector<double> b_, h_;
  std::size_t nonneg_offset_ = 0;

  // Iterate.
  Matrix x_, s_;
  std::vector<double> y_, w_, slack_;
  // Residuals.
  std::vector<double> rp_, rg_;
  Matrix rd_;
  double mu_ = 0.0;
  // Factorizations for the current iterate.
  Matrix x_chol_inv_, s_chol_inv_, winv_;
  DenseLlt h_llt_, k_llt_;
  DenseMatrix h_inv_at_;  // H^{-1} A^T

};

void InteriorPoint::initialize() {
  const double n = static_cast<double>(n_);
  double xi = std::max(10.0, std::sqrt(n));
  double eta = std::max(10.0, std::sqrt(n));
  double data_norm = c_.frobenius_norm();
  for (std::size_t k = 0; k < eq_mats_.size(); ++k) {
    const double an = eq_mats_[k]->frobenius_norm();
    xi = std::max(xi, n * (1.0 + std::abs(b_[k])) / (1.0 + an));
    data_norm = std::max(data_norm, an);
  }
  for (std::size_t k = 0; k < in_mats_.size(); ++k) {
    const double an = in_mats_[k].first->frobenius_norm();
    xi = std::max(xi, n * (1.0 + std::abs(h_[k])) / (1.0 + an));
    data_norm = std::max(data_norm, an);
  }
  eta = std::max(eta, 1.0 + data_norm);
  x_ = xi * Matrix::identity(n_);
  s_ = eta * Matrix::identity(n_);
  y_.assign(eq_rows_.size(), 0.0);
  w_.assign(in_rows_.size(), eta);
  slack_.assign(in_rows_.size(), xi);
}

void InteriorPoint::residuals() {
  const auto x = sv_.pack(x_);
  rp_.resize(eq_rows_.size());
  for (std::size_t k = 0; k < eq_rows_.size(); ++k) rp_[k] = b_[k] - eq_rows_[k].dot(x);
  rg_.resize(in_rows_.size());
  for (std::size_t k = 0; k < in_rows_.size(); ++k)
    rg_[k] = h_[k] - in_rows_[k].dot(x) - slack_[k];
  rd_ = c_ + s_;
  for (std::size_t k = 0; k < eq_mats_.size(); ++k)
    if (y_[k] != 0.0) rd_ -= y_[k] * *eq_mats_[k];
  for (std::size_t k = 0; k < in_mats_.size(); ++k)
    if (w_[k] != 0.0) rd_ -= (w_[k] * in_mats_[k].second) * *in_mats_[k].first;
  const double denom = static_cast<double>(n_ + in_rows_.size());
  mu_ = complementarity(x_, s_, slack_, w_) / denom;
}

bool InteriorPoint::factor() {
  auto lx = cholesky(x_);
  auto ls = cholesky(s_);
  if (!lx || !ls) return false;
  x_chol_inv_ = lower_inverse(*lx);
  s_chol_inv_ = lower_inverse(*ls);

  // NT scaling: L^T S L = Q diag(d^2) Q^T, W^{-1} = L^{-T} Q diag(d) Q^T L^{-1}.
  const Matrix lt_s_l = lx->transpose() * s_ * *lx;
  const auto ed = eigen(SymMatrix::symmetrize(lt_s_l));
  Matrix t = ed.eigenvectors.transpose() * x_chol_inv_;
  Matrix dt = t;
  for (std::size_t i = 0; i < n_; ++i) {
    const double d = std::sqrt(std::max(ed.eigenvalues[i], 0.0));
    for (std::size_t j = 0; j < n_; ++j) dt(i, j) *= d;
  }
  winv_ = SymMatrix::symmetrize(t.transpose() * dt).matrix();

  // H = W^{-1} (x)_s W^{-1} + G^T D G, packed coordinates, lower triangle.
  const std::size_t dim = sv_.size();
  DenseMatrix hm(dim, dim);
  const Matrix& v = winv_;
  constexpr double r2 = SvecIndex::kSqrt2;
  for (std::size_t q = 0; q < dim; ++q) {
    const auto [k, l] = sv_.pair(q);
    for (std::size_t p = q; p < dim; ++p) {
      const auto [i, j] = sv_.pair(p);
      double val;
      if (i == j) {
        val = k == l ? v(i, k) * v(i, k) : r2 * v(i, k) * v(i, l);
      } else if (k == l) {
        val = r2 * v(i, k) * v(j, k);
      } else {
        val = v(i, k) * v(j, l) + v(i, l) * v(j, k);
      }
      hm(p, q) = val;
    }
  }
  // Rows restricted to a face are dense; a rank-k update beats scattering.
  double scatter = 0.0;
  for (const auto& row : in_rows_) scatter += double(row.idx.size()) * double(row.idx.size());
  if (scatter > 0.05 * double(in_rows_.size()) * double(dim) * double(dim)) {
    DenseMatrix gt = DenseMatrix::Zero(dim, in_rows_.size());
    for (std::size_t r = 0; r < in_rows_.size(); ++r)
      in_rows_[r].axpy(std::sqrt(w_[r] / slack_[r]), {gt.col(r).data(), dim});
    hm.selfadjointView<Eigen::Lower>().rankUpdate(gt);
  } else {
    for (std::size_t r = 0; r < in_rows_.size(); ++r) {
      const double d = w_[r] / slack_[r];
      const auto& row = in_rows_[r];
      for (std::size_t a = 0; a < row.idx.size(); ++a) {
        const double da = d * row.val[a];
        for (std::size_t bb = 0; bb < row.idx.size(); ++bb) {
          const std::size_t pa = row.idx[a];
          const std::size_t pb = row.idx[bb];
          if (pb <= pa) hm(pa, pb) += da * row.val[bb];
        }
      }
    }
  }
  if (!robust_llt(hm, h_llt_)) return false;

  const std::size_t m = eq_rows_.size();
  if (m > 0) {
    DenseMatrix at = DenseMatrix::Zero(dim, m);
    for (std::size_t k = 0; k < m; ++k) eq_rows_[k].axpy(1.0, {at.col(k).data(), dim});
    h_inv_at_ = h_llt_.solve(at);
    DenseMatrix km = at.transpose() * h_inv_at_;
    if (!robust_llt(km, k_llt_)) return false;
  }
  return true;
}

void InteriorPoint::kkt_solve(std::span<const double> f, std::span<const double> rp,
                              std::vector<double>& dx, std::vector<double>& dy) const {
  const std::size_t dim = sv_.size();
  const std::size_t m = eq_rows_.size();
  Eigen::VectorXd hf = h_llt_.solve(Eigen::Map<const Eigen::VectorXd>(f.data(), dim));
  dy.assign(m, 0.0);
  if (m > 0) {
    Eigen::VectorXd t(m);
    for (std::size_t k = 0; k < m; ++k) t[k] = eq_rows_[k].dot({hf.data(), dim}) - rp[k];
    Eigen::Map<Eigen::VectorXd>(dy.data(), m) = k_llt_.solve(t);
    hf -= h_inv_at_ * Eigen::Map<const Eigen::VectorXd>(dy.data(), m);
  }
  dx.assign(hf.data(), hf.data() + dim);
}

void InteriorPoint::kkt_residual(std::span<const double> f, std::span<const double> rp,
                                 std::span<const double> dx, std::span<const double> dy,
                                 std::vector<double>& e1, std::vector<double>& e2) const {
  // e1 = f - (W^{-1} dX W^{-1} + G^T D G dx + A^T dy),  e2 = rp - A dx.
  const Matrix dxm = sv_.unpack(dx).matrix();
  e1 = sv_.pack(SymMatrix::symmetrize(winv_ * dxm * winv_));
  for (std::size_t r = 0; r < in_rows_.size(); ++r)
    in_rows_[r].axpy((w_[r] / slack_[r]) * in_rows_[r].dot(dx), e1);
  for (std::size_t k = 0; k < eq_rows_.size(); ++k) eq_rows_[k].axpy(dy[k], e1);
  for (std::size_t p = 0; p < e1.size(); ++p) e1[p] = f[p] - e1[p];
  e2.resize(eq_rows_.size());
  for (std::size_t k = 0; k < eq_rows_.size(); ++k) e2[k] = rp[k] - eq_rows_[k].dot(dx);
}

InteriorPoint::Direction InteriorPoint::direction(double target_mu) {
  const std::size_t dim = sv_.size();
  const std::size_t m = eq_rows_.size();
  const std::size_t mi = in_rows_.size();

  // R_c = target_mu S^{-1} - X.
  Matrix s_inv = s_chol_inv_.transpose() * s_chol_inv_;
  Matrix rc = target_mu * s_inv - x_;
  Matrix wrw = winv_ * rc * winv_;

  std::vector<double> q(mi);
  for (std::size_t r = 0; r < mi; ++r) {
    q[r] = (target_mu - slack_[r] * w_[r]) / slack_[r] - (w_[r] / slack_[r]) * rg_[r];
  }
  std::vector<double> f = sv_.pack(SymMatrix::symmetrize(wrw));
  const auto rd_packed = sv_.pack(SymMatrix::symmetrize(rd_));
  for (std::size_t p = 0; p < dim; ++p) f[p] += rd_packed[p];
  for (std::size_t r = 0; r < mi; ++r) in_rows_[r].axpy(-q[r], f);

  Direction d;
  std::vector<double> dxv;
  kkt_solve(f, rp_, dxv, d.dy);
  // Iterative refinement against the exact operator; the factorization may
  // carry a diagonal shift late in the run.
  for (int round = 0; round < 3; ++round) {
    std::vector<double> e1, e2;
    kkt_residual(f, rp_, dxv, d.dy, e1, e2);
    const double before = std::max(norm_inf(e1), norm_inf(e2));
    if (before <= 1e-15 * (1.0 + norm_inf(f) + norm_inf(rp_))) break;
    std::vector<double> cx, cy;
    kkt_solve(e1, e2, cx, cy);
    std::vector<double> tx = dxv, ty = d.dy;
    for (std::size_t p = 0; p < dim; ++p) tx[p] += cx[p];
    for (std::size_t k = 0; k < m; ++k) ty[k] += cy[k];
    kkt_residual(f, rp_, tx, ty, e1, e2);
    if (std::max(norm_inf(e1), norm_inf(e2)) >= before) break;
    dxv = std::move(tx);
    d.dy = std::move(ty);
  }
  d.dx = sv_.unpack(dxv).matrix();

  d.dslack.resize(mi);
  d.dw.resize(mi);
  for (std::size_t r = 0; r < mi; ++r) {
    const double gdx = in_rows_[r].dot(dxv);
    d.dslack[r] = rg_[r] - gdx;
    d.dw[r] = q[r] + (w_[r] / slack_[r]) * gdx;
  }
  // dS = A^T dy + G^T dw - R_d keeps the dual residual on a straight line.
  Matrix ds = -1.0 * rd_;
  for (std::size_t k = 0; k < m; ++k)
    if (d.dy[k] != 0.0) ds += d.dy[k] * *eq_mats_[k];
  for (std::size_t r = 0; r < mi; ++r)
    if (d.dw[r] != 0.0) ds += (d.dw[r] * in_mats_[r].second) * *in_mats_[r].first;
  d.ds = SymMatrix::symmetrize(ds).matrix();
  return d;
}

SdpSolution InteriorPoint::extract() const {
  std::vector<double> y(p_.constraints.size());
  for (std::size_t k = 0; k < slot_.size(); ++k)
    y[k] = slot_[k].eq ? y_[slot_[k].index] : w_[slot_[k].index];
  std::vector<double> z(p_.nonneg.size());
  for (std::size_t k = 0; k < z.size(); ++k) z[k] = w_[nonneg_offset_ + k];
  return evaluate_solution(p_, SymMatrix::symmetrize(x_), std::move(y), std::move(z));
}

SolveReport InteriorPoint::run() {
  SolveReport report;
  initialize();
  int stalls = 0;
  for (int iter = 0; iter < cfg_.max_iters; ++iter) {
    residuals();
    report.iterations = iter;
    const double pobj = frobenius_dot(c_, x_);
    double dobj = dot(b_, y_) + dot(h_, w_);
    const double pinf = std::max(norm_inf(rp_), norm_inf(rg_));
    const double dinf = rd_.frobenius_norm();
    const double gap = std::abs(pobj - dobj);

    // Aim well inside the gap tolerance so reported values are close to the
    // optimum, not just within the contract; a run that stalls after meeting
    // the contract still counts below.
    if (pinf <= 0.5 * cfg_.feas_tol && dinf <= 0.5 * cfg_.feas_tol &&
        gap <= 0.05 * cfg_.gap_tol * (1.0 + std::abs(pobj))) {
      auto sol = extract();
      if (meets_optimality_contract(p_, sol, cfg_)) {
        report.solution = std::move(sol);
        report.status = SolveStatus::kOptimal;
        return report;
      }
    }
    if (pobj > cfg_.divergence_bound && pinf < 1.0) {
      report.status = SolveStatus::kUnbounded;
      report.solution = extract();
      return report;
    }
    if (dobj < -cfg_.divergence_bound && dinf < 1.0) {
      report.status = SolveStatus::kInfeasible;
      report.solution = extract();
      return report;
    }

    if (!factor()) break;

    // Predictor: pure Newton step toward mu = 0 decides the centering weight.
    const Direction aff = direction(0.0);
    double ap = std::min(1.0, std::min(max_step(x_chol_inv_, aff.dx), max_step(slack_, aff.dslack)));
    double ad = std::min(1.0, std::min(max_step(s_chol_inv_, aff.ds), max_step(w_, aff.dw)));
    const Matrix xa = x_ + ap * aff.dx;
    const Matrix sa = s_ + ad * aff.ds;
    std::vector<double> sla(slack_), wa(w_);
    for (std::size_t r = 0; r < sla.size(); ++r) {
      sla[r] += ap * aff.dslack[r];
      wa[r] += ad * aff.dw[r];
    }
    const double denom = static_cast<double>(n_ + in_rows_.size());
    const double mu_aff = complementarity(xa, sa, sla, wa) / denom;
    double sigma = mu_ > 0 ? std::pow(std::max(mu_aff, 0.0) / mu_, 3.0) : 0.0;
    sigma = std::clamp(sigma, 0.0, 1.0);

    const Direction d = direction(sigma * mu_);
    const double tau = cfg_.step_fraction;
    ap = std::min(1.0, tau * std::min(max_step(x_chol_inv_, d.dx), max_step(slack_, d.dslack)));
    ad = std::min(1.0, tau * std::min(max_step(s_chol_inv_, d.ds), max_step(w_, d.dw)));

    x_ += ap * d.dx;
    for (std::size_t r = 0; r < slack_.size(); ++r) slack_[r] += ap * d.dslack[r];
    s_ += ad * d.ds;
    for (std::size_t k = 0; k < y_.size(); ++k) y_[k] += ad * d.dy[k];
    for (std::size_t r = 0; r < w_.size(); ++r) w_[r] += ad * d.dw[r];
    x_ = SymMatrix::symmetrize(x_).matrix();
    s_ = SymMatrix::symmetrize(s_).matrix();

    // Both steps blocked for several rounds: the iterate has lost its way,
    // usually because the feasible set has no interior point.
    stalls = std::max(ap, ad) < 1e-3 ? stalls + 1 : 0;
    if (stalls >= 3) break;
    report.iterations = iter + 1;
  }
  report.solution = extract();
  report.status = meets_optimality_contract(p_, report.solution, cfg_) ? SolveStatus::kOptimal
                                                                       : SolveStatus::kMaxIters;
  return report;
}

}  // namespace

namespace {

// Equality rows that are combinations of earlier ones.  Consistent copies are
// dropped before the interior point run and get a zero multiplier; an
// inconsistent copy makes the program infeasible.
struct RowPresolve {
  std::vector<std::size_t> kept;  // indices into p.constraints
  bool consistent = true;
};

RowPresolve presolve_rows(const SdpProgram& p, double rank_tol, double tol) {
  RowPresolve out;
  const SvecIndex sv(p.dim());
  std::vector<std::size_t> eq;
  for (std::size_t k = 0; k < p.num_constraints(); ++k) {
    if (p.constraints[k].rel == Relation::kEq)
      eq.push_back(k);
    else
      out.kept.push_back(k);
  }
  if (eq.empty()) return out;

  // Columns are svec(A_k); the extra last row carries b_k, so a dependent
  // column with a mismatched right-hand side raises the rank.
  DenseMatrix a(sv.size(), eq.size()), ab(sv.size() + 1, eq.size());
  for (std::size_t c = 0; c < eq.size(); ++c) {
    const auto col = sv.pack(p.constraints[eq[c]].a);
    for (std::size_t r = 0; r < sv.size(); ++r) a(r, c) = ab(r, c) = col[r];
    ab(sv.size(), c) = p.constraints[eq[c]].rhs;
  }
  Eigen::ColPivHouseholderQR<DenseMatrix> qr(a);
  qr.setThreshold(rank_tol);
  if (static_cast<std::size_t>(qr.rank()) == eq.size()) {
    out.kept.insert(out.kept.end(), eq.begin(), eq.end());
    std::sort(out.kept.begin(), out.kept.end());
    return out;
  }
  // Greedy pass in program order keeps the earliest independent rows.  A
  // column counts as new when its part orthogonal to the kept ones is not
  // small against its own length; a joint rank test can instead drop a
  // good column because two earlier ones are nearly parallel.
  std::vector<std::size_t> basis;
  DenseMatrix q(sv.size(), eq.size());
  for (std::size_t c = 0; c < eq.size(); ++c) {
    Eigen::VectorXd v = a.col(c);
    const double len = v.norm();
    for (int pass = 0; pass < 2; ++pass) {
      const auto qb = q.leftCols(static_cast<Eigen::Index>(basis.size()));
      v -= qb * (qb.transpose() * v);
    }
    if (v.norm() <= rank_tol * len) continue;
    q.col(static_cast<Eigen::Index>(basis.size())) = v / v.norm();
    basis.push_back(c);
  }
  DenseMatrix sub(sv.size() + 1, basis.size());
  for (std::size_t j = 0; j < basis.size(); ++j) sub.col(j) = ab.col(basis[j]);
  for (std::size_t c = 0; c < eq.size(); ++c) {
    if (std::find(basis.begin(), basis.end(), c) != basis.end()) continue;
    const Eigen::VectorXd coef = sub.topRows(sv.size()).colPivHouseholderQr().solve(a.col(c));
    const double rhs = sub.row(sv.size()).dot(coef);
    const double b = ab(sv.size(), c);
    if (std::abs(rhs - b) > tol * (1.0 + std::abs(b) + std::abs(rhs))) out.consistent = false;
  }
  for (std::size_t j : basis) out.kept.push_back(eq[j]);
  std::sort(out.kept.begin(), out.kept.end());
  return out;
}

SdpProgram select_rows(const SdpProgram& p, const std::vector<std::size_t>& rows) {
  SdpProgram q{p.objective, {}, p.nonneg};
  for (std::size_t k : rows) q.constraints.push_back(p.constraints[k]);
  return q;
}

Matrix congruence(const Matrix& u, const Matrix& a) {
  Matrix m = u.transpose() * a * u;
  // Round-off below this level only blurs sparsity.
  const double floor = 1e-14 * std::max(m.max_abs(), a.max_abs());
  for (double& v : m.entries())
    if (std::abs(v) <= floor) v = 0.0;
  return SymMatrix::symmetrize(m).matrix();
}

// Every feasible X has S . X = b^T y - sum z_i B_i . X <= 0 for the
// certificate S = sum y_k A_k - sum z_i B_i with b^T y = 0 and z >= 0, so a
// psd S pins X to the face orthogonal to range(S) and every B_i with z_i > 0
// to zero there.
struct Face {
  std::vector<double> y;  // over p.constraints, zero off EQ rows
  std::vector<double> z;  // over p.nonneg
  Matrix m;               // the certificate slack, largest eigenvalue 1
  Matrix basis;           // orthonormal basis of the complement of range(m)
  Matrix perp;            // orthonormal basis of range(m)
  std::vector<std::size_t> tight;  // nonneg rows with z_i > 0
};

// Tight nonneg rows become equalities "B_i . X = 0" after the original rows.
SdpProgram restrict_to_face(const SdpProgram& p, const Face& f) {
  const Matrix& u = f.basis;
  SdpProgram q;
  q.objective = congruence(u, p.objective);
  for (const auto& c : p.constraints) q.constraints.push_back({congruence(u, c.a), c.rhs, c.rel});
  std::vector<bool> is_tight(p.num_nonneg(), false);
  for (std::size_t i : f.tight) is_tight[i] = true;
  for (std::size_t i = 0; i < p.num_nonneg(); ++i) {
    if (is_tight[i])
      q.constraints.push_back({congruence(u, p.nonneg[i]), 0.0, Relation::kEq});
    else
      q.nonneg.push_back(congruence(u, p.nonneg[i]));
  }
  return q;
}

constexpr int kMaxFaceRounds = 3;
// Rows restricted to a computed face may disagree by this much relative to
// their size before the restriction counts as inconsistent.
constexpr double kFaceRowTol = 1e-6;

SolveReport solve_program(const SdpProgram& p, const SolverConfig& cfg, int depth, bool on_face);

std::optional<Face> find_face(const SdpProgram& p, const SolverConfig& cfg, bool on_face) {
  // With a zero objective the optimal duals are exactly the certificates;
  // the interior point method heads for one of largest rank.
  SdpProgram zero = p;
  zero.objective = Matrix(p.dim(), p.dim());
  const SolveReport r = solve_program(zero, cfg, kMaxFaceRounds, on_face);
  const auto& s = r.solution;
  if (s.y.size() != p.num_constraints() || s.z.size() != p.num_nonneg()) return std::nullopt;

  const std::size_t n = p.dim();
  std::vector<std::size_t> eq;
  for (std::size_t j = 0; j < p.num_constraints(); ++j)
    if (p.constraints[j].rel == Relation::kEq) eq.push_back(j);
  // LE rows would need y >= 0 and are left out; z far below the slack is noise.
  const double scale = dual_slack(zero, s.y, s.z, SlackSign::kMinus).matrix().max_abs();
  std::vector<double> z(p.num_nonneg(), 0.0);
  Matrix zb(n, n);
  for (std::size_t i = 0; i < z.size(); ++i)
    if (s.z[i] > 1e-6 * scale) {
      z[i] = s.z[i];
      zb += z[i] * p.nonneg[i];
    }

  // The face is pinned only to about the square root of the precision the
  // certificate is psd to, so the certificate is kept in extended precision.
  using LMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  using LVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  auto widen = [&](const Matrix& m) {
    LMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out(i, j) = m(i, j);
    return out;
  };
  std::vector<LMatrix> amat;
  for (std::size_t j : eq) amat.push_back(widen(p.constraints[j].a));
  const LMatrix zbl = widen(zb);

  struct Cert {
    LVector y;
    long double zscale = 1.0L;
    LMatrix m;
    LVector ev;
    LMatrix evec;
    std::size_t k = 0;      // eigenvalues below the cut
    long double leak = 0;   // largest |eigenvalue| below the cut
    long double by = 0;     // |b^T y| relative to its terms
  };
  // Normalized so the largest eigenvalue is 1.
  auto evaluate = [&](const LVector& y, long double zscale) -> std::optional<Cert> {
    LMatrix m = -zscale * zbl;
    for (std::size_t c = 0; c < eq.size(); ++c) m += y[c] * amat[c];
    m = (0.5L * (m + m.transpose())).eval();
    Eigen::SelfAdjointEigenSolver<LMatrix> es(m);
    if (es.info() != Eigen::Success) return std::nullopt;
    const long double top = es.eigenvalues()[n - 1];
    if (!(top > 0)) return std::nullopt;
    Cert c;
    c.y = y / top;
    c.zscale = zscale / top;
    c.m = m / top;
    c.ev = es.eigenvalues() / top;
    c.evec = es.eigenvectors();
    while (c.k < n && c.ev[c.k] < 1e-3L) ++c.k;
    if (c.k == 0 || c.k == n) return std::nullopt;
    c.leak = std::max(std::abs(c.ev[0]), std::abs(c.ev[c.k - 1]));
    long double by = 0, terms = 0;
    for (std::size_t j = 0; j < eq.size(); ++j) {
      by += c.y[j] * p.constraints[eq[j]].rhs;
      terms += std::abs(c.y[j] * p.constraints[eq[j]].rhs);
    }
    c.by = std::abs(by) / (1 + terms);
    return c;
  };

  LVector y0(eq.size());
  for (std::size_t c = 0; c < eq.size(); ++c) y0[c] = s.y[eq[c]];
  auto best = evaluate(y0, 1.0L);
  if (!best) return std::nullopt;

  // Polish by Newton steps on the small eigenvalues: a minimal-norm
  // correction of y with U^T M U = 0 and b^T y = 0 for the current small
  // eigenvectors U, which then move with M.  A round is kept only if it
  // improves on the last with the same rank.
  for (int round = 0; round < 16 && !eq.empty(); ++round) {
    if (std::max(best->leak, best->by) <= 1e-17L) break;
    const std::size_t k = best->k;
    const LMatrix u = best->evec.leftCols(k);
    const std::size_t rows = k * (k + 1) / 2 + 1;
    LMatrix sys(rows, eq.size());
    LVector res(rows);
    auto fill = [&](const LMatrix& a, auto&& put) {
      const LMatrix uau = u.transpose() * a * u;
      std::size_t r = 0;
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i; j < k; ++j) put(r++, uau(i, j));
    };
    for (std::size_t c = 0; c < eq.size(); ++c) {
      fill(amat[c], [&](std::size_t r, long double x) { sys(r, c) = x; });
      sys(rows - 1, c) = p.constraints[eq[c]].rhs;
    }
    fill(best->m, [&](std::size_t r, long double x) { res[r] = x; });
    res[rows - 1] = 0;
    for (std::size_t c = 0; c < eq.size(); ++c) res[rows - 1] += best->y[c] * p.constraints[eq[c]].rhs;
    Eigen::CompleteOrthogonalDecomposition<LMatrix> cod;
    cod.setThreshold(1e-12L);
    cod.compute(sys);
    auto next = evaluate(best->y - cod.solve(res), best->zscale);
    if (!next || next->k != k || std::max(next->leak, next->by) >= std::max(best->leak, best->by))
      break;
    best = std::move(next);
  }
  if (best->leak > 1e-6L || best->by > 1e-6L) return std::nullopt;

  Face f;
  const std::size_t k = best->k;
  f.basis = Matrix(n, k);
  f.perp = Matrix(n, n - k);
  f.m = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < k; ++c) f.basis(i, c) = static_cast<double>(best->evec(i, c));
    for (std::size_t c = k; c < n; ++c) f.perp(i, c - k) = static_cast<double>(best->evec(i, c));
    for (std::size_t j = 0; j < n; ++j) f.m(i, j) = static_cast<double>(best->m(i, j));
  }
  f.y.assign(p.num_constraints(), 0.0);
  for (std::size_t c = 0; c < eq.size(); ++c) f.y[eq[c]] = static_cast<double>(best->y[c]);
  f.z = z;
  for (double& zi : f.z) zi *= static_cast<double>(best->zscale);
  for (std::size_t i = 0; i < z.size(); ++i)
    if (z[i] > 0.0) f.tight.push_back(i);
  return f;
}

// A certificate that is psd to within eps only pins the face to within about
// sqrt(eps), so rows that are dependent on the computed face can disagree at
// that level.  Tilting the face, X = P Xs P^T with P = U + V E, keeps X psd;
// a few Gauss-Newton steps on E restore every equality row while tight
// inequality rows and the objective hold their values.
Matrix tilt_into_rows(const SdpProgram& p, const Face& f, const Matrix& xs,
                      const SolverConfig& cfg) {
  const Matrix& u = f.basis;
  const Matrix& v = f.perp;
  const std::size_t k = u.cols(), r = v.cols();
  Matrix e(r, k);
  Matrix best = u * xs * u.transpose();
  double best_err = std::numeric_limits<double>::infinity();

  // Equality rows always; inequality rows join once a step pushes them past
  // their bound and are then held at it.
  struct Row {
    const Matrix* a;
    double target;
    bool upper;  // LE row (value <= target) rather than nonneg (value >= 0)
  };
  std::vector<Row> held, watch;
  for (const auto& c : p.constraints) {
    if (c.rel == Relation::kEq)
      held.push_back({&c.a, c.rhs, false});
    else
      watch.push_back({&c.a, c.rhs, true});
  }
  for (const auto& b : p.nonneg) watch.push_back({&b, 0.0, false});

  for (int round = 0; round < 8; ++round) {
    const Matrix pm = u + v * e;
    const Matrix x = pm * xs * pm.transpose();
    double err = 0.0;
    for (const auto& row : held) err = std::max(err, std::abs(row.target - frobenius_dot(*row.a, x)));
    for (auto it = watch.begin(); it != watch.end();) {
      const double val = frobenius_dot(*it->a, x);
      const double over = it->upper ? val - it->target : it->target - val;
      if (over > 0.1 * cfg.feas_tol) {
        err = std::max(err, over);
        held.push_back(*it);
        it = watch.erase(it);
      } else {
        ++it;
      }
    }
    if (err < best_err) {
      best_err = err;
      best = x;
    }
    if (err <= 1e-3 * cfg.feas_tol || held.empty()) break;

    const Matrix pxs = pm * xs;
    Eigen::VectorXd res(held.size());
    DenseMatrix jac(held.size(), r * k);
    for (std::size_t i = 0; i < held.size(); ++i) {
      res[i] = held[i].target - frobenius_dot(*held[i].a, x);
      const Matrix g = v.transpose() * (*held[i].a) * pxs;
      for (std::size_t a = 0; a < r; ++a)
        for (std::size_t b = 0; b < k; ++b) jac(i, a * k + b) = 2.0 * g(a, b);
    }
    const Eigen::VectorXd de = jac.completeOrthogonalDecomposition().solve(res);
    for (std::size_t a = 0; a < r; ++a)
      for (std::size_t b = 0; b < k; ++b) e(a, b) += de[a * k + b];
  }
  return best;
}

// Multipliers of rows that are dependent on the face are left at zero by the
// restricted solve, but any choice with the same restriction is as good there.
// Pick the one that cancels the slack coupling between range(M) and the range
// of the restricted solution, which is what otherwise forces a huge multiple
// of the certificate in the lift.
void untangle_dual(const SdpProgram& p, const Face& f, const SymMatrix& xs,
                   std::vector<double>& y, const std::vector<double>& z) {
  std::vector<std::size_t> eq;
  for (std::size_t j = 0; j < p.num_constraints(); ++j)
    if (p.constraints[j].rel == Relation::kEq) eq.push_back(j);
  const std::size_t k = f.basis.cols(), r = f.perp.cols();
  if (eq.empty() || r == 0) return;

  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(to_dense(xs.matrix()));
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double top = ev.size() ? ev[ev.size() - 1] : 0.0;
  if (!(top > 0.0)) return;
  std::size_t first = 0;
  while (ev[first] <= 1e-6 * top) ++first;
  const Matrix q = from_dense(es.eigenvectors().rightCols(k - first));
  const Matrix w = f.basis * q;
  const std::size_t rw = w.cols();

  DenseMatrix restricted(k * (k + 1) / 2, eq.size()), cross(r * rw, eq.size());
  for (std::size_t c = 0; c < eq.size(); ++c) {
    const Matrix& a = p.constraints[eq[c]].a;
    const Matrix uau = f.basis.transpose() * a * f.basis;
    std::size_t row = 0;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i; j < k; ++j) restricted(row++, c) = uau(i, j);
    const Matrix vaw = f.perp.transpose() * a * w;
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < rw; ++j) cross(i * rw + j, c) = vaw(i, j);
  }
  Eigen::JacobiSVD<DenseMatrix> svd(restricted, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  std::size_t rank = 0;
  while (rank < static_cast<std::size_t>(sv.size()) && sv[rank] > 1e-7 * sv[0]) ++rank;
  if (rank == eq.size()) return;
  const DenseMatrix null = svd.matrixV().rightCols(eq.size() - rank);

  const Matrix s0 = dual_slack(p, y, z, SlackSign::kMinus).matrix();
  const Matrix t0 = f.perp.transpose() * s0 * w;
  Eigen::VectorXd rhs(r * rw);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < rw; ++j) rhs[i * rw + j] = -t0(i, j);
  const DenseMatrix sys = cross * null;
  const Eigen::VectorXd dy = null * sys.completeOrthogonalDecomposition().solve(rhs);
  if ((sys * (null.transpose() * dy) - rhs).norm() >= rhs.norm()) return;
  for (std::size_t c = 0; c < eq.size(); ++c) y[eq[c]] += dy[c];
}

SdpSolution lift(const SdpProgram& p, const Face& f, const SdpSolution& sub,
                 const SolverConfig& cfg) {
  const Matrix x = tilt_into_rows(p, f, sub.x.matrix(), cfg);
  std::vector<double> y(sub.y.begin(), sub.y.begin() + p.num_constraints());
  std::vector<double> z(p.num_nonneg(), 0.0);
  {
    std::vector<bool> is_tight(p.num_nonneg(), false);
    for (std::size_t i : f.tight) is_tight[i] = true;
    std::size_t loose = 0, tight = p.num_constraints();
    for (std::size_t i = 0; i < p.num_nonneg(); ++i)
      z[i] = is_tight[i] ? -sub.y[tight++] : sub.z[loose++];
  }
  untangle_dual(p, f, sub.x, y, z);
  const double target = -0.25 * cfg.feas_tol;
  auto shifted = [&](double t, std::vector<double>& ty, std::vector<double>& tz) {
    ty = y;
    tz = z;
    for (std::size_t k = 0; k < ty.size(); ++k) ty[k] += t * f.y[k];
    for (std::size_t i = 0; i < tz.size(); ++i) tz[i] += t * f.z[i];
  };
  auto ok = [&](const std::vector<double>& ty, const std::vector<double>& tz) {
    for (double zi : tz)
      if (zi < target) return false;
    return min_eigenvalue(dual_slack(p, ty, tz, SlackSign::kMinus)) >= target;
  };
  std::vector<double> ty, tz;
  shifted(0.0, ty, tz);
  if (!ok(ty, tz)) {
    double t = 1e-8 * (1.0 + norm_inf(y) + norm_inf(z));
    for (shifted(t, ty, tz); t < 1e14 && !ok(ty, tz); shifted(t, ty, tz)) t *= 2.0;
  }
  return evaluate_solution(p, SymMatrix::symmetrize(x), std::move(ty), std::move(tz));
}

// Programs restricted to a computed face (on_face) carry the face's error:
// their dependent rows may disagree slightly and their solutions are judged
// only after the parent has tilted them back into its rows.
SolveReport solve_program(const SdpProgram& p, const SolverConfig& cfg, int depth, bool on_face) {
  const RowPresolve pre =
      on_face ? presolve_rows(p, 1e-7, kFaceRowTol) : presolve_rows(p, 1e-10, 1e-9);
  SolveReport report;
  if (!pre.consistent) {
    report.status = SolveStatus::kInfeasible;
    report.solution = evaluate_solution(p, SymMatrix(p.dim()),
                                        std::vector<double>(p.num_constraints(), 0.0),
                                        std::vector<double>(p.num_nonneg(), 0.0));
    return report;
  }
  const bool trimmed = pre.kept.size() != p.num_constraints();
  const SdpProgram reduced = trimmed ? select_rows(p, pre.kept) : SdpProgram{};
  const SdpProgram& q = trimmed ? reduced : p;
  InteriorPoint ipm(q, cfg);
  report = ipm.run();
  if (trimmed) {
    std::vector<double> y(p.num_constraints(), 0.0);
    for (std::size_t j = 0; j < pre.kept.size(); ++j) y[pre.kept[j]] = report.solution.y[j];
    report.solution = evaluate_solution(p, report.solution.x, std::move(y), report.solution.z);
    if (!on_face && report.status == SolveStatus::kOptimal &&
        !meets_optimality_contract(p, report.solution, cfg))
      report.status = SolveStatus::kMaxIters;
  }

  if (report.status != SolveStatus::kMaxIters || depth >= kMaxFaceRounds) return report;
  const auto face = find_face(p, cfg, on_face);
  if (!face) return report;
  const SolveReport sub = solve_program(restrict_to_face(p, *face), cfg, depth + 1, true);
  // The face is only numerically exact, so an infeasible restriction proves
  // nothing; an unbounded one does since the face lies inside the cone.
  if (sub.status != SolveStatus::kOptimal && sub.status != SolveStatus::kUnbounded) return report;
  SolveReport lifted;
  lifted.iterations = report.iterations + sub.iterations;
  lifted.solution = lift(p, *face, sub.solution, cfg);
  lifted.status = sub.status;
  if (!on_face && sub.status == SolveStatus::kOptimal &&
      !meets_optimality_contract(p, lifted.solution, cfg))
    lifted.status = SolveStatus::kMaxIters;
  return lifted;
}

}  // namespace

SolveReport solve(const SdpProgram& p, const SolverConfig& cfg) {
  require_valid(p);
  const auto cfg_defects = cfg.defects();
  if (!cfg_defects.empty()) throw std::invalid_argument("solver config: " + cfg_defects.front());
  return solve_program(p, cfg, 0, false);
}

NnlsResult nnls(const std::vector<std::vector<double>>& columns, std::span<const double> target) {
  const std::size_t k = columns.size();
  const std::size_t len = target.size();
  for (const auto& c : columns)
    if (c.size() != len) throw std::invalid_argument("nnls: column length does not match target");

  auto residual_of = [&](const std::vector<double>& coeffs) {
    std::vector<double> r(target.begin(), target.end());
    for (std::size_t j = 0; j < k; ++j)
      if (coeffs[j] != 0.0)
        for (std::size_t i = 0; i < len; ++i) r[i] -= coeffs[j] * columns[j][i];
    return r;
  };
  // Least squares restricted to `passive` via the normal equations.
  auto solve_passive = [&](const std::vector<std::size_t>& passive) -> std::optional<std::vector<double>> {
    const std::size_t m = passive.size();
    Matrix g(m, m);
    std::vector<double> rhs(m);
    for (std::size_t a = 0; a < m; ++a) {
      rhs[a] = dot(columns[passive[a]], target);
      for (std::size_t b = 0; b <= a; ++b) {
        g(a, b) = dot(columns[passive[a]], columns[passive[b]]);
        g(b, a) = g(a, b);
      }
    }
    auto l = cholesky(g);
    if (!l) return std::nullopt;
    cholesky_solve(*l, rhs);
    std::vector<double> full(k, 0.0);
    for (std::size_t a = 0; a < m; ++a) full[passive[a]] = rhs[a];
    return full;
  };

  double scale = norm2(target);
  for (const auto& c : columns) scale = std::max(scale, norm2(c));
  const double tol = 1e-12 * std::max(scale * scale, 1.0);

  std::vector<double> x(k, 0.0);
  std::vector<bool> in_passive(k, false);
  std::vector<bool> rejected(k, false);
  const int max_outer = static_cast<int>(3 * k + 10);
  for (int outer = 0; outer < max_outer; ++outer) {
    const auto r = residual_of(x);
    std::size_t best = k;
    double best_w = tol;
    for (std::size_t j = 0; j < k; ++j) {
      if (in_passive[j] || rejected[j]) continue;
      const double wj = dot(columns[j], r);
      if (wj > best_w) {
        best_w = wj;
        best = j;
      }
    }
    if (best == k) break;
    in_passive[best] = true;

    for (std::size_t inner = 0; inner <= k; ++inner) {
      std::vector<std::size_t> passive;
      for (std::size_t j = 0; j < k; ++j)
        if (in_passive[j]) passive.push_back(j);
      auto s = solve_passive(passive);
      if (!s) {
        // Linearly dependent on the current passive set; it cannot improve the fit.
        in_passive[best] = false;
        rejected[best] = true;
        break;
      }
      rejected.assign(k, false);
      bool feasible = true;
      for (std::size_t j : passive)
        if ((*s)[j] <= 0.0) feasible = false;
      if (feasible) {
        x = std::move(*s);
        break;
      }
      double alpha = 1.0;
      for (std::size_t j : passive)
        if ((*s)[j] <= 0.0) alpha = std::min(alpha, x[j] / (x[j] - (*s)[j]));
      for (std::size_t j : passive) {
        x[j] += alpha * ((*s)[j] - x[j]);
        if (x[j] <= 1e-15 * std::max(1.0, norm_inf(x))) {
          x[j] = 0.0;
          in_passive[j] = false;
        }
      }
    }
  }
  NnlsResult out;
  out.residual = norm2(residual_of(x));
  out.coeffs = std::move(x);
  return out;
}

}  // namespace prodsdp
