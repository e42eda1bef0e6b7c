#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include <numeric>

#include "delin/error.hpp"
#include "delin/lp/klu_factor.hpp"

namespace delin::lp {

using Clock = std::chrono::steady_clock;

/// min c'x subject to row_lo <= Ax <= row_hi, col_lo <= x <= col_hi.
/// Rows are added one at a time, then finalize() builds both sparse layouts.
struct Problem {
  int n_rows = 0;
  int n_cols = 0;
  std::vector<double> cost, col_lo, col_hi, row_lo, row_hi;
  std::vector<int> col_start, row_index;
  std::vector<double> col_value;
  std::vector<int> row_start{0}, col_index;
  std::vector<double> row_value;

  Problem() = default;
  Problem(std::vector<double> c, std::vector<double> lo, std::vector<double> hi)
      : n_cols(static_cast<int>(c.size())), cost(std::move(c)), col_lo(std::move(lo)), col_hi(std::move(hi)) {}

  void add_row(std::span<const int> idx, std::span<const double> coef, double lo, double hi) {
    for (std::size_t t = 0; t < idx.size(); ++t) {
      if (coef[t] == 0.0) continue;
      col_index.push_back(idx[t]);
      row_value.push_back(coef[t]);
    }
    row_start.push_back(static_cast<int>(col_index.size()));
    row_lo.push_back(lo);
    row_hi.push_back(hi);
    ++n_rows;
  }

  void finalize() {
    col_start.assign(static_cast<std::size_t>(n_cols) + 1, 0);
    for (int j : col_index) ++col_start[static_cast<std::size_t>(j) + 1];
    for (int j = 0; j < n_cols; ++j) col_start[static_cast<std::size_t>(j) + 1] += col_start[static_cast<std::size_t>(j)];
    row_index.assign(col_index.size(), 0);
    col_value.assign(col_index.size(), 0.0);
    auto fill = col_start;
    for (int i = 0; i < n_rows; ++i) {
      for (int k = row_start[static_cast<std::size_t>(i)]; k < row_start[static_cast<std::size_t>(i) + 1]; ++k) {
        const int j = col_index[static_cast<std::size_t>(k)];
        const auto slot = static_cast<std::size_t>(fill[static_cast<std::size_t>(j)]++);
        row_index[slot] = i;
        col_value[slot] = row_value[static_cast<std::size_t>(k)];
      }
    }
  }
};

/// A row appended after loading (cutting planes).
struct SparseRow {
  std::vector<int> idx;
  std::vector<double> coef;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

enum class Status { optimal, infeasible, time_limit, iteration_limit, numerical_failure };

inline std::string_view to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::time_limit: return "time_limit";
    case Status::iteration_limit: return "iteration_limit";
    case Status::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

/// Per-variable basis status over structurals followed by row logicals.
struct Basis {
  enum : std::uint8_t { basic = 0, at_lower = 1, at_upper = 2 };
  std::vector<std::uint8_t> status;
};

/// Backend interface used by branch and bound. Implementations must keep
/// lower_bound() a valid bound on the LP optimum even when not optimal.
class LinearSolver {
 public:
  virtual ~LinearSolver() = default;
  virtual void load(std::shared_ptr<const Problem> problem) = 0;
  virtual void set_col_bounds(int j, double lo, double hi) = 0;
  /// Appends rows; their logicals enter the basis, so dual feasibility is kept.
  virtual void add_rows(std::span<const SparseRow> rows) = 0;
  virtual Status solve(Clock::time_point deadline) = 0;
  virtual double lower_bound() const = 0;
  virtual double objective() const = 0;
  virtual std::span<const double> primal() const = 0;
  virtual std::span<const double> reduced_costs() const = 0;
  virtual std::shared_ptr<const Basis> basis() const = 0;
  virtual void set_basis(const std::shared_ptr<const Basis>& b) = 0;
  virtual long long iterations() const = 0;
};

struct SimplexOptions {
  double primal_tol = 1e-8;
  double dual_tol = 1e-9;
  double pivot_tol = 1e-9;
  int refactor_every = 100;
  bool steepest_edge = true;  // exact dual steepest edge; false uses Devex weights
  long long max_iterations = std::numeric_limits<long long>::max();
};

/// Bounded dual simplex on [A | -I] (x, s) = 0. Logical variables get finite
/// boxes from the row activity range so every variable is boxed, which lets
/// dual infeasibilities be repaired by bound flips instead of a phase one.
class DualSimplex final : public LinearSolver {
 public:
  explicit DualSimplex(SimplexOptions opt = {}) : opt_(opt) {}

  void load(std::shared_ptr<const Problem> problem) override {
    P_ = std::make_shared<Problem>(*problem);
    const auto& P = *P_;
    n_ = P.n_cols;
    m_ = P.n_rows;
    N_ = n_ + m_;
    lo_.assign(static_cast<std::size_t>(N_), 0.0);
    hi_.assign(static_cast<std::size_t>(N_), 0.0);
    c_.assign(static_cast<std::size_t>(N_), 0.0);
    for (int j = 0; j < n_; ++j) {
      lo_[ju(j)] = clamp_inf(P.col_lo[ju(j)]);
      hi_[ju(j)] = clamp_inf(P.col_hi[ju(j)]);
      c_[ju(j)] = P.cost[ju(j)];
    }
    for (int i = 0; i < m_; ++i) logical_box(i);
    x_.assign(static_cast<std::size_t>(N_), 0.0);
    d_.assign(static_cast<std::size_t>(N_), 0.0);
    alpha_.assign(static_cast<std::size_t>(N_), 0.0);
    mark_.assign(static_cast<std::size_t>(N_), 0);
    slack_basis();
  }

  void set_col_bounds(int j, double lo, double hi) override {
    lo_[ju(j)] = lo;
    hi_[ju(j)] = hi;
    if (st_[ju(j)] != Basis::basic) primal_dirty_ = true;
  }

  void add_rows(std::span<const SparseRow> rows) override {
    if (rows.empty()) return;
    auto& P = *P_;
    for (const auto& r : rows) P.add_row(r.idx, r.coef, r.lo, r.hi);
    P.finalize();
    const int old_m = m_;
    m_ = P.n_rows;
    N_ = n_ + m_;
    lo_.resize(ju(N_));
    hi_.resize(ju(N_));
    c_.resize(ju(N_), 0.0);
    x_.resize(ju(N_), 0.0);
    d_.resize(ju(N_), 0.0);
    alpha_.resize(ju(N_), 0.0);
    mark_.resize(ju(N_), 0);
    st_.resize(ju(N_), Basis::basic);
    pos_.resize(ju(N_), -1);
    for (int i = old_m; i < m_; ++i) {
      logical_box(i);
      head_.push_back(n_ + i);
      pos_[ju(n_ + i)] = i;
      dse_.push_back(1.0);
    }
    factor_ok_ = false;
  }

  std::shared_ptr<const Basis> basis() const override {
    auto b = std::make_shared<Basis>();
    b->status = st_;
    return b;
  }

  /// Restores a basis; rows added after the snapshot keep their logical basic.
  void set_basis(const std::shared_ptr<const Basis>& b) override {
    if (!b || b->status.size() > static_cast<std::size_t>(N_)) {
      slack_basis();
      return;
    }
    auto st = b->status;
    st.resize(ju(N_), Basis::basic);
    if (std::count(st.begin(), st.end(), Basis::basic) != m_) {
      slack_basis();
      return;
    }
    st_ = std::move(st);
    rebuild_head();
    dse_.assign(static_cast<std::size_t>(m_), 1.0);
    factor_ok_ = false;
  }

  Status solve(Clock::time_point deadline) override {
    if (!factor_ok_) {
      if (!refresh()) return Status::numerical_failure;
    } else {
      compute_duals();
      if (repair_duals() || primal_dirty_) compute_primal();
    }
    primal_dirty_ = false;
    bool verified = false;
    int failures = 0;
    long long local = 0;
    for (;;) {
      if ((local++ & 31) == 0 && Clock::now() >= deadline) return Status::time_limit;
      if (local > opt_.max_iterations) return Status::iteration_limit;
      if (static_cast<int>(etas_.size()) >= opt_.refactor_every) {
        if (!refresh()) return Status::numerical_failure;
      }
      const int p = choose_row();
      if (p < 0) {
        if (verified) {
          finish();
          return Status::optimal;
        }
        if (!refresh()) return Status::numerical_failure;
        verified = true;
        continue;
      }
      verified = false;
      const int r = pivot(p);
      if (r == 0) {
        failures = 0;
        continue;
      }
      if (r == 1) {
        bound_ = std::numeric_limits<double>::infinity();
        return Status::infeasible;
      }
      // numerical trouble: refactor and retry; give up after repeated failures
      if (++failures > 5) return Status::numerical_failure;
      if (!refresh()) return Status::numerical_failure;
    }
  }

  double lower_bound() const override { return bound_; }
  double objective() const override { return objective_; }
  std::span<const double> primal() const override { return std::span<const double>(x_).first(ju(n_)); }
  std::span<const double> reduced_costs() const override { return std::span<const double>(d_).first(ju(n_)); }
  long long iterations() const override { return iterations_; }

  int n_rows() const { return m_; }
  int n_cols() const { return n_; }

 private:
  static std::size_t ju(int j) { return static_cast<std::size_t>(j); }
  static double clamp_inf(double v) {
    constexpr double big = 1e9;
    return std::clamp(v, -big, big);
  }

  struct Eta {
    int p;
    double pivot;
    std::vector<int> idx;
    std::vector<double> val;
  };

  /// Finite box for logical i: the row range intersected with the activity
  /// range over the loaded column bounds.
  void logical_box(int i) {
    const auto& P = *P_;
    double amin = 0.0, amax = 0.0;
    for (int k = P.row_start[ju(i)]; k < P.row_start[ju(i) + 1]; ++k) {
      const double a = P.row_value[ju(k)];
      const int j = P.col_index[ju(k)];
      const double cl = clamp_inf(P.col_lo[ju(j)]), ch = clamp_inf(P.col_hi[ju(j)]);
      amin += a > 0 ? a * cl : a * ch;
      amax += a > 0 ? a * ch : a * cl;
    }
    lo_[ju(n_ + i)] = std::max(amin, P.row_lo[ju(i)]);
    hi_[ju(n_ + i)] = std::min(amax, P.row_hi[ju(i)]);
    if (lo_[ju(n_ + i)] > hi_[ju(n_ + i)]) {
      // activity range and row range are disjoint: keep an empty box so
      // the solve reports infeasibility
      hi_[ju(n_ + i)] = lo_[ju(n_ + i)] - 1.0;
    }
  }

  void slack_basis() {
    st_.assign(ju(N_), Basis::at_lower);
    for (int j = 0; j < n_; ++j) st_[ju(j)] = c_[ju(j)] >= 0.0 ? Basis::at_lower : Basis::at_upper;
    for (int i = 0; i < m_; ++i) st_[ju(n_ + i)] = Basis::basic;
    rebuild_head();
    dse_.assign(ju(m_), 1.0);
    factor_ok_ = false;
  }

  void rebuild_head() {
    head_.assign(ju(m_), -1);
    pos_.assign(ju(N_), -1);
    int p = 0;
    for (int j = 0; j < N_; ++j) {
      if (st_[ju(j)] == Basis::basic) {
        head_[ju(p)] = j;
        pos_[ju(j)] = p;
        ++p;
      }
    }
  }

  bool factorize() {
    const auto& P = *P_;
    std::vector<int> start(ju(m_) + 1, 0), rows;
    std::vector<double> vals;
    rows.reserve(ju(m_) * 3);
    vals.reserve(ju(m_) * 3);
    for (int p = 0; p < m_; ++p) {
      const int j = head_[ju(p)];
      if (j < n_) {
        for (int k = P.col_start[ju(j)]; k < P.col_start[ju(j) + 1]; ++k) {
          rows.push_back(P.row_index[ju(k)]);
          vals.push_back(P.col_value[ju(k)]);
        }
      } else {
        rows.push_back(j - n_);
        vals.push_back(-1.0);
      }
      start[ju(p) + 1] = static_cast<int>(rows.size());
    }
    etas_.clear();
    factor_ok_ = lu_.factor(m_, start, rows, vals);
    return factor_ok_;
  }

  /// Fresh factor, primal and dual values; falls back to the slack basis if
  /// the current basis is singular.
  bool refresh() {
    if (!factorize()) {
      slack_basis();
      if (!factorize()) return false;
    }
    compute_duals();
    repair_duals();
    compute_primal();
    return true;
  }

  void ftran(std::vector<double>& v) const {
    if (m_ == 0) return;
    lu_.solve(v);
    for (const auto& e : etas_) {
      const double vp = v[e.p] / e.pivot;
      v[e.p] = vp;
      if (vp == 0.0) continue;
      for (std::size_t t = 0; t < e.idx.size(); ++t) v[e.idx[t]] -= e.val[t] * vp;
    }
  }

  void btran(std::vector<double>& z) const {
    if (m_ == 0) return;
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double s = z[it->p];
      for (std::size_t t = 0; t < it->idx.size(); ++t) s -= it->val[t] * z[it->idx[t]];
      z[it->p] = s / it->pivot;
    }
    lu_.tsolve(z);
  }

  double nonbasic_value(int j) const { return st_[ju(j)] == Basis::at_upper ? hi_[ju(j)] : lo_[ju(j)]; }

  void compute_primal() {
    const auto& P = *P_;
    std::vector<double> r(ju(m_), 0.0);
    for (int j = 0; j < N_; ++j) {
      if (st_[ju(j)] == Basis::basic) continue;
      const double v = nonbasic_value(j);
      x_[ju(j)] = v;
      if (v == 0.0) continue;
      if (j < n_) {
        for (int k = P.col_start[ju(j)]; k < P.col_start[ju(j) + 1]; ++k) r[P.row_index[ju(k)]] -= P.col_value[ju(k)] * v;
      } else {
        r[j - n_] += v;
      }
    }
    ftran(r);
    for (int p = 0; p < m_; ++p) x_[ju(head_[ju(p)])] = r[p];
  }

  /// y = B^-T c_B and d = c - A'y for every variable (basic ones ~0).
  void compute_duals() {
    const auto& P = *P_;
    std::vector<double> y(ju(m_));
    for (int p = 0; p < m_; ++p) y[p] = c_[ju(head_[ju(p)])];
    btran(y);
    for (int j = 0; j < n_; ++j) {
      double s = c_[ju(j)];
      for (int k = P.col_start[ju(j)]; k < P.col_start[ju(j) + 1]; ++k) s -= y[P.row_index[ju(k)]] * P.col_value[ju(k)];
      d_[ju(j)] = s;
    }
    for (int i = 0; i < m_; ++i) d_[ju(n_ + i)] = y[i];
    for (int p = 0; p < m_; ++p) d_[ju(head_[ju(p)])] = 0.0;
  }

  /// Moves dual infeasible nonbasic variables to the opposite bound.
  bool repair_duals() {
    bool flipped = false;
    for (int j = 0; j < N_; ++j) {
      const auto s = st_[ju(j)];
      if (s == Basis::basic) continue;
      const double dj = d_[ju(j)];
      if (s == Basis::at_lower && dj < -opt_.dual_tol && hi_[ju(j)] > lo_[ju(j)]) {
        st_[ju(j)] = Basis::at_upper;
        flipped = true;
      } else if (s == Basis::at_upper && dj > opt_.dual_tol) {
        st_[ju(j)] = Basis::at_lower;
        flipped = true;
      }
    }
    return flipped;
  }

  double infeasibility(int j) const {
    const double x = x_[ju(j)];
    if (x < lo_[ju(j)] - opt_.primal_tol) return lo_[ju(j)] - x;
    if (x > hi_[ju(j)] + opt_.primal_tol) return x - hi_[ju(j)];
    return 0.0;
  }

  int choose_row() const {
    int best = -1;
    double score = 0.0;
    for (int p = 0; p < m_; ++p) {
      const double inf = infeasibility(head_[ju(p)]);
      if (inf <= 0.0) continue;
      const double s = inf * inf / dse_[ju(p)];
      if (s > score) {
        score = s;
        best = p;
      }
    }
    return best;
  }

  /// One dual simplex iteration on leaving row p.
  /// Returns 0 on success, 1 if the LP is proven infeasible, 2 on numerical trouble.
  int pivot(int p) {
    const auto& P = *P_;
    const int leave = head_[ju(p)];
    const double xp = x_[ju(leave)];
    const bool to_lower = xp < lo_[ju(leave)];
    const double bound = to_lower ? lo_[ju(leave)] : hi_[ju(leave)];
    const double delta = xp - bound;

    std::vector<double> rho(ju(m_), 0.0);
    rho[p] = 1.0;
    btran(rho);

    // row p of B^-1 [A | -I]
    touched_.clear();
    for (int i = 0; i < m_; ++i) {
      const double r = rho[i];
      if (std::abs(r) < 1e-13) continue;
      for (int k = P.row_start[ju(i)]; k < P.row_start[ju(i) + 1]; ++k) {
        const int j = P.col_index[ju(k)];
        if (!mark_[ju(j)]) {
          mark_[ju(j)] = 1;
          touched_.push_back(j);
        }
        alpha_[ju(j)] += r * P.row_value[ju(k)];
      }
      const int s = n_ + i;
      mark_[ju(s)] = 1;
      touched_.push_back(s);
      alpha_[ju(s)] = -r;
    }

    // Harris two-pass ratio test
    double theta_max = std::numeric_limits<double>::infinity();
    for (int j : touched_) {
      if (st_[ju(j)] == Basis::basic || hi_[ju(j)] <= lo_[ju(j)]) continue;
      const double a = to_lower ? -alpha_[ju(j)] : alpha_[ju(j)];
      if (st_[ju(j)] == Basis::at_lower && a > opt_.pivot_tol) {
        theta_max = std::min(theta_max, (d_[ju(j)] + opt_.dual_tol) / a);
      } else if (st_[ju(j)] == Basis::at_upper && a < -opt_.pivot_tol) {
        theta_max = std::min(theta_max, (d_[ju(j)] - opt_.dual_tol) / a);
      }
    }
    int q = -1;
    double best_a = 0.0;
    if (std::isfinite(theta_max)) {
      for (int j : touched_) {
        if (st_[ju(j)] == Basis::basic || hi_[ju(j)] <= lo_[ju(j)]) continue;
        const double a = to_lower ? -alpha_[ju(j)] : alpha_[ju(j)];
        const bool cand = (st_[ju(j)] == Basis::at_lower && a > opt_.pivot_tol) ||
                          (st_[ju(j)] == Basis::at_upper && a < -opt_.pivot_tol);
        if (!cand) continue;
        if (d_[ju(j)] / a <= theta_max && std::abs(a) > best_a) {
          best_a = std::abs(a);
          q = j;
        }
      }
    }

    if (q < 0) {
      const bool proven = row_infeasible(leave, to_lower);
      clear_alpha();
      return proven ? 1 : 2;
    }

    const double alpha_q = alpha_[ju(q)];
    std::vector<double> col(ju(m_), 0.0);
    if (q < n_) {
      for (int k = P.col_start[ju(q)]; k < P.col_start[ju(q) + 1]; ++k) col[P.row_index[ju(k)]] = P.col_value[ju(k)];
    } else {
      col[q - n_] = -1.0;
    }
    ftran(col);
    if (std::abs(col[p] - alpha_q) > 1e-7 * (1.0 + std::abs(alpha_q)) || std::abs(col[p]) < opt_.pivot_tol) {
      clear_alpha();
      return 2;
    }

    // dual step; the entering reduced cost is clipped to its feasible sign
    double dq = d_[ju(q)];
    if ((st_[ju(q)] == Basis::at_lower && dq < 0.0) || (st_[ju(q)] == Basis::at_upper && dq > 0.0)) dq = 0.0;
    const double theta_d = dq / alpha_q;
    for (int j : touched_) {
      if (st_[ju(j)] != Basis::basic) d_[ju(j)] -= theta_d * alpha_[ju(j)];
    }
    d_[ju(q)] = 0.0;
    d_[ju(leave)] = -theta_d;

    // steepest-edge reference (exact) or a Devex-style approximation
    std::vector<double> tau;
    double wp;
    if (opt_.steepest_edge) {
      tau = rho;
      ftran(tau);
      wp = std::max(std::inner_product(rho.begin(), rho.end(), rho.begin(), 0.0), 1e-12);
    } else {
      wp = dse_[ju(p)];
    }
    const double piv = col[p];

    // primal step
    const double theta_p = delta / piv;
    for (int i = 0; i < m_; ++i) {
      if (col[i] != 0.0) x_[ju(head_[ju(i)])] -= theta_p * col[i];
    }
    x_[ju(q)] += theta_p;
    x_[ju(leave)] = bound;

    for (int i = 0; i < m_; ++i) {
      if (i == p || col[i] == 0.0) continue;
      const double ratio = col[i] / piv;
      if (opt_.steepest_edge) {
        dse_[ju(i)] = std::max(dse_[ju(i)] - 2.0 * ratio * tau[i] + ratio * ratio * wp, 1e-4);
      } else {
        dse_[ju(i)] = std::max(dse_[ju(i)], ratio * ratio * wp);
      }
    }
    dse_[ju(p)] = std::max(wp / (piv * piv), 1e-4);

    Eta eta{p, piv, {}, {}};
    for (int i = 0; i < m_; ++i) {
      if (i != p && std::abs(col[i]) > 1e-14) {
        eta.idx.push_back(i);
        eta.val.push_back(col[i]);
      }
    }
    etas_.push_back(std::move(eta));

    head_[ju(p)] = q;
    pos_[ju(q)] = p;
    pos_[ju(leave)] = -1;
    st_[ju(q)] = Basis::basic;
    st_[ju(leave)] = to_lower ? Basis::at_lower : Basis::at_upper;
    ++iterations_;
    clear_alpha();
    return 0;
  }

  /// Certifies that row p of B^-1 [A | -I] cannot reach the violated bound
  /// for any point in the variable boxes.
  bool row_infeasible(int leave, bool to_lower) const {
    // x_leave = -sum_{j nonbasic} alpha_j x_j ; maximise (to_lower) or minimise it
    double extreme = 0.0;
    for (int j : touched_) {
      if (st_[ju(j)] == Basis::basic) continue;
      const double a = -alpha_[ju(j)];
      if (to_lower) {
        extreme += a > 0 ? a * hi_[ju(j)] : a * lo_[ju(j)];
      } else {
        extreme += a > 0 ? a * lo_[ju(j)] : a * hi_[ju(j)];
      }
    }
    const double scale = 1.0 + std::abs(extreme);
    return to_lower ? extreme < lo_[ju(leave)] - 1e-7 * scale : extreme > hi_[ju(leave)] + 1e-7 * scale;
  }

  void clear_alpha() {
    for (int j : touched_) {
      alpha_[ju(j)] = 0.0;
      mark_[ju(j)] = 0;
    }
    touched_.clear();
  }

  /// Objective and a Lagrangian bound that holds for any multipliers.
  void finish() {
    double obj = 0.0;
    for (int j = 0; j < n_; ++j) obj += c_[ju(j)] * x_[ju(j)];
    objective_ = obj;
    const auto& P = *P_;
    std::vector<double> y(ju(m_));
    for (int p = 0; p < m_; ++p) y[p] = c_[ju(head_[ju(p)])];
    btran(y);
    double lb = 0.0;
    for (int j = 0; j < n_; ++j) {
      double s = c_[ju(j)];
      for (int k = P.col_start[ju(j)]; k < P.col_start[ju(j) + 1]; ++k) s -= y[P.row_index[ju(k)]] * P.col_value[ju(k)];
      lb += s >= 0 ? s * lo_[ju(j)] : s * hi_[ju(j)];
    }
    for (int i = 0; i < m_; ++i) {
      const double s = y[i];
      const auto j = ju(n_ + i);
      if (hi_[j] < lo_[j]) {
        lb = std::numeric_limits<double>::infinity();
        break;
      }
      lb += s >= 0 ? s * lo_[j] : s * hi_[j];
    }
    bound_ = lb;
  }

  SimplexOptions opt_;
  std::shared_ptr<Problem> P_;
  int n_ = 0, m_ = 0, N_ = 0;
  std::vector<double> lo_, hi_, c_, x_, d_, alpha_, dse_;
  std::vector<std::uint8_t> st_;
  std::vector<char> mark_;
  std::vector<int> head_, pos_, touched_;
  KluFactor lu_;
  std::vector<Eta> etas_;
  bool factor_ok_ = false;
  bool primal_dirty_ = true;
  double objective_ = 0.0;
  double bound_ = -std::numeric_limits<double>::infinity();
  long long iterations_ = 0;
};

}  // namespace delin::lp
