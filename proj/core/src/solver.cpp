#include "flexport/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace flexport {
namespace {

using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Vec = Eigen::VectorXd;

// How an original column is represented in the standard form x >= 0.
enum class ColMap : std::uint8_t { fixed, empty, lower, boxed, upper, free };

double pow2_near(double v) {
  if (!(v > 0.0) || !std::isfinite(v)) return 1.0;
  return std::exp2(std::round(std::log2(v)));
}

double inf_norm(const Vec& v) { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; }

// Standard form  min c'x  s.t.  A x = b, x >= 0  of the presolved problem,
// with row/column scaling and scalar normalization of b and c applied.
struct StandardForm {
  SpMat a;
  Vec b;
  Vec c;
  std::vector<ColMap> map;       // per original column
  std::vector<int> std_col;      // per original column, first standard column
  std::vector<double> value;     // fixed/empty value, or offset bound
  std::vector<int> std_row;      // per original row, -1 if removed
  std::vector<double> lower;     // column bounds after singleton rows
  std::vector<double> upper;
  std::vector<int> lower_row;    // singleton row that set the bound, or -1
  std::vector<int> upper_row;
  std::vector<double> singleton_coef;  // per original row, 0 unless singleton
  std::vector<int> singleton_col;      // per original row, -1 unless singleton
  std::vector<int> singleton_order;    // rows in elimination order
  Vec row_scale;
  Vec col_scale;
  double b_norm = 1.0;
  double c_norm = 1.0;
  // Standard columns that are exact negatives of each other (split free
  // variables, charge/discharge without losses).
  std::vector<std::pair<int, int>> mirrored;
};

struct PresolveOutcome {
  SolveStatus status = SolveStatus::optimal;
  std::vector<double> ray;  // certificate when presolve decides the problem
};

PresolveOutcome build_standard_form(const LpProblem& lp, StandardForm& sf) {
  const std::size_t n = lp.num_cols();
  const std::size_t m = lp.num_rows();
  PresolveOutcome out;

  sf.map.assign(n, ColMap::lower);
  sf.std_col.assign(n, -1);
  sf.value.assign(n, 0.0);
  sf.std_row.assign(m, -1);
  sf.lower = lp.col_lower;
  sf.upper = lp.col_upper;
  sf.lower_row.assign(n, -1);
  sf.upper_row.assign(n, -1);
  sf.singleton_coef.assign(m, 0.0);
  sf.singleton_col.assign(m, -1);
  sf.singleton_order.clear();
  std::vector<double>& lo = sf.lower;
  std::vector<double>& up = sf.upper;

  // Rows with a single free entry become column bounds, repeated while
  // fixing columns exposes new singletons.
  std::vector<char> removed(m, 0);
  for (int pass = 0; pass < 16; ++pass) {
    std::vector<int> count(m, 0);
    std::vector<int> last_col(m, -1);
    std::vector<double> last_val(m, 0.0);
    std::vector<double> fixed_act(m, 0.0);
    for (const auto& e : lp.entries) {
      if (e.value == 0.0 || removed[e.row]) continue;
      if (lo[e.col] == up[e.col]) {
        fixed_act[e.row] += e.value * lo[e.col];
      } else {
        ++count[e.row];
        last_col[e.row] = static_cast<int>(e.col);
        last_val[e.row] += e.value;
      }
    }
    bool changed = false;
    for (std::size_t i = 0; i < m; ++i) {
      if (removed[i] || count[i] != 1) continue;
      const int j = last_col[i];
      const double a = last_val[i];
      if (a == 0.0) continue;
      const double bound = (lp.rhs[i] - fixed_act[i]) / a;
      const RowSense sense = lp.row_sense[i];
      const bool sets_upper = sense == RowSense::equal || (sense == RowSense::less_equal) == (a > 0.0);
      const bool sets_lower = sense == RowSense::equal || (sense == RowSense::greater_equal) == (a > 0.0);
      if (sets_upper && bound < up[j]) {
        up[j] = bound;
        sf.upper_row[j] = static_cast<int>(i);
      }
      if (sets_lower && bound > lo[j]) {
        lo[j] = bound;
        sf.lower_row[j] = static_cast<int>(i);
      }
      sf.singleton_coef[i] = a;
      sf.singleton_col[i] = j;
      sf.singleton_order.push_back(static_cast<int>(i));
      removed[i] = 1;
      changed = true;
      if (lo[j] > up[j]) {
        if (lo[j] - up[j] > 1e-9 * (1.0 + std::abs(lo[j]))) {
          out.status = SolveStatus::infeasible;
          out.ray.assign(m, 0.0);
          // The two bounding rows combine into a contradiction.
          auto put = [&](int r, double sign) {
            if (r >= 0) out.ray[r] += sign / sf.singleton_coef[r];
          };
          put(sf.lower_row[j], 1.0);
          put(sf.upper_row[j], -1.0);
          return out;
        }
        up[j] = lo[j];
      }
    }
    if (!changed) break;
  }

  std::vector<int> col_nnz(n, 0);
  for (const auto& e : lp.entries)
    if (e.value != 0.0 && !removed[e.row]) ++col_nnz[e.col];

  for (std::size_t j = 0; j < n; ++j) {
    const double l = lo[j];
    const double u = up[j];
    if (l == u) {
      sf.map[j] = ColMap::fixed;
      sf.value[j] = l;
    } else if (col_nnz[j] == 0) {
      sf.map[j] = ColMap::empty;
      const double c = lp.cost[j];
      if ((c > 0.0 && !std::isfinite(l)) || (c < 0.0 && !std::isfinite(u))) {
        out.status = SolveStatus::unbounded;
        out.ray.assign(n, 0.0);
        out.ray[j] = c > 0.0 ? -1.0 : 1.0;
        return out;
      }
      sf.value[j] = c > 0.0 ? l : (c < 0.0 ? u : std::clamp(0.0, l, u));
    } else if (std::isfinite(l) && std::isfinite(u)) {
      sf.map[j] = ColMap::boxed;
      sf.value[j] = l;
    } else if (std::isfinite(l)) {
      sf.map[j] = ColMap::lower;
      sf.value[j] = l;
    } else if (std::isfinite(u)) {
      sf.map[j] = ColMap::upper;
      sf.value[j] = u;
    } else {
      sf.map[j] = ColMap::free;
    }
  }

  // Rows left without any non-fixed entry are checked and dropped.
  std::vector<int> row_nnz(m, 0);
  std::vector<double> fixed_activity(m, 0.0);
  for (const auto& e : lp.entries) {
    if (e.value == 0.0 || removed[e.row]) continue;
    if (sf.map[e.col] == ColMap::fixed)
      fixed_activity[e.row] += e.value * sf.value[e.col];
    else
      ++row_nnz[e.row];
  }
  int m_std = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (removed[i]) continue;
    if (row_nnz[i] > 0) {
      sf.std_row[i] = m_std++;
      continue;
    }
    const double lhs = fixed_activity[i];
    const double b = lp.rhs[i];
    const double slack_tol = 1e-9 * (1.0 + std::abs(b));
    bool ok = true;
    double sign = 0.0;
    switch (lp.row_sense[i]) {
      case RowSense::equal:
        ok = std::abs(lhs - b) <= slack_tol;
        sign = lhs < b ? 1.0 : -1.0;
        break;
      case RowSense::less_equal:
        ok = lhs <= b + slack_tol;
        sign = -1.0;
        break;
      case RowSense::greater_equal:
        ok = lhs >= b - slack_tol;
        sign = 1.0;
        break;
    }
    if (!ok) {
      out.status = SolveStatus::infeasible;
      out.ray.assign(m, 0.0);
      out.ray[i] = sign;
      return out;
    }
  }

  // Structural standard columns.
  int n_std = 0;
  int n_boxed = 0;
  for (std::size_t j = 0; j < n; ++j) {
    switch (sf.map[j]) {
      case ColMap::fixed:
      case ColMap::empty:
        break;
      case ColMap::free:
        sf.std_col[j] = n_std;
        n_std += 2;
        break;
      case ColMap::boxed:
        ++n_boxed;
        [[fallthrough]];
      default:
        sf.std_col[j] = n_std++;
        break;
    }
  }
  int n_slack = 0;
  std::vector<int> slack_col(m, -1);
  for (std::size_t i = 0; i < m; ++i)
    if (sf.std_row[i] >= 0 && lp.row_sense[i] != RowSense::equal)
      slack_col[i] = n_std + n_slack++;
  const int n_total = n_std + n_slack + n_boxed;
  const int m_total = m_std + n_boxed;

  Vec b = Vec::Zero(m_total);
  Vec c = Vec::Zero(n_total);
  std::vector<Eigen::Triplet<double, int>> trips;
  trips.reserve(lp.entries.size() + n_slack + 2 * n_boxed);

  for (std::size_t i = 0; i < m; ++i)
    if (sf.std_row[i] >= 0) b[sf.std_row[i]] = lp.rhs[i] - fixed_activity[i];

  for (const auto& e : lp.entries) {
    if (e.value == 0.0) continue;
    const int r = sf.std_row[e.row];
    const ColMap cm = sf.map[e.col];
    if (r < 0 || cm == ColMap::fixed || cm == ColMap::empty) continue;
    const int k = sf.std_col[e.col];
    switch (cm) {
      case ColMap::lower:
      case ColMap::boxed:
        trips.emplace_back(r, k, e.value);
        b[r] -= e.value * sf.value[e.col];
        break;
      case ColMap::upper:
        trips.emplace_back(r, k, -e.value);
        b[r] -= e.value * sf.value[e.col];
        break;
      case ColMap::free:
        trips.emplace_back(r, k, e.value);
        trips.emplace_back(r, k + 1, -e.value);
        break;
      default:
        break;
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (slack_col[i] < 0) continue;
    const double s = lp.row_sense[i] == RowSense::less_equal ? 1.0 : -1.0;
    trips.emplace_back(sf.std_row[i], slack_col[i], s);
  }
  int next_box = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const int k = sf.std_col[j];
    switch (sf.map[j]) {
      case ColMap::lower:
        c[k] = lp.cost[j];
        break;
      case ColMap::upper:
        c[k] = -lp.cost[j];
        break;
      case ColMap::free:
        c[k] = lp.cost[j];
        c[k + 1] = -lp.cost[j];
        break;
      case ColMap::boxed: {
        c[k] = lp.cost[j];
        const int r = m_std + next_box;
        const int w = n_std + n_slack + next_box;
        trips.emplace_back(r, k, 1.0);
        trips.emplace_back(r, w, 1.0);
        b[r] = up[j] - lo[j];
        ++next_box;
        break;
      }
      default:
        break;
    }
  }

  // Geometric row/column scaling with power-of-two factors.
  std::vector<Eigen::Triplet<double, int>> scaled = trips;
  Vec rs = Vec::Ones(m_total);
  Vec cs = Vec::Ones(n_total);
  for (int pass = 0; pass < 8; ++pass) {
    Vec rmax = Vec::Zero(m_total), rmin = Vec::Constant(m_total, kInf);
    for (const auto& t : scaled) {
      const double v = std::abs(t.value());
      rmax[t.row()] = std::max(rmax[t.row()], v);
      rmin[t.row()] = std::min(rmin[t.row()], v);
    }
    Vec rf = Vec::Ones(m_total);
    for (int i = 0; i < m_total; ++i)
      if (rmax[i] > 0.0) rf[i] = pow2_near(1.0 / std::sqrt(rmax[i] * rmin[i]));
    Vec cmax = Vec::Zero(n_total), cmin = Vec::Constant(n_total, kInf);
    for (const auto& t : scaled) {
      const double v = std::abs(t.value()) * rf[t.row()];
      cmax[t.col()] = std::max(cmax[t.col()], v);
      cmin[t.col()] = std::min(cmin[t.col()], v);
    }
    Vec cf = Vec::Ones(n_total);
    for (int j = 0; j < n_total; ++j)
      if (cmax[j] > 0.0) cf[j] = pow2_near(1.0 / std::sqrt(cmax[j] * cmin[j]));
    for (auto& t : scaled)
      t = Eigen::Triplet<double, int>(t.row(), t.col(),
                                      t.value() * rf[t.row()] * cf[t.col()]);
    rs = rs.cwiseProduct(rf);
    cs = cs.cwiseProduct(cf);
  }

  sf.a.resize(m_total, n_total);
  sf.a.setFromTriplets(scaled.begin(), scaled.end());
  sf.a.makeCompressed();
  sf.row_scale = rs;
  sf.col_scale = cs;
  Vec bs = rs.cwiseProduct(b);
  Vec csv = cs.cwiseProduct(c);
  // A few huge bounds should not push the ordinary rows below roundoff,
  // so b is normalized by a typical entry rather than the largest.
  std::vector<double> mags;
  for (Eigen::Index i = 0; i < bs.size(); ++i)
    if (bs[i] != 0.0) mags.push_back(std::abs(bs[i]));
  double typical = 1.0;
  if (!mags.empty()) {
    auto mid = mags.begin() + static_cast<std::ptrdiff_t>(mags.size() / 2);
    std::nth_element(mags.begin(), mid, mags.end());
    typical = *mid;
  }
  sf.b_norm = pow2_near(std::max(1.0, typical));
  sf.c_norm = pow2_near(std::max(1.0, inf_norm(csv)));
  sf.b = bs / sf.b_norm;
  sf.c = csv / sf.c_norm;

  std::map<std::vector<std::pair<int, double>>, int> seen;
  std::vector<std::pair<int, double>> pattern, negated;
  for (int j = 0; j < sf.a.cols(); ++j) {
    pattern.clear();
    negated.clear();
    for (SpMat::InnerIterator it(sf.a, j); it; ++it) {
      pattern.emplace_back(static_cast<int>(it.row()), it.value());
      negated.emplace_back(static_cast<int>(it.row()), -it.value());
    }
    if (pattern.empty()) continue;
    auto hit = seen.find(negated);
    if (hit != seen.end() && sf.c[hit->second] == -sf.c[j]) {
      sf.mirrored.emplace_back(hit->second, j);
      seen.erase(hit);
    } else {
      seen.emplace(pattern, j);
    }
  }
  return out;
}

// Quasi-definite augmented system [-(Z/X + dp)  A'; A  dd] with iterative
// refinement against the unregularized matrix.
class AugmentedSystem {
 public:
  AugmentedSystem(const SpMat& a, double reg) : a_(a), n_(a.cols()), m_(a.rows()), reg_(reg) {
    std::vector<Eigen::Triplet<double, int>> trips;
    trips.reserve(static_cast<std::size_t>(a.nonZeros()) + n_ + m_);
    for (int k = 0; k < n_ + m_; ++k) trips.emplace_back(k, k, 1.0);
    for (int j = 0; j < n_; ++j)
      for (SpMat::InnerIterator it(a, j); it; ++it)
        trips.emplace_back(n_ + it.row(), j, it.value());
    k_.resize(n_ + m_, n_ + m_);
    k_.setFromTriplets(trips.begin(), trips.end());
    k_.makeCompressed();
    diag_pos_.resize(n_ + m_);
    for (int k = 0; k < n_ + m_; ++k) diag_pos_[k] = k_.outerIndexPtr()[k];
    ldlt_.analyzePattern(k_);
  }

  bool factor(const Vec& x, const Vec& z) {
    theta_inv_ = z.cwiseQuotient(x);
    double* values = k_.valuePtr();
    // stronger regularization on a zero pivot; refinement uses the exact matrix
    for (double reg = reg_; reg <= 1e-6; reg *= 100.0) {
      for (int j = 0; j < n_; ++j) values[diag_pos_[j]] = -(theta_inv_[j] + reg);
      for (int i = 0; i < m_; ++i) values[diag_pos_[n_ + i]] = reg;
      ldlt_.factorize(k_);
      if (ldlt_.info() == Eigen::Success) return true;
    }
    return false;
  }

  Vec solve(const Vec& rhs) const {
    // Primal and dual blocks are judged separately; the barrier block can
    // be many orders larger and would hide the A dx error otherwise.
    const double sh = 1.0 + inf_norm(rhs.head(n_));
    const double st = 1.0 + inf_norm(rhs.tail(m_));
    auto err = [&](const Vec& r) {
      return std::max(inf_norm(r.head(n_)) / sh, inf_norm(r.tail(m_)) / st);
    };
    Vec sol = ldlt_.solve(rhs);
    Vec r = rhs - apply(sol);
    double rn = err(r);
    for (int it = 0; it < 8 && rn > 1e-15; ++it) {
      Vec cand = sol + ldlt_.solve(r);
      Vec cr = rhs - apply(cand);
      const double cn = err(cr);
      if (!(cn < rn)) break;
      sol = std::move(cand);
      r = std::move(cr);
      rn = cn;
    }
    return sol;
  }

 private:
  Vec apply(const Vec& v) const {
    Vec out(n_ + m_);
    out.head(n_) = -theta_inv_.cwiseProduct(v.head(n_)) + a_.transpose() * v.tail(m_);
    out.tail(m_) = a_ * v.head(n_);
    return out;
  }

  const SpMat& a_;
  int n_;
  int m_;
  double reg_;
  SpMat k_;
  std::vector<int> diag_pos_;
  Vec theta_inv_;
  Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
};

struct Direction {
  Vec x, y, z;
  double tau = 0.0;
  double kappa = 0.0;
};

double max_step(const Vec& v, const Vec& dv, double bound) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (dv[i] < 0.0) bound = std::min(bound, -v[i] / dv[i]);
  return bound;
}

class Finisher {
 public:
  Finisher(const LpProblem& lp, const StandardForm& sf, const Tolerances& tol)
      : lp_(lp), sf_(sf), tol_(tol), row_entries_(lp.num_rows()) {
    for (const auto& e : lp.entries)
      if (sf.singleton_col[e.row] >= 0 && e.value != 0.0) row_entries_[e.row].emplace_back(e.col, e.value);
  }

  // Maps a scaled standard-form primal/dual point back to the problem.
  LpSolution map_back(const Vec& xs, const Vec& ys) const {
    const std::size_t n = lp_.num_cols();
    const std::size_t m = lp_.num_rows();
    LpSolution sol;
    sol.primal.assign(n, 0.0);
    sol.dual.assign(m, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const int k = sf_.std_col[j];
      auto un = [&](int idx) { return sf_.b_norm * sf_.col_scale[idx] * xs[idx]; };
      double v = 0.0;
      switch (sf_.map[j]) {
        case ColMap::fixed:
        case ColMap::empty:
          v = sf_.value[j];
          break;
        case ColMap::lower:
        case ColMap::boxed:
          v = sf_.value[j] + un(k);
          break;
        case ColMap::upper:
          v = sf_.value[j] - un(k);
          break;
        case ColMap::free:
          v = un(k) - un(k + 1);
          break;
      }
      sol.primal[j] = std::clamp(v, sf_.lower[j], sf_.upper[j]);
    }
    for (std::size_t i = 0; i < m; ++i) {
      const int r = sf_.std_row[i];
      if (r >= 0) sol.dual[i] = sf_.c_norm * sf_.row_scale[r] * ys[r];
    }
    sol.reduced_cost = lp_.cost;
    for (const auto& e : lp_.entries) sol.reduced_cost[e.col] -= e.value * sol.dual[e.row];
    // Singleton rows take over the reduced cost of the bound they set. A row
    // eliminated later may sit in the column of an earlier one, so rows are
    // visited in reverse and their duals pushed into the other columns.
    for (auto it = sf_.singleton_order.rbegin(); it != sf_.singleton_order.rend(); ++it) {
      const int r = *it;
      const int j = sf_.singleton_col[r];
      const double d = sol.reduced_cost[j];
      if (!((d > 0.0 && sf_.lower_row[j] == r) || (d < 0.0 && sf_.upper_row[j] == r))) continue;
      const double y = d / sf_.singleton_coef[r];
      sol.dual[r] = y;
      for (const auto& [col, v] : row_entries_[r]) sol.reduced_cost[col] -= v * y;
      sol.reduced_cost[j] = 0.0;
    }
    double obj = 0.0;
    for (std::size_t j = 0; j < n; ++j) obj += lp_.cost[j] * sol.primal[j];
    sol.objective = obj;
    sol.quality = measure_quality(lp_, sol.primal, sol.dual);
    return sol;
  }

  // Worst contract measure as a multiple of its tolerance.
  [[nodiscard]] double score(const SolutionQuality& q) const {
    return std::max({q.relative_residual / tol_.feasibility, q.bound_violation / tol_.feasibility,
                     q.relative_gap / tol_.optimality, q.complementarity / tol_.feasibility});
  }

  [[nodiscard]] bool meets_contract(const SolutionQuality& q, double margin) const {
    return q.relative_residual <= margin * tol_.feasibility &&
           q.bound_violation <= margin * tol_.feasibility &&
           q.relative_gap <= margin * tol_.optimality &&
           q.complementarity <= margin * tol_.feasibility;
  }

 private:
  const LpProblem& lp_;
  const StandardForm& sf_;
  const Tolerances& tol_;
  std::vector<std::vector<std::pair<std::size_t, double>>> row_entries_;  // singleton rows only
};

LpSolution solve_trivial(const LpProblem& lp, const StandardForm& sf, const Tolerances& tol) {
  Finisher fin(lp, sf, tol);
  LpSolution sol = fin.map_back(Vec::Zero(0), Vec::Zero(0));
  sol.status = SolveStatus::optimal;
  return sol;
}

}  // namespace

LpSolution solve(const LpProblem& problem, const Tolerances& tol) {
  problem.check();
  if (!(tol.feasibility > 0.0) || !(tol.optimality > 0.0) || tol.max_iterations <= 0)
    throw std::invalid_argument("tolerances must be positive");

  StandardForm sf;
  const PresolveOutcome pre = build_standard_form(problem, sf);
  if (pre.status != SolveStatus::optimal) {
    LpSolution sol;
    sol.status = pre.status;
    sol.ray = pre.ray;
    return sol;
  }
  if (sf.a.cols() == 0) return solve_trivial(problem, sf, tol);

  const SpMat& a = sf.a;
  const Vec& b = sf.b;
  const Vec& c = sf.c;
  const int n = static_cast<int>(a.cols());
  const int m = static_cast<int>(a.rows());
  const double b_inf = inf_norm(b);
  const double c_inf = inf_norm(c);

  constexpr double kLoose = 1e-8;
  constexpr double kInfeasTol = 1e-9;
  constexpr double kStep = 0.99;

  Vec x = Vec::Ones(n);
  Vec z = Vec::Ones(n);
  Vec y = Vec::Zero(m);
  double tau = 1.0;
  double kappa = 1.0;

  AugmentedSystem kkt(a, 1e-10);
  Finisher fin(problem, sf, tol);

  auto polish_and_map = [&](const Vec& xh, const Vec& yh, const Vec& zh) {
    // Dual correction with the current barrier weights.
    Vec rhs = Vec::Zero(n + m);
    rhs.head(n) = c - a.transpose() * yh - zh;
    const Vec dy = kkt.solve(rhs).tail(m);
    const Vec ycand = yh + dy;
    // Mirrored pairs only matter through their difference.
    Vec xs = xh;
    for (const auto& [j, k] : sf.mirrored) {
      const double shift = std::min(xs[j], xs[k]);
      xs[j] -= shift;
      xs[k] -= shift;
    }
    // Primal projection weighted by x^2, so small entries barely move.
    auto project = [&](const Vec& start) {
      Vec xp = start;
      const double floor = 1e-9 * std::max(1.0, inf_norm(start));
      double res = inf_norm(b - a * xp);
      if (!kkt.factor(start.cwiseMax(floor).cwiseAbs2(), Vec::Ones(n))) return xp;
      for (int pass = 0; pass < 4; ++pass) {
        rhs.head(n).setZero();
        rhs.tail(m) = b - a * xp;
        const Vec cand = (xp + kkt.solve(rhs).head(n)).cwiseMax(0.0);
        const double cand_res = inf_norm(b - a * cand);
        if (!(cand_res < res)) break;
        xp = cand;
        res = cand_res;
      }
      return xp;
    };
    const Vec xp = project(xs);
    // Columns whose slack dominates are sent to their bound.
    Vec xa = xs;
    for (int j = 0; j < n; ++j)
      if (xs[j] < zh[j]) xa[j] = 0.0;
    const Vec xq = project(xa);
    LpSolution best = fin.map_back(xs, yh);
    auto score = [&](const LpSolution& s) { return fin.score(s.quality); };
    for (LpSolution cand : {fin.map_back(xp, yh), fin.map_back(xp, ycand), fin.map_back(xs, ycand),
                            fin.map_back(xq, yh), fin.map_back(xq, ycand)})
      if (score(cand) < score(best)) best = std::move(cand);
    return best;
  };

  // A point inside the contract is kept while a few more iterations try
  // to tighten it.
  constexpr double kTight = 1e-3;
  constexpr int kExtra = 3;
  std::optional<LpSolution> accepted;
  int accepted_at = 0;

  int stalls = 0;
  bool factored = false;
  LpSolution result;
  result.status = SolveStatus::iteration_limit;
  int iter = 0;
  for (; iter < tol.max_iterations; ++iter) {
    const Vec rp = b * tau - a * x;
    const Vec rd = c * tau - a.transpose() * y - z;
    const double cx = c.dot(x);
    const double by = b.dot(y);
    const double rg = kappa + cx - by;
    const double mu = (x.dot(z) + tau * kappa) / (n + 1);

    const double pinf = inf_norm(rp) / tau / (1.0 + b_inf);
    const double dinf = inf_norm(rd) / tau / (1.0 + c_inf);
    const double gap = std::abs(cx - by) / tau / (1.0 + std::abs(cx / tau));

    // The scaled measures only decide when the unscaled contract is worth
    // checking; acceptance is always judged on the original problem.
    if (pinf <= kLoose && dinf <= kLoose && gap <= kLoose) {
      LpSolution cand = factored ? polish_and_map(x / tau, y / tau, z / tau)
                                 : fin.map_back(x / tau, y / tau);
      if (fin.meets_contract(cand.quality, 1.0)) {
        cand.status = SolveStatus::optimal;
        cand.iterations = iter;
        if (fin.meets_contract(cand.quality, kTight)) return cand;
        if (!accepted) accepted_at = iter;
        if (!accepted || fin.score(cand.quality) < fin.score(accepted->quality)) accepted = std::move(cand);
      }
    }
    if (accepted && iter - accepted_at >= kExtra) return *accepted;

    // Certificates of infeasibility from the homogeneous embedding.
    if (tau <= kappa) {
      if (by > 0.0 && inf_norm(c * tau - rd) <= kInfeasTol * by) {
        result.status = SolveStatus::infeasible;
        break;
      }
      if (cx < 0.0 && inf_norm(b * tau - rp) <= kInfeasTol * (-cx)) {
        result.status = SolveStatus::unbounded;
        break;
      }
    }

    if (!kkt.factor(x, z)) {
      result.status = SolveStatus::numerical_error;
      break;
    }
    factored = true;
    Vec rhs(n + m);
    rhs.head(n) = c;
    rhs.tail(m) = b;
    const Vec vp = kkt.solve(rhs);
    const Vec v = vp.head(n);
    const Vec p = vp.tail(m);
    const double denom = -c.dot(v) + b.dot(p) + kappa / tau;

    auto direction = [&](const Vec& r_xz, double r_tk, double eta) {
      Direction d;
      Vec r(n + m);
      r.head(n) = eta * rd - r_xz.cwiseQuotient(x);
      r.tail(m) = eta * rp;
      const Vec uq = kkt.solve(r);
      const Vec u = uq.head(n);
      const Vec q = uq.tail(m);
      d.tau = (eta * rg + c.dot(u) - b.dot(q) + r_tk / tau) / denom;
      d.x = u + d.tau * v;
      d.y = q + d.tau * p;
      d.z = (r_xz - z.cwiseProduct(d.x)).cwiseQuotient(x);
      d.kappa = (r_tk - kappa * d.tau) / tau;
      return d;
    };
    auto step_of = [&](const Direction& d) {
      double s = max_step(x, d.x, 1e30);
      s = max_step(z, d.z, s);
      if (d.tau < 0.0) s = std::min(s, -tau / d.tau);
      if (d.kappa < 0.0) s = std::min(s, -kappa / d.kappa);
      return s;
    };

    const Vec xz = x.cwiseProduct(z);
    const Direction aff = direction(-xz, -tau * kappa, 1.0);
    const double a_aff = std::min(1.0, step_of(aff));
    const double mu_aff =
        ((x + a_aff * aff.x).dot(z + a_aff * aff.z) +
         (tau + a_aff * aff.tau) * (kappa + a_aff * aff.kappa)) /
        (n + 1);
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

    const Vec r_xz = -xz - aff.x.cwiseProduct(aff.z) + Vec::Constant(n, sigma * mu);
    const double r_tk = -tau * kappa - aff.tau * aff.kappa + sigma * mu;
    const Direction d = direction(r_xz, r_tk, 1.0 - sigma);
    const double alpha = std::min(1.0, kStep * step_of(d));
    if (!std::isfinite(alpha)) {
      result.status = SolveStatus::numerical_error;
      break;
    }
    stalls = alpha < 1e-6 ? stalls + 1 : 0;
    if (stalls > 5) {
      result.status = SolveStatus::numerical_error;
      break;
    }

    x += alpha * d.x;
    y += alpha * d.y;
    z += alpha * d.z;
    tau += alpha * d.tau;
    kappa += alpha * d.kappa;
  }
  result.iterations = iter;
  if (accepted) return *accepted;

  if (result.status == SolveStatus::infeasible) {
    result.ray.assign(problem.num_rows(), 0.0);
    for (std::size_t i = 0; i < problem.num_rows(); ++i) {
      const int r = sf.std_row[i];
      if (r >= 0) result.ray[i] = sf.row_scale[r] * y[r];
    }
    double norm = 0.0;
    for (double v : result.ray) norm = std::max(norm, std::abs(v));
    if (norm > 0.0)
      for (double& v : result.ray) v /= norm;
  } else if (result.status == SolveStatus::unbounded) {
    result.ray.assign(problem.num_cols(), 0.0);
    for (std::size_t j = 0; j < problem.num_cols(); ++j) {
      const int k = sf.std_col[j];
      const double s = k >= 0 ? sf.col_scale[k] : 0.0;
      switch (sf.map[j]) {
        case ColMap::lower:
        case ColMap::boxed:
          result.ray[j] = s * x[k];
          break;
        case ColMap::upper:
          result.ray[j] = -s * x[k];
          break;
        case ColMap::free:
          result.ray[j] = s * x[k] - sf.col_scale[k + 1] * x[k + 1];
          break;
        default:
          break;
      }
    }
    double norm = 0.0;
    for (double v : result.ray) norm = std::max(norm, std::abs(v));
    if (norm > 0.0)
      for (double& v : result.ray) v /= norm;
  }
  return result;
}

TaggedDuals extract_duals(const LpSolution& solution, const std::vector<RowTag>& row_tags) {
  if (solution.status != SolveStatus::optimal)
    throw std::invalid_argument("duals requested from a non-optimal solution");
  if (solution.dual.size() != row_tags.size())
    throw std::invalid_argument("row tags do not match the solution");
  TaggedDuals out;
  auto put = [](std::vector<std::vector<double>>& grid, const RowTag& tag, double v) {
    if (grid.size() <= tag.component) grid.resize(tag.component + 1);
    auto& series = grid[tag.component];
    if (series.size() <= tag.period) series.resize(tag.period + 1, 0.0);
    series[tag.period] = v;
  };
  for (std::size_t i = 0; i < row_tags.size(); ++i) {
    const RowTag& tag = row_tags[i];
    const double v = solution.dual[i];
    switch (tag.kind) {
      case RowKind::balance:
        put(out.balance, tag, v);
        break;
      case RowKind::buffer:
        put(out.buffer, tag, v);
        break;
      case RowKind::matching:
        if (tag.period < 12) {
          out.matching[tag.period] = v;
          out.has_matching[tag.period] = true;
        }
        break;
      case RowKind::emission:
        out.emission = v;
        break;
      default:
        break;
    }
  }
  return out;
}

}  // namespace flexport
