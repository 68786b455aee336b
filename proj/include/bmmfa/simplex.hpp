#pragma once

// Self-contained dense two-phase primal simplex with Bland's anti-cycling
// pivot rule. Problems in this library are tiny (tens of variables), so the
// solver favors auditability over speed: duals are recomputed from the
// original data and every accepted solution carries a duality certificate.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "bmmfa/errors.hpp"

namespace bmmfa {

enum class LpStatus { optimal, infeasible, unbounded };

inline std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
  }
  return "?";
}

// Standard-form container: maximize objective . x subject to
//   le_rows . x <= le_rhs,  eq_rows . x == eq_rhs,  x >= 0,
// and optional per-variable upper bounds (converted to rows by the solver).
struct LpProblem {
  int num_vars = 0;
  std::vector<double> objective;
  std::vector<std::vector<double>> le_rows;
  std::vector<double> le_rhs;
  std::vector<std::vector<double>> eq_rows;
  std::vector<double> eq_rhs;
  std::vector<double> upper_bounds;  // empty, or one per var (infinity = none)

  void add_le(std::vector<double> row, double rhs) {
    check_row(row);
    le_rows.push_back(std::move(row));
    le_rhs.push_back(rhs);
  }
  void add_eq(std::vector<double> row, double rhs) {
    check_row(row);
    eq_rows.push_back(std::move(row));
    eq_rhs.push_back(rhs);
  }

 private:
  void check_row(const std::vector<double>& row) const {
    if (static_cast<int>(row.size()) != num_vars) throw input_error("LP row has wrong length");
    for (double v : row)
      if (!std::isfinite(v)) throw input_error("LP coefficient is not finite");
  }
};

// Raw solver output in the original variable space.
struct LpRawSolution {
  LpStatus status = LpStatus::infeasible;
  double objective = 0.0;
  std::vector<double> x;      // primal values, one per original variable
  std::vector<double> duals;  // one per row: le_rows first, then eq_rows, then bound rows
  double duality_gap = std::numeric_limits<double>::infinity();
  double primal_residual = std::numeric_limits<double>::infinity();
  double dual_residual = std::numeric_limits<double>::infinity();
};

namespace detail_lp {

constexpr double kPivotTol = 1e-9;

struct Tableau {
  int rows = 0;
  int cols = 0;  // structural + slack + artificial columns
  std::vector<double> a;  // rows x (cols+1); last column is the rhs
  std::vector<double> cost;  // cols+1; last entry is the negated objective value
  std::vector<int> basis;

  double& at(int r, int c) { return a[static_cast<size_t>(r) * (cols + 1) + c]; }
  [[nodiscard]] double at(int r, int c) const {
    return a[static_cast<size_t>(r) * (cols + 1) + c];
  }

  void pivot(int pr, int pc) {
    const double p = at(pr, pc);
    const double inv = 1.0 / p;
    for (int c = 0; c <= cols; ++c) at(pr, c) *= inv;
    at(pr, pc) = 1.0;
    for (int r = 0; r < rows; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (int c = 0; c <= cols; ++c) at(r, c) -= f * at(pr, c);
      at(r, pc) = 0.0;
    }
    const double f = cost[pc];
    if (f != 0.0) {
      for (int c = 0; c <= cols; ++c) cost[c] -= f * at(pr, c);
      cost[pc] = 0.0;
    }
    basis[pr] = pc;
  }

  // Bland: entering = lowest-index improving column, leaving = min ratio with
  // lowest basis index on ties. Returns optimal=true, or false on unbounded.
  bool run(int allowed_cols) {
    for (;;) {
      int enter = -1;
      for (int c = 0; c < allowed_cols; ++c) {
        if (cost[c] > kPivotTol) {
          enter = c;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int r = 0; r < rows; ++r) {
        const double arc = at(r, enter);
        if (arc > kPivotTol) {
          const double ratio = at(r, cols) / arc;
          if (ratio < best_ratio - kPivotTol ||
              (ratio < best_ratio + kPivotTol && (leave < 0 || basis[r] < basis[leave]))) {
            best_ratio = ratio;
            leave = r;
          }
        }
      }
      if (leave < 0) return false;  // unbounded direction
      pivot(leave, enter);
    }
  }
};

// Solve B^T y = c_B by Gaussian elimination with partial pivoting.
inline std::vector<double> solve_transposed(std::vector<std::vector<double>> bt,
                                            std::vector<double> rhs) {
  const int k = static_cast<int>(rhs.size());
  for (int col = 0; col < k; ++col) {
    int piv = col;
    for (int r = col + 1; r < k; ++r)
      if (std::abs(bt[r][col]) > std::abs(bt[piv][col])) piv = r;
    std::swap(bt[piv], bt[col]);
    std::swap(rhs[piv], rhs[col]);
    const double d = bt[col][col];
    if (std::abs(d) < 1e-12) continue;  // degenerate basis direction; dual component stays 0
    for (int r = col + 1; r < k; ++r) {
      const double f = bt[r][col] / d;
      if (f == 0.0) continue;
      for (int c = col; c < k; ++c) bt[r][c] -= f * bt[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<double> y(static_cast<size_t>(k), 0.0);
  for (int r = k - 1; r >= 0; --r) {
    double acc = rhs[r];
    for (int c = r + 1; c < k; ++c) acc -= bt[r][c] * y[c];
    y[r] = std::abs(bt[r][r]) < 1e-12 ? 0.0 : acc / bt[r][r];
  }
  return y;
}

}  // namespace detail_lp

inline LpRawSolution solve_lp(const LpProblem& prob) {
  using namespace detail_lp;
  const int nv = prob.num_vars;
  if (static_cast<int>(prob.objective.size()) != nv) throw input_error("objective length mismatch");

  // Assemble equality rows over [structural | slacks], rhs >= 0.
  int num_slacks = static_cast<int>(prob.le_rows.size());
  std::vector<std::pair<int, double>> bound_rows;  // (var, ub) as extra <= rows
  if (!prob.upper_bounds.empty()) {
    if (static_cast<int>(prob.upper_bounds.size()) != nv)
      throw input_error("upper_bounds length mismatch");
    for (int j = 0; j < nv; ++j)
      if (std::isfinite(prob.upper_bounds[j])) bound_rows.emplace_back(j, prob.upper_bounds[j]);
  }
  num_slacks += static_cast<int>(bound_rows.size());

  const int num_rows =
      static_cast<int>(prob.le_rows.size() + prob.eq_rows.size() + bound_rows.size());
  const int struct_cols = nv + num_slacks;

  std::vector<std::vector<double>> A(static_cast<size_t>(num_rows),
                                     std::vector<double>(static_cast<size_t>(struct_cols), 0.0));
  std::vector<double> b(static_cast<size_t>(num_rows), 0.0);
  std::vector<double> c(static_cast<size_t>(struct_cols), 0.0);
  for (int j = 0; j < nv; ++j) c[j] = prob.objective[j];

  int r = 0, slack = nv;
  for (size_t k = 0; k < prob.le_rows.size(); ++k, ++r) {
    for (int j = 0; j < nv; ++j) A[r][j] = prob.le_rows[k][j];
    A[r][slack++] = 1.0;
    b[r] = prob.le_rhs[k];
  }
  for (const auto& [var, ub] : bound_rows) {
    A[r][var] = 1.0;
    A[r][slack++] = 1.0;
    b[r] = ub;
    ++r;
  }
  for (size_t k = 0; k < prob.eq_rows.size(); ++k, ++r) {
    for (int j = 0; j < nv; ++j) A[r][j] = prob.eq_rows[k][j];
    b[r] = prob.eq_rhs[k];
  }
  std::vector<bool> row_flipped(static_cast<size_t>(num_rows), false);
  for (int i = 0; i < num_rows; ++i)
    if (b[i] < 0.0) {
      for (auto& v : A[i]) v = -v;
      b[i] = -b[i];
      row_flipped[i] = true;
    }

  // Phase 1: artificials on every row, maximize -(sum of artificials).
  Tableau t;
  t.rows = num_rows;
  t.cols = struct_cols + num_rows;
  t.a.assign(static_cast<size_t>(t.rows) * (t.cols + 1), 0.0);
  t.cost.assign(static_cast<size_t>(t.cols) + 1, 0.0);
  t.basis.resize(static_cast<size_t>(num_rows));
  for (int i = 0; i < num_rows; ++i) {
    for (int j = 0; j < struct_cols; ++j) t.at(i, j) = A[i][j];
    t.at(i, struct_cols + i) = 1.0;
    t.at(i, t.cols) = b[i];
    t.basis[i] = struct_cols + i;
  }
  // Reduced costs for max -(sum art) with the artificial basis.
  for (int j = 0; j < struct_cols; ++j) {
    double s = 0.0;
    for (int i = 0; i < num_rows; ++i) s += t.at(i, j);
    t.cost[j] = s;
  }
  {
    double s = 0.0;
    for (int i = 0; i < num_rows; ++i) s += b[i];
    t.cost[t.cols] = s;  // -objective = +sum b
  }
  t.run(t.cols);

  LpRawSolution sol;
  if (t.cost[t.cols] > 1e-7) {  // phase-1 optimum below zero
    sol.status = LpStatus::infeasible;
    return sol;
  }

  // Drive artificials out of the basis; rows that cannot pivot are redundant.
  std::vector<bool> drop_row(static_cast<size_t>(num_rows), false);
  for (int i = 0; i < num_rows; ++i) {
    if (t.basis[i] < struct_cols) continue;
    int pc = -1;
    for (int j = 0; j < struct_cols; ++j)
      if (std::abs(t.at(i, j)) > kPivotTol) {
        pc = j;
        break;
      }
    if (pc >= 0)
      t.pivot(i, pc);
    else
      drop_row[i] = true;
  }
  if (std::count(drop_row.begin(), drop_row.end(), true) > 0) {
    Tableau t2;
    t2.rows = num_rows - static_cast<int>(std::count(drop_row.begin(), drop_row.end(), true));
    t2.cols = t.cols;
    t2.a.assign(static_cast<size_t>(t2.rows) * (t2.cols + 1), 0.0);
    t2.cost = t.cost;
    int rr = 0;
    for (int i = 0; i < num_rows; ++i) {
      if (drop_row[i]) continue;
      for (int cidx = 0; cidx <= t.cols; ++cidx) t2.at(rr, cidx) = t.at(i, cidx);
      t2.basis.push_back(t.basis[i]);
      ++rr;
    }
    t = std::move(t2);
  }

  // Phase 2: true objective, artificial columns barred from entering.
  std::fill(t.cost.begin(), t.cost.end(), 0.0);
  for (int j = 0; j < struct_cols; ++j) t.cost[j] = c[j];
  for (int i = 0; i < t.rows; ++i) {
    const double cb = t.basis[i] < struct_cols ? c[t.basis[i]] : 0.0;
    if (cb == 0.0) continue;
    for (int j = 0; j <= t.cols; ++j) t.cost[j] -= cb * t.at(i, j);
  }
  if (!t.run(struct_cols)) {
    sol.status = LpStatus::unbounded;
    return sol;
  }

  // Primal values.
  std::vector<double> z(static_cast<size_t>(struct_cols), 0.0);
  for (int i = 0; i < t.rows; ++i)
    if (t.basis[i] < struct_cols) z[t.basis[i]] = t.at(i, t.cols);
  sol.x.assign(z.begin(), z.begin() + nv);
  sol.objective = 0.0;
  for (int j = 0; j < nv; ++j) sol.objective += prob.objective[j] * sol.x[j];

  // Duals from the original basis columns: solve B^T y = c_B. Dropped
  // (redundant) rows keep a zero multiplier.
  std::vector<int> live_rows;
  for (int i = 0; i < num_rows; ++i)
    if (!drop_row[i]) live_rows.push_back(i);
  const int k = static_cast<int>(live_rows.size());
  std::vector<std::vector<double>> bt(static_cast<size_t>(k),
                                      std::vector<double>(static_cast<size_t>(k), 0.0));
  std::vector<double> cb(static_cast<size_t>(k), 0.0);
  for (int i = 0; i < k; ++i) {
    const int col = t.basis[i];
    cb[i] = col < struct_cols ? c[col] : 0.0;
    for (int rr = 0; rr < k; ++rr)
      bt[i][rr] = col < struct_cols ? A[live_rows[rr]][col] : (live_rows[rr] == col - struct_cols ? 1.0 : 0.0);
  }
  const auto y_live = detail_lp::solve_transposed(std::move(bt), std::move(cb));
  std::vector<double> y(static_cast<size_t>(num_rows), 0.0);
  for (int i = 0; i < k; ++i) y[live_rows[i]] = y_live[i];

  // Certificate: primal residuals, dual feasibility, duality gap, all against
  // the untouched standard-form data.
  double primal_res = 0.0;
  for (int j = 0; j < struct_cols; ++j) primal_res = std::max(primal_res, -z[j]);
  for (int i = 0; i < num_rows; ++i) {
    double ax = 0.0;
    for (int j = 0; j < struct_cols; ++j) ax += A[i][j] * z[j];
    primal_res = std::max(primal_res, std::abs(ax - b[i]));
  }
  double dual_res = 0.0;
  for (int j = 0; j < struct_cols; ++j) {
    double aty = 0.0;
    for (int i = 0; i < num_rows; ++i) aty += A[i][j] * y[i];
    dual_res = std::max(dual_res, c[j] - aty);
  }
  double by = 0.0;
  for (int i = 0; i < num_rows; ++i) by += b[i] * y[i];
  double cz = 0.0;
  for (int j = 0; j < struct_cols; ++j) cz += c[j] * z[j];

  // Undo the sign flips applied to negative-rhs rows so reported duals match
  // the caller's row orientation.
  sol.duals = y;
  for (int i = 0; i < num_rows; ++i)
    if (row_flipped[i]) sol.duals[i] = -sol.duals[i];

  sol.primal_residual = primal_res;
  sol.dual_residual = dual_res;
  sol.duality_gap = std::abs(cz - by);
  sol.status = LpStatus::optimal;
  return sol;
}

}  // namespace bmmfa
