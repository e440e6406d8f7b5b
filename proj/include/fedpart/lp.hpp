#pragma once

// Small dense linear programs in maximization form:
//
//   maximize c'x  subject to  a_k'x >= b_k  or  a_k'x = b_k,   x >= 0.
//
// Solved with a two-phase tableau simplex using Bland's rule (lowest-index
// entering column, lowest-index leaving basic variable on ratio ties), so the
// returned vertex is a deterministic function of the input.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "fedpart/error.hpp"

namespace fedpart {

enum class Sense { GreaterEqual, Equal };

struct Constraint {
  std::vector<double> coeffs;
  Sense sense = Sense::GreaterEqual;
  double rhs = 0.0;
};

struct LinearProgram {
  std::size_t num_vars = 0;
  std::vector<double> objective;
  std::vector<Constraint> constraints;

  void validate() const {
    if (objective.size() != num_vars)
      throw UsageError("objective has " + std::to_string(objective.size()) + " entries, expected " +
                       std::to_string(num_vars));
    if (constraints.empty()) throw UsageError("linear program needs at least one constraint");
    for (double c : objective)
      if (!std::isfinite(c)) throw UsageError("objective contains NaN or Inf");
    for (std::size_t k = 0; k < constraints.size(); ++k) {
      const auto& row = constraints[k];
      if (row.coeffs.size() != num_vars)
        throw UsageError("constraint " + std::to_string(k) + " has " + std::to_string(row.coeffs.size()) +
                         " coefficients, expected " + std::to_string(num_vars));
      if (!std::isfinite(row.rhs)) throw UsageError("constraint " + std::to_string(k) + " has non-finite rhs");
      for (double a : row.coeffs)
        if (!std::isfinite(a)) throw UsageError("constraint " + std::to_string(k) + " contains NaN or Inf");
    }
  }
};

struct Tolerances {
  double feas = 1e-8;   ///< primal feasibility residual
  double cs = 1e-8;     ///< complementary slackness residual
  double gap = 1e-7;    ///< |primal - dual| objective gap
  double pivot = 1e-9;  ///< smallest usable pivot / reduced cost
  std::size_t iteration_cap = 0;  ///< 0 selects 50 * (vars + constraints)
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "?";
}

struct Certificates {
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double cs_residual = 0.0;
  double gap = 0.0;
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
  double objective_value = 0.0;
  /// Shadow prices d(optimum)/d(rhs_k). Nonpositive for >= rows, free for = rows.
  std::vector<double> dual;
  Certificates certificates;
  std::size_t iterations = 0;
  /// A nonbasic column has zero reduced cost at the optimum, so other optimal
  /// vertices may exist.
  bool alternative_optima = false;
};

struct FeasibilityReport {
  /// Violation of each constraint (0 when satisfied).
  std::vector<double> residuals;
  double max_violation = 0.0;
  bool feasible = true;
  /// Human-readable name of the worst violated row or bound, empty if feasible.
  std::string worst;
};

inline FeasibilityReport check_feasible(const LinearProgram& lp, const std::vector<double>& x, double tol = 1e-8) {
  if (x.size() != lp.num_vars)
    throw UsageError("point has " + std::to_string(x.size()) + " entries, expected " + std::to_string(lp.num_vars));
  FeasibilityReport report;
  report.residuals.resize(lp.constraints.size(), 0.0);
  for (std::size_t k = 0; k < lp.constraints.size(); ++k) {
    const auto& row = lp.constraints[k];
    double lhs = 0.0;
    for (std::size_t j = 0; j < lp.num_vars; ++j) lhs += row.coeffs[j] * x[j];
    const double v = row.sense == Sense::Equal ? std::abs(lhs - row.rhs) : std::max(0.0, row.rhs - lhs);
    report.residuals[k] = v;
    if (v > report.max_violation) {
      report.max_violation = v;
      report.worst = "constraint " + std::to_string(k);
    }
  }
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    const double v = std::max(0.0, -x[j]);
    if (v > report.max_violation) {
      report.max_violation = v;
      report.worst = "bound x[" + std::to_string(j) + "] >= 0";
    }
  }
  report.feasible = report.max_violation <= tol;
  if (report.feasible) report.worst.clear();
  return report;
}

namespace detail {

/// Solves M y = rhs for a small dense square M (row-major) with partial pivoting.
inline std::vector<double> dense_solve(std::vector<double> m, std::vector<double> rhs, std::size_t dim) {
  for (std::size_t col = 0; col < dim; ++col) {
    std::size_t best = col;
    for (std::size_t r = col + 1; r < dim; ++r)
      if (std::abs(m[r * dim + col]) > std::abs(m[best * dim + col])) best = r;
    if (std::abs(m[best * dim + col]) < 1e-14) throw NumericalError("singular basis while recovering duals");
    if (best != col) {
      for (std::size_t c = 0; c < dim; ++c) std::swap(m[col * dim + c], m[best * dim + c]);
      std::swap(rhs[col], rhs[best]);
    }
    const double piv = m[col * dim + col];
    for (std::size_t r = col + 1; r < dim; ++r) {
      const double f = m[r * dim + col] / piv;
      if (f == 0.0) continue;
      for (std::size_t c = col; c < dim; ++c) m[r * dim + c] -= f * m[col * dim + c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<double> y(dim, 0.0);
  for (std::size_t r = dim; r-- > 0;) {
    double acc = rhs[r];
    for (std::size_t c = r + 1; c < dim; ++c) acc -= m[r * dim + c] * y[c];
    y[r] = acc / m[r * dim + r];
  }
  return y;
}

class DenseSimplex {
 public:
  DenseSimplex(const LinearProgram& lp, const Tolerances& tol) : lp_(lp), tol_(tol) {}

  LpSolution run() {
    build();
    LpSolution sol;
    const std::size_t cap =
        tol_.iteration_cap ? tol_.iteration_cap : 50 * (lp_.num_vars + lp_.constraints.size());

    if (num_art_ > 0) {
      std::vector<double> phase1(cols_, 0.0);
      for (std::size_t j = art_begin_; j < cols_; ++j) phase1[j] = -1.0;
      price(phase1);
      const auto status = iterate(cap, /*allow_artificial=*/true);
      if (status == LpStatus::Unbounded) throw InternalError("phase 1 reported unbounded");
      if (objective_ < -tol_.feas) {
        sol.status = LpStatus::Infeasible;
        sol.iterations = iterations_;
        return sol;
      }
      drive_out_artificials();
    }

    std::vector<double> phase2(cols_, 0.0);
    std::copy(lp_.objective.begin(), lp_.objective.end(), phase2.begin());
    price(phase2);
    sol.status = iterate(cap, /*allow_artificial=*/false);
    sol.iterations = iterations_;
    if (sol.status == LpStatus::Unbounded) return sol;

    sol.x.assign(lp_.num_vars, 0.0);
    for (std::size_t r = 0; r < rows_; ++r)
      if (basis_[r] < lp_.num_vars) sol.x[basis_[r]] = rhs_[r];
    sol.objective_value = 0.0;
    for (std::size_t j = 0; j < lp_.num_vars; ++j) sol.objective_value += lp_.objective[j] * sol.x[j];

    std::vector<bool> basic(cols_, false);
    for (auto b : basis_) basic[b] = true;
    for (std::size_t j = 0; j < art_begin_; ++j)
      if (!basic[j] && std::abs(reduced_[j]) <= tol_.pivot) {
        sol.alternative_optima = true;
        break;
      }

    sol.dual = recover_duals(phase2);
    return sol;
  }

 private:
  // Standard form: every row becomes an equality with rhs >= 0. A >= row with
  // rhs <= 0 is negated into a <= row and gets a basic slack; otherwise the
  // row gets a surplus (for >=) and an artificial.
  void build() {
    const std::size_t n = lp_.num_vars;
    rows_ = lp_.constraints.size();
    sign_.assign(rows_, 1.0);
    std::vector<bool> needs_art(rows_, false);
    std::size_t num_slack = 0;
    for (std::size_t k = 0; k < rows_; ++k) {
      const auto& c = lp_.constraints[k];
      if (c.sense == Sense::GreaterEqual) {
        ++num_slack;
        if (c.rhs <= 0.0) {
          sign_[k] = -1.0;
        } else {
          needs_art[k] = true;
        }
      } else {
        if (c.rhs < 0.0) sign_[k] = -1.0;
        needs_art[k] = true;
      }
    }
    num_art_ = static_cast<std::size_t>(std::count(needs_art.begin(), needs_art.end(), true));
    slack_begin_ = n;
    art_begin_ = n + num_slack;
    cols_ = art_begin_ + num_art_;

    tab_.assign(rows_ * cols_, 0.0);
    rhs_.assign(rows_, 0.0);
    basis_.assign(rows_, 0);
    slack_of_row_.assign(rows_, cols_);
    std::size_t slack = slack_begin_;
    std::size_t art = art_begin_;
    for (std::size_t k = 0; k < rows_; ++k) {
      const auto& c = lp_.constraints[k];
      double* row = &tab_[k * cols_];
      for (std::size_t j = 0; j < n; ++j) row[j] = sign_[k] * c.coeffs[j];
      rhs_[k] = sign_[k] * c.rhs;
      if (rhs_[k] == 0.0) rhs_[k] = 0.0;  // drop -0
      if (c.sense == Sense::GreaterEqual) {
        // a'x - s = b, multiplied by sign.
        row[slack] = -sign_[k];
        slack_of_row_[k] = slack;
        if (!needs_art[k]) basis_[k] = slack;
        ++slack;
      }
      if (needs_art[k]) {
        row[art] = 1.0;
        basis_[k] = art;
        ++art;
      }
    }
  }

  void price(const std::vector<double>& cost) {
    reduced_ = cost;
    objective_ = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      const double cb = cost[basis_[r]];
      if (cb == 0.0) continue;
      const double* row = &tab_[r * cols_];
      for (std::size_t j = 0; j < cols_; ++j) reduced_[j] -= cb * row[j];
      objective_ += cb * rhs_[r];
    }
  }

  LpStatus iterate(std::size_t cap, bool allow_artificial) {
    const std::size_t limit = allow_artificial ? cols_ : art_begin_;
    while (true) {
      std::size_t enter = cols_;
      for (std::size_t j = 0; j < limit; ++j)
        if (reduced_[j] > tol_.pivot) {
          enter = j;
          break;
        }
      if (enter == cols_) return LpStatus::Optimal;

      std::size_t leave = rows_;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < rows_; ++r) {
        const double a = tab_[r * cols_ + enter];
        if (a <= tol_.pivot) continue;
        const double ratio = rhs_[r] / a;
        if (leave == rows_ || ratio < best - 1e-12 ||
            (std::abs(ratio - best) <= 1e-12 && basis_[r] < basis_[leave])) {
          best = std::min(best, ratio);
          leave = r;
        }
      }
      if (leave == rows_) return LpStatus::Unbounded;
      if (++iterations_ > cap)
        throw NumericalError("simplex exceeded iteration cap of " + std::to_string(cap));
      pivot(leave, enter);
    }
  }

  void pivot(std::size_t r, std::size_t q) {
    double* prow = &tab_[r * cols_];
    const double inv = 1.0 / prow[q];
    for (std::size_t j = 0; j < cols_; ++j) prow[j] *= inv;
    prow[q] = 1.0;
    rhs_[r] *= inv;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == r) continue;
      double* row = &tab_[i * cols_];
      const double f = row[q];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < cols_; ++j) row[j] -= f * prow[j];
      row[q] = 0.0;
      rhs_[i] -= f * rhs_[r];
      if (rhs_[i] < 0.0 && rhs_[i] > -tol_.feas) rhs_[i] = 0.0;
    }
    const double d = reduced_[q];
    if (d != 0.0) {
      for (std::size_t j = 0; j < cols_; ++j) reduced_[j] -= d * prow[j];
      reduced_[q] = 0.0;
      objective_ += d * rhs_[r];
    }
    basis_[r] = q;
  }

  // Artificials left basic at level zero are pivoted onto any structural or
  // slack column with a usable entry; rows with none are redundant and keep
  // their artificial, which can no longer move.
  void drive_out_artificials() {
    for (std::size_t r = 0; r < rows_; ++r) {
      if (basis_[r] < art_begin_) continue;
      const double* row = &tab_[r * cols_];
      for (std::size_t j = 0; j < art_begin_; ++j)
        if (std::abs(row[j]) > tol_.pivot) {
          pivot(r, j);
          break;
        }
    }
  }

  // Solves B'y = c_B against the standardized columns, then maps back to the
  // caller's row orientation.
  std::vector<double> recover_duals(const std::vector<double>& cost) const {
    std::vector<double> bt(rows_ * rows_, 0.0);
    std::vector<double> cb(rows_, 0.0);
    std::size_t art = art_begin_;
    std::vector<std::size_t> art_row(cols_ - art_begin_, 0);
    for (std::size_t k = 0; k < rows_; ++k)
      if (tab_has_art(k)) art_row[art++ - art_begin_] = k;

    for (std::size_t r = 0; r < rows_; ++r) {
      const std::size_t col = basis_[r];
      cb[r] = cost[col];
      // Row r of B' is basis column `col` of the standardized matrix.
      if (col < lp_.num_vars) {
        for (std::size_t k = 0; k < rows_; ++k) bt[r * rows_ + k] = sign_[k] * lp_.constraints[k].coeffs[col];
      } else if (col < art_begin_) {
        for (std::size_t k = 0; k < rows_; ++k)
          if (slack_of_row_[k] == col) bt[r * rows_ + k] = -sign_[k];
      } else {
        bt[r * rows_ + art_row[col - art_begin_]] = 1.0;
      }
    }
    auto y = dense_solve(std::move(bt), std::move(cb), rows_);
    for (std::size_t k = 0; k < rows_; ++k) y[k] *= sign_[k];
    return y;
  }

  bool tab_has_art(std::size_t k) const {
    const auto& c = lp_.constraints[k];
    return c.sense == Sense::Equal || c.rhs > 0.0;
  }

  const LinearProgram& lp_;
  Tolerances tol_;
  std::size_t rows_ = 0, cols_ = 0, slack_begin_ = 0, art_begin_ = 0, num_art_ = 0;
  std::vector<double> tab_, rhs_, reduced_, sign_;
  std::vector<std::size_t> basis_, slack_of_row_;
  double objective_ = 0.0;
  std::size_t iterations_ = 0;
};

inline Certificates certify(const LinearProgram& lp, const LpSolution& sol) {
  Certificates cert;
  cert.primal_residual = check_feasible(lp, sol.x, std::numeric_limits<double>::infinity()).max_violation;
  double dual_obj = 0.0;
  std::vector<double> aty(lp.num_vars, 0.0);
  for (std::size_t k = 0; k < lp.constraints.size(); ++k) {
    const auto& row = lp.constraints[k];
    const double y = sol.dual[k];
    dual_obj += y * row.rhs;
    if (row.sense == Sense::GreaterEqual) cert.dual_residual = std::max(cert.dual_residual, y);
    double lhs = 0.0;
    for (std::size_t j = 0; j < lp.num_vars; ++j) {
      lhs += row.coeffs[j] * sol.x[j];
      aty[j] += row.coeffs[j] * y;
    }
    cert.cs_residual = std::max(cert.cs_residual, std::abs(y * (lhs - row.rhs)));
  }
  // Dual feasibility for a maximization with shadow prices y: c_j - (A'y)_j <= 0.
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    const double rc = lp.objective[j] - aty[j];
    cert.dual_residual = std::max(cert.dual_residual, rc);
    cert.cs_residual = std::max(cert.cs_residual, std::abs(sol.x[j] * rc));
  }
  cert.gap = std::abs(sol.objective_value - dual_obj);
  return cert;
}

}  // namespace detail

/// Solves `lp`. An Optimal result carries a dual certificate that has been
/// checked against `tol`; a certificate outside tolerance raises NumericalError.
inline LpSolution solve(const LinearProgram& lp, const Tolerances& tol = {}) {
  lp.validate();
  detail::DenseSimplex simplex(lp, tol);
  LpSolution sol = simplex.run();
  if (sol.status != LpStatus::Optimal) return sol;

  sol.certificates = detail::certify(lp, sol);
  const auto& c = sol.certificates;
  if (c.primal_residual > tol.feas || c.dual_residual > tol.feas || c.cs_residual > tol.cs || c.gap > tol.gap) {
    std::ostringstream msg;
    msg << std::setprecision(3) << "optimality certificate out of tolerance (primal " << c.primal_residual
        << ", dual " << c.dual_residual << ", cs " << c.cs_residual << ", gap " << c.gap << ")";
    throw NumericalError(msg.str());
  }
  return sol;
}

}  // namespace fedpart
