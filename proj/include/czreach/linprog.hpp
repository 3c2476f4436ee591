#ifndef CZREACH_LINPROG_HPP
#define CZREACH_LINPROG_HPP

#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "czreach/errors.hpp"
#include "czreach/interval.hpp"

namespace czreach {

enum class LpStatus { Optimal, Infeasible, Unbounded };

/// min objective*x  s.t.  equality_lhs*x = equality_rhs,  lower <= x <= upper.
/// Bound entries may be +-infinity.
struct LinearProgram {
    Eigen::VectorXd objective;
    Eigen::MatrixXd equality_lhs;
    Eigen::VectorXd equality_rhs;
    Eigen::VectorXd lower_bounds;
    Eigen::VectorXd upper_bounds;
};

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    double value = 0.0;
    Eigen::VectorXd point;          // primal optimum, present iff Optimal
    Eigen::VectorXd dual;           // equality-row multipliers, present iff Optimal
    Eigen::VectorXd reduced_costs;  // objective - dual*lhs, present iff Optimal

    static LpSolution status_only(LpStatus s) {
        LpSolution out;
        out.status = s;
        return out;
    }
};

/// Feasibility tolerance, overridable through CZREACH_LP_TOL.
inline double lp_tolerance() {
    static const double tol = [] {
        if (const char* env = std::getenv("CZREACH_LP_TOL")) {
            const double v = std::atof(env);
            if (v > 0.0 && std::isfinite(v)) return v;
        }
        return 1e-8;
    }();
    return tol;
}

namespace detail {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Dense bounded-variable revised simplex with an explicitly maintained basis
/// inverse. Phase 1 minimizes the sum of artificial variables; phase 2 fixes
/// the artificials at zero. Dantzig pricing with a Bland fallback after a run
/// of degenerate pivots, so termination is guaranteed and deterministic.
class SimplexSolver {
  public:
    SimplexSolver(const Eigen::MatrixXd& eq_lhs, const Eigen::VectorXd& eq_rhs,
                  const Eigen::VectorXd& lo, const Eigen::VectorXd& hi)
        : m_(static_cast<int>(eq_lhs.rows())), n_(static_cast<int>(eq_lhs.cols())) {
        const double tol = lp_tolerance();
        // Row scaling to unit inf-norm keeps the feasibility tolerance relative.
        row_scale_ = Eigen::VectorXd::Ones(m_);
        A_.resize(m_, n_ + m_);
        rhs_.resize(m_);
        for (int i = 0; i < m_; ++i) {
            double s = eq_lhs.row(i).template lpNorm<Eigen::Infinity>();
            if (s > 0.0 && std::isfinite(s)) row_scale_(i) = s;
            A_.row(i).head(n_) = eq_lhs.row(i) / row_scale_(i);
            rhs_(i) = eq_rhs(i) / row_scale_(i);
        }
        A_.rightCols(m_).setZero();

        lo_.resize(n_ + m_);
        hi_.resize(n_ + m_);
        lo_.head(n_) = lo;
        hi_.head(n_) = hi;
        status_.assign(n_ + m_, VarStatus::AtLower);
        xval_.assign(n_ + m_, 0.0);
        for (int j = 0; j < n_; ++j) {
            if (lo(j) > hi(j)) throw DimensionMismatch("solve_lp: lower bound exceeds upper bound.");
            if (std::isfinite(lo(j)) && std::isfinite(hi(j))) {
                status_[j] = std::abs(lo(j)) <= std::abs(hi(j)) ? VarStatus::AtLower : VarStatus::AtUpper;
            } else if (std::isfinite(lo(j))) {
                status_[j] = VarStatus::AtLower;
            } else if (std::isfinite(hi(j))) {
                status_[j] = VarStatus::AtUpper;
            } else {
                status_[j] = VarStatus::Free;
            }
            xval_[j] = nonbasic_value(j);
        }

        // Artificial columns carry the sign of the initial residual so the
        // starting basis is feasible with artificials in [0, inf).
        Eigen::VectorXd resid = rhs_;
        for (int j = 0; j < n_; ++j) {
            if (xval_[j] != 0.0) resid -= A_.col(j).head(m_) * xval_[j];
        }
        basis_.resize(m_);
        binv_ = Eigen::MatrixXd::Zero(m_, m_);
        xB_.resize(m_);
        for (int i = 0; i < m_; ++i) {
            const double sgn = resid(i) >= 0.0 ? 1.0 : -1.0;
            A_(i, n_ + i) = sgn;
            lo_(n_ + i) = 0.0;
            hi_(n_ + i) = kInf;
            basis_[i] = n_ + i;
            status_[n_ + i] = VarStatus::Basic;
            binv_(i, i) = sgn;
            xB_(i) = std::abs(resid(i));
            xval_[n_ + i] = xB_(i);
        }
        feas_tol_ = tol;
    }

    LpStatus minimize(const Eigen::VectorXd& objective) {
        // Phase 1.
        cost_ = Eigen::VectorXd::Zero(n_ + m_);
        cost_.tail(m_).setOnes();
        const LpStatus p1 = run_phase(true);
        if (p1 != LpStatus::Optimal) return p1;
        if (phase_objective() > feas_tol_ * 16.0) return LpStatus::Infeasible;

        // Phase 2: artificials pinned at zero.
        for (int i = 0; i < m_; ++i) hi_(n_ + i) = 0.0;
        cost_.setZero();
        cost_.head(n_) = objective;
        return run_phase(false);
    }

    Eigen::VectorXd primal() const {
        Eigen::VectorXd x(n_);
        for (int j = 0; j < n_; ++j) x(j) = xval_[j];
        return x;
    }

    /// Equality multipliers with the row scaling undone.
    Eigen::VectorXd dual() const {
        Eigen::VectorXd cB(m_);
        for (int i = 0; i < m_; ++i) cB(i) = cost_(basis_[i]);
        Eigen::VectorXd y = binv_.transpose() * cB;
        for (int i = 0; i < m_; ++i) y(i) /= row_scale_(i);
        return y;
    }

  private:
    enum class VarStatus { Basic, AtLower, AtUpper, Free };

    double nonbasic_value(int j) const {
        switch (status_[j]) {
            case VarStatus::AtLower: return lo_(j);
            case VarStatus::AtUpper: return hi_(j);
            default: return 0.0;
        }
    }

    double phase_objective() const {
        double v = 0.0;
        for (int i = 0; i < m_; ++i) {
            if (basis_[i] >= n_) v += std::abs(xB_(i));
        }
        return v;
    }

    void refactorize() {
        Eigen::MatrixXd B(m_, m_);
        for (int i = 0; i < m_; ++i) B.col(i) = A_.col(basis_[i]).head(m_);
        binv_ = B.partialPivLu().inverse();
        Eigen::VectorXd r = rhs_;
        for (int j = 0; j < n_ + m_; ++j) {
            if (status_[j] != VarStatus::Basic && xval_[j] != 0.0) r -= A_.col(j).head(m_) * xval_[j];
        }
        xB_ = binv_ * r;
        for (int i = 0; i < m_; ++i) xval_[basis_[i]] = xB_(i);
    }

    LpStatus run_phase(bool phase1) {
        const double dual_tol = feas_tol_;
        const long iter_limit = 200L * (m_ + n_) + 20000L;
        int degenerate_run = 0;
        bool bland = false;
        for (long iter = 0; iter < iter_limit; ++iter) {
            if (iter > 0 && iter % 128 == 0) refactorize();

            Eigen::VectorXd cB(m_);
            for (int i = 0; i < m_; ++i) cB(i) = cost_(basis_[i]);
            const Eigen::VectorXd y = binv_.transpose() * cB;

            // Pricing.
            int q = -1;
            double best_viol = dual_tol;
            double zq = 0.0;
            for (int j = 0; j < n_ + m_; ++j) {
                if (status_[j] == VarStatus::Basic) continue;
                if (hi_(j) - lo_(j) <= 0.0 && status_[j] != VarStatus::Free) continue;  // fixed
                const double z = cost_(j) - y.dot(A_.col(j).head(m_));
                double viol = 0.0;
                if (status_[j] == VarStatus::AtLower) viol = -z;
                else if (status_[j] == VarStatus::AtUpper) viol = z;
                else viol = std::abs(z);
                if (viol > best_viol) {
                    q = j;
                    best_viol = viol;
                    zq = z;
                    if (bland) break;  // first eligible index
                }
            }
            if (q < 0) return LpStatus::Optimal;

            double dir = 1.0;
            if (status_[q] == VarStatus::AtUpper) dir = -1.0;
            else if (status_[q] == VarStatus::Free) dir = zq < 0.0 ? 1.0 : -1.0;

            const Eigen::VectorXd w = binv_ * A_.col(q).head(m_);

            // Ratio test: entering may hit its own opposite bound or drive a
            // basic variable to one of its bounds.
            double own_limit = kInf;
            if (std::isfinite(lo_(q)) && std::isfinite(hi_(q))) own_limit = hi_(q) - lo_(q);
            double delta = own_limit;
            int leave = -1;        // row index, -1 = bound flip
            bool leave_to_upper = false;
            const double pivot_tol = 1e-10;
            const double tie_tol = 1e-12;
            for (int i = 0; i < m_; ++i) {
                const double rate = -dir * w(i);
                if (std::abs(rate) <= pivot_tol) continue;
                const int bj = basis_[i];
                double step;
                bool to_upper;
                if (rate < 0.0) {
                    if (!std::isfinite(lo_(bj))) continue;
                    step = (xB_(i) - lo_(bj)) / (-rate);
                    to_upper = false;
                } else {
                    if (!std::isfinite(hi_(bj))) continue;
                    step = (hi_(bj) - xB_(i)) / rate;
                    to_upper = true;
                }
                if (step < 0.0) step = 0.0;  // degenerate beyond tolerance
                if (step > delta + tie_tol) continue;
                if (step < delta - tie_tol || leave < 0) {
                    delta = std::min(delta, step);
                    leave = i;
                    leave_to_upper = to_upper;
                } else {
                    // Tie between basic candidates: Bland takes the smallest
                    // variable index, otherwise prefer the larger pivot.
                    const bool prefer = bland ? basis_[i] < basis_[leave]
                                              : std::abs(w(i)) > std::abs(w(leave));
                    if (prefer) {
                        delta = std::min(delta, step);
                        leave = i;
                        leave_to_upper = to_upper;
                    }
                }
            }

            if (!std::isfinite(delta)) {
                if (phase1) throw NumericalFailure("solve_lp: phase-1 ray detected.");
                return LpStatus::Unbounded;
            }

            if (delta <= 1e-11) {
                if (++degenerate_run > 64) bland = true;
            } else {
                degenerate_run = 0;
            }

            // Apply the step.
            const double step_q = dir * delta;
            for (int i = 0; i < m_; ++i) {
                xB_(i) -= w(i) * step_q;
                xval_[basis_[i]] = xB_(i);
            }
            const double new_q_val = xval_[q] + step_q;

            if (leave < 0) {
                // Bound flip, basis unchanged.
                status_[q] = status_[q] == VarStatus::AtLower ? VarStatus::AtUpper : VarStatus::AtLower;
                xval_[q] = nonbasic_value(q);
            } else {
                const int out = basis_[leave];
                status_[out] = leave_to_upper ? VarStatus::AtUpper : VarStatus::AtLower;
                xval_[out] = nonbasic_value(out);
                status_[q] = VarStatus::Basic;
                basis_[leave] = q;
                xB_(leave) = new_q_val;
                xval_[q] = new_q_val;
                // Eta update of the explicit inverse.
                const double piv = w(leave);
                binv_.row(leave) /= piv;
                for (int k = 0; k < m_; ++k) {
                    if (k == leave) continue;
                    const double f = w(k);
                    if (f != 0.0) binv_.row(k) -= f * binv_.row(leave);
                }
            }
        }
        throw NumericalFailure("solve_lp: simplex iteration limit exceeded.");
    }

    int m_, n_;
    Eigen::MatrixXd A_;       // scaled columns, structural then artificial
    Eigen::VectorXd rhs_;     // scaled
    Eigen::VectorXd row_scale_;
    Eigen::VectorXd lo_, hi_;
    Eigen::VectorXd cost_;
    std::vector<VarStatus> status_;
    std::vector<double> xval_;
    std::vector<int> basis_;
    Eigen::MatrixXd binv_;
    Eigen::VectorXd xB_;
    double feas_tol_;
};

/// Closed-form solve for problems without equality rows.
inline LpSolution solve_box_only(const LinearProgram& lp) {
    const auto n = lp.objective.size();
    LpSolution sol;
    sol.point.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        if (lp.lower_bounds(j) > lp.upper_bounds(j)) {
            throw DimensionMismatch("solve_lp: lower bound exceeds upper bound.");
        }
        const double c = lp.objective(j);
        if (c > 0.0) {
            if (!std::isfinite(lp.lower_bounds(j))) return LpSolution::status_only(LpStatus::Unbounded);
            sol.point(j) = lp.lower_bounds(j);
        } else if (c < 0.0) {
            if (!std::isfinite(lp.upper_bounds(j))) return LpSolution::status_only(LpStatus::Unbounded);
            sol.point(j) = lp.upper_bounds(j);
        } else {
            double v = 0.0;
            if (v < lp.lower_bounds(j)) v = lp.lower_bounds(j);
            if (v > lp.upper_bounds(j)) v = lp.upper_bounds(j);
            sol.point(j) = v;
        }
    }
    sol.status = LpStatus::Optimal;
    sol.value = lp.objective.dot(sol.point);
    sol.dual.resize(0);
    sol.reduced_costs = lp.objective;
    return sol;
}

} // namespace detail

/// Solves the LP. Deterministic for fixed input.
inline LpSolution solve_lp(const LinearProgram& lp) {
    const auto n = lp.objective.size();
    if (lp.equality_lhs.cols() != n || lp.lower_bounds.size() != n || lp.upper_bounds.size() != n ||
        lp.equality_lhs.rows() != lp.equality_rhs.size()) {
        throw DimensionMismatch("solve_lp: inconsistent problem dimensions.");
    }
    if (n == 0) {
        if (lp.equality_rhs.size() > 0 &&
            lp.equality_rhs.lpNorm<Eigen::Infinity>() > lp_tolerance()) {
            return LpSolution::status_only(LpStatus::Infeasible);
        }
        LpSolution sol;
        sol.status = LpStatus::Optimal;
        sol.value = 0.0;
        sol.point.resize(0);
        sol.dual = Eigen::VectorXd::Zero(lp.equality_rhs.size());
        sol.reduced_costs.resize(0);
        return sol;
    }
    if (lp.equality_lhs.rows() == 0) return detail::solve_box_only(lp);

    detail::SimplexSolver solver(lp.equality_lhs, lp.equality_rhs, lp.lower_bounds, lp.upper_bounds);
    const LpStatus status = solver.minimize(lp.objective);
    if (status != LpStatus::Optimal) return LpSolution::status_only(status);

    LpSolution sol;
    sol.status = LpStatus::Optimal;
    sol.point = solver.primal();
    sol.value = lp.objective.dot(sol.point);
    sol.dual = solver.dual();
    sol.reduced_costs = lp.objective - lp.equality_lhs.transpose() * sol.dual;

    const double resid = (lp.equality_lhs * sol.point - lp.equality_rhs).lpNorm<Eigen::Infinity>();
    const double scale = std::max(1.0, lp.equality_rhs.lpNorm<Eigen::Infinity>());
    if (resid > 1e-6 * scale) {
        throw NumericalFailure("solve_lp: optimal basis failed the residual check.");
    }
    return sol;
}

/// True iff some xi with |xi|_inf <= box_radius satisfies A*xi = b.
/// Pure phase-1 feasibility; no objective is optimized.
inline bool box_system_feasible(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                double box_radius = 1.0) {
    if (A.rows() != b.size()) throw DimensionMismatch("box_system_feasible: A rows != b length.");
    const auto n = A.cols();
    if (n == 0) return b.size() == 0 || b.lpNorm<Eigen::Infinity>() <= lp_tolerance();
    if (A.rows() == 0) return true;
    LinearProgram lp;
    lp.objective = Eigen::VectorXd::Zero(n);
    lp.equality_lhs = A;
    lp.equality_rhs = b;
    lp.lower_bounds = Eigen::VectorXd::Constant(n, -box_radius);
    lp.upper_bounds = Eigen::VectorXd::Constant(n, box_radius);
    return solve_lp(lp).status == LpStatus::Optimal;
}

/// inf{ |xi|_inf : A*xi = b }, or nullopt when the affine system has no
/// solution at all. Solved through the epigraph LP
///   min t  s.t.  A*xi = b,  xi_i - t <= 0,  xi_i + t >= 0.
inline std::optional<double> min_inf_norm(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    if (A.rows() != b.size()) throw DimensionMismatch("min_inf_norm: A rows != b length.");
    const auto nG = A.cols();
    const auto nA = A.rows();
    if (nG == 0) {
        if (nA == 0 || b.lpNorm<Eigen::Infinity>() <= lp_tolerance()) return 0.0;
        return std::nullopt;
    }
    if (nA == 0) return 0.0;

    // Variables: [xi, t, s, r] with s = t - xi >= 0 and r = t + xi >= 0.
    const auto nv = 3 * nG + 1;
    LinearProgram lp;
    lp.objective = Eigen::VectorXd::Zero(nv);
    lp.objective(nG) = 1.0;
    lp.equality_lhs = Eigen::MatrixXd::Zero(nA + 2 * nG, nv);
    lp.equality_rhs = Eigen::VectorXd::Zero(nA + 2 * nG);
    lp.equality_lhs.topLeftCorner(nA, nG) = A;
    lp.equality_rhs.head(nA) = b;
    for (Eigen::Index i = 0; i < nG; ++i) {
        lp.equality_lhs(nA + i, i) = 1.0;                    // xi_i
        lp.equality_lhs(nA + i, nG) = -1.0;                  // -t
        lp.equality_lhs(nA + i, nG + 1 + i) = 1.0;           // +s_i
        lp.equality_lhs(nA + nG + i, i) = 1.0;               // xi_i
        lp.equality_lhs(nA + nG + i, nG) = 1.0;              // +t
        lp.equality_lhs(nA + nG + i, 2 * nG + 1 + i) = -1.0; // -r_i
    }
    lp.lower_bounds = Eigen::VectorXd::Constant(nv, 0.0);
    lp.upper_bounds = Eigen::VectorXd::Constant(nv, detail::kInf);
    lp.lower_bounds.head(nG).setConstant(-detail::kInf);

    const LpSolution sol = solve_lp(lp);
    if (sol.status == LpStatus::Infeasible) return std::nullopt;
    if (sol.status != LpStatus::Optimal) {
        throw NumericalFailure("min_inf_norm: epigraph LP did not certify an optimum.");
    }
    return std::max(0.0, sol.value);
}

/// Exact support interval [min, max] of d'(c + G xi) over xi in B_inf(A, b).
inline Interval bound_along(const Eigen::VectorXd& d, const Eigen::VectorXd& c,
                            const Eigen::MatrixXd& G, const Eigen::MatrixXd& A,
                            const Eigen::VectorXd& b) {
    if (d.size() != c.size() || G.rows() != c.size() || A.cols() != G.cols() ||
        A.rows() != b.size()) {
        throw DimensionMismatch("bound_along: inconsistent dimensions.");
    }
    const double base = d.dot(c);
    const auto nG = G.cols();
    if (nG == 0) {
        if (b.size() > 0 && b.lpNorm<Eigen::Infinity>() > lp_tolerance()) {
            throw EmptySetError("bound_along: degenerate set has inconsistent constraints.");
        }
        return Interval::point(base);
    }
    const Eigen::VectorXd g = G.transpose() * d;
    if (A.rows() == 0) {
        const double spread = g.cwiseAbs().sum();
        return {base - spread, base + spread};
    }
    LinearProgram lp;
    lp.objective = g;
    lp.equality_lhs = A;
    lp.equality_rhs = b;
    lp.lower_bounds = Eigen::VectorXd::Constant(nG, -1.0);
    lp.upper_bounds = Eigen::VectorXd::Constant(nG, 1.0);
    const LpSolution lo = solve_lp(lp);
    if (lo.status == LpStatus::Infeasible) {
        throw EmptySetError("bound_along: the constrained zonotope is empty.");
    }
    lp.objective = -g;
    const LpSolution hi = solve_lp(lp);
    if (hi.status != LpStatus::Optimal || lo.status != LpStatus::Optimal) {
        throw NumericalFailure("bound_along: support LP did not certify an optimum.");
    }
    double lo_v = base + lo.value;
    double hi_v = base - hi.value;
    if (lo_v > hi_v) std::swap(lo_v, hi_v);  // guard against LP tolerance inversion
    return {lo_v, hi_v};
}

} // namespace czreach

#endif
