#ifndef CZREACH_SIMULATE_HPP
#define CZREACH_SIMULATE_HPP

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "czreach/constrained_zonotope.hpp"
#include "czreach/errors.hpp"
#include "czreach/linprog.hpp"
#include "czreach/reach.hpp"
#include "czreach/scenario.hpp"

namespace czreach {

namespace detail {

/// Uniform double in [-1, 1) from the top 53 bits, independent of the
/// standard library's distribution implementation.
inline double uniform_pm1(std::mt19937_64& rng) {
    return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
}

/// Nearest feasible xi to xi0 in the inf-norm, over B_inf(A, b).
inline Eigen::VectorXd project_xi(const ConstrainedZonotope& Z, const Eigen::VectorXd& xi0) {
    const auto nG = Z.num_generators();
    const auto nA = Z.num_constraints();
    // Variables [xi, t, s, r]: xi_i - t + s_i = xi0_i, xi_i + t - r_i = xi0_i.
    const auto nv = 3 * nG + 1;
    LinearProgram lp;
    lp.objective = Eigen::VectorXd::Zero(nv);
    lp.objective(nG) = 1.0;
    lp.equality_lhs = Eigen::MatrixXd::Zero(nA + 2 * nG, nv);
    lp.equality_rhs = Eigen::VectorXd::Zero(nA + 2 * nG);
    lp.equality_lhs.topLeftCorner(nA, nG) = Z.A;
    lp.equality_rhs.head(nA) = Z.b;
    for (Eigen::Index i = 0; i < nG; ++i) {
        lp.equality_lhs(nA + i, i) = 1.0;
        lp.equality_lhs(nA + i, nG) = -1.0;
        lp.equality_lhs(nA + i, nG + 1 + i) = 1.0;
        lp.equality_rhs(nA + i) = xi0(i);
        lp.equality_lhs(nA + nG + i, i) = 1.0;
        lp.equality_lhs(nA + nG + i, nG) = 1.0;
        lp.equality_lhs(nA + nG + i, 2 * nG + 1 + i) = -1.0;
        lp.equality_rhs(nA + nG + i) = xi0(i);
    }
    lp.lower_bounds = Eigen::VectorXd::Constant(nv, 0.0);
    lp.upper_bounds = Eigen::VectorXd::Constant(nv, kInf);
    lp.lower_bounds.head(nG).setConstant(-1.0);
    lp.upper_bounds.head(nG).setConstant(1.0);
    const LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal) {
        throw SamplingStarvation("project_xi: feasible-point LP failed (empty set?).");
    }
    return sol.point.head(nG);
}

} // namespace detail

/// Draws a feasible generator vector for Z. Unconstrained sets sample the
/// unit box directly; constrained sets try rejection against A xi = b within
/// 1e-8 and fall back to LP projection once starvation is detected.
class SetSampler {
  public:
    explicit SetSampler(ConstrainedZonotope Z) : Z_(std::move(Z)) {}

    Eigen::VectorXd sample_xi(std::mt19937_64& rng) {
        const auto nG = Z_.num_generators();
        Eigen::VectorXd xi(nG);
        if (Z_.num_constraints() == 0) {
            for (Eigen::Index i = 0; i < nG; ++i) xi(i) = detail::uniform_pm1(rng);
            return xi;
        }
        if (!starved_) {
            for (int attempt = 0; attempt < kStarvationAttempts; ++attempt) {
                for (Eigen::Index i = 0; i < nG; ++i) xi(i) = detail::uniform_pm1(rng);
                if ((Z_.A * xi - Z_.b).lpNorm<Eigen::Infinity>() <= 1e-8) return xi;
            }
            starved_ = true;  // acceptance below 1e-4; switch to LP projection
        }
        for (Eigen::Index i = 0; i < nG; ++i) xi(i) = detail::uniform_pm1(rng);
        return detail::project_xi(Z_, xi);
    }

    Eigen::VectorXd sample_point(std::mt19937_64& rng) {
        return Z_.c + Z_.G * sample_xi(rng);
    }

  private:
    static constexpr int kStarvationAttempts = 10000;
    ConstrainedZonotope Z_;
    bool starved_ = false;
};

struct ContainmentReport {
    int samples = 0;
    std::vector<int> contained;  // per step t = 0..T
    int horizon() const { return static_cast<int>(contained.size()) - 1; }
    bool all_contained() const {
        for (int c : contained) {
            if (c != samples) return false;
        }
        return true;
    }
};

/// Simulates N closed-loop trajectories from seeded initial samples and
/// counts per-step containment in the reach sets. Hull screening keeps the
/// per-point membership LPs to the members whose hull contains the point.
inline ContainmentReport sample_trajectories(const Scenario& scenario, const ReachResult& reach,
                                             int N, std::uint64_t seed) {
    ContainmentReport report;
    report.samples = N;
    const int T = reach.horizon();
    report.contained.assign(static_cast<std::size_t>(T) + 1, 0);
    if (N == 0) return report;

    // Per-member hulls, computed once.
    std::vector<std::vector<Box>> hulls(reach.steps.size());
    for (std::size_t t = 0; t < reach.steps.size(); ++t) {
        for (const auto& member : reach.steps[t].members) {
            hulls[t].push_back(interval_hull(member));
        }
    }

    std::mt19937_64 rng(seed);
    SetSampler sampler(scenario.initial_set);
    const double tol = 1e-7;
    for (int k = 0; k < N; ++k) {
        Eigen::VectorXd x = sampler.sample_point(rng);
        for (int t = 0; t <= T; ++t) {
            if (t > 0) x = scenario.step(x);
            const auto& members = reach.steps[static_cast<std::size_t>(t)].members;
            bool inside = false;
            for (std::size_t m = 0; m < members.size() && !inside; ++m) {
                if (!hulls[static_cast<std::size_t>(t)][m].contains(x, tol)) continue;
                inside = contains_point(members[m], x, tol);
            }
            if (inside) ++report.contained[static_cast<std::size_t>(t)];
        }
    }
    return report;
}

} // namespace czreach

#endif
