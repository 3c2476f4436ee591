#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "czreach/linprog.hpp"
#include "oracle_helpers.hpp"

using namespace czreach;

namespace {

LinearProgram box_lp(const Eigen::VectorXd& objective, double lo, double hi) {
    LinearProgram lp;
    lp.objective = objective;
    lp.equality_lhs = Eigen::MatrixXd::Zero(0, objective.size());
    lp.equality_rhs = Eigen::VectorXd::Zero(0);
    lp.lower_bounds = Eigen::VectorXd::Constant(objective.size(), lo);
    lp.upper_bounds = Eigen::VectorXd::Constant(objective.size(), hi);
    return lp;
}

/// Strong-duality certificate for a bounded-variable LP: dual-feasible signs
/// and matching objective via complementary slackness.
void require_dual_certificate(const LinearProgram& lp, const LpSolution& sol, double tol = 1e-7) {
    REQUIRE(sol.status == LpStatus::Optimal);
    REQUIRE((lp.equality_lhs * sol.point - lp.equality_rhs).lpNorm<Eigen::Infinity>() <= 1e-8);
    double dual_value = sol.dual.size() > 0 ? sol.dual.dot(lp.equality_rhs) : 0.0;
    for (Eigen::Index j = 0; j < lp.objective.size(); ++j) {
        const double z = sol.reduced_costs(j);
        if (z > tol) {
            REQUIRE(std::isfinite(lp.lower_bounds(j)));
            dual_value += z * lp.lower_bounds(j);
        } else if (z < -tol) {
            REQUIRE(std::isfinite(lp.upper_bounds(j)));
            dual_value += z * lp.upper_bounds(j);
        }
        REQUIRE(sol.point(j) >= lp.lower_bounds(j) - 1e-8);
        REQUIRE(sol.point(j) <= lp.upper_bounds(j) + 1e-8);
    }
    REQUIRE(std::abs(dual_value - sol.value) <= tol * std::max(1.0, std::abs(sol.value)));
    REQUIRE(std::abs(lp.objective.dot(sol.point) - sol.value) <= 1e-8);
}

} // namespace

TEST_CASE("solve_lp box corner") {
    Eigen::VectorXd c(1);
    c << 1.0;
    const LpSolution sol = solve_lp(box_lp(c, -1.0, 1.0));
    REQUIRE(sol.status == LpStatus::Optimal);
    REQUIRE(sol.value == Catch::Approx(-1.0).margin(1e-9));
    REQUIRE(sol.point(0) == Catch::Approx(-1.0).margin(1e-9));
}

TEST_CASE("solve_lp bound conflict is infeasible") {
    LinearProgram lp;
    lp.objective = Eigen::VectorXd::Zero(1);
    lp.equality_lhs = Eigen::MatrixXd::Ones(1, 1);
    lp.equality_rhs = Eigen::VectorXd::Constant(1, 2.0);
    lp.lower_bounds = Eigen::VectorXd::Constant(1, -1.0);
    lp.upper_bounds = Eigen::VectorXd::Constant(1, 1.0);
    REQUIRE(solve_lp(lp).status == LpStatus::Infeasible);
}

TEST_CASE("solve_lp on the diagonal segment") {
    // Feasible set is the segment {(t, t) : t in [-1, 1]}; the oracle
    // enumerates its two endpoints.
    LinearProgram lp;
    lp.objective = Eigen::VectorXd::Ones(2);
    lp.equality_lhs.resize(1, 2);
    lp.equality_lhs << 1.0, -1.0;
    lp.equality_rhs = Eigen::VectorXd::Zero(1);
    lp.lower_bounds = Eigen::VectorXd::Constant(2, -1.0);
    lp.upper_bounds = Eigen::VectorXd::Constant(2, 1.0);
    const double endpoint_min =
        std::min(lp.objective.dot(Eigen::Vector2d(-1.0, -1.0)), lp.objective.dot(Eigen::Vector2d(1.0, 1.0)));
    REQUIRE(endpoint_min == -2.0);

    const LpSolution sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    REQUIRE(sol.value == Catch::Approx(endpoint_min).margin(1e-8));
    REQUIRE(sol.point(0) == Catch::Approx(-1.0).margin(1e-8));
    REQUIRE(sol.point(1) == Catch::Approx(-1.0).margin(1e-8));
    require_dual_certificate(lp, sol);
}

TEST_CASE("solve_lp detects unboundedness") {
    Eigen::VectorXd c(1);
    c << 1.0;
    LinearProgram lp = box_lp(c, -1.0, 1.0);
    lp.lower_bounds(0) = -detail::kInf;
    REQUIRE(solve_lp(lp).status == LpStatus::Unbounded);

    // Same with an equality coupling two variables.
    LinearProgram lp2;
    lp2.objective = Eigen::VectorXd::Zero(2);
    lp2.objective(0) = 1.0;
    lp2.equality_lhs.resize(1, 2);
    lp2.equality_lhs << 1.0, -1.0;
    lp2.equality_rhs = Eigen::VectorXd::Zero(1);
    lp2.lower_bounds = Eigen::VectorXd::Constant(2, -detail::kInf);
    lp2.upper_bounds = Eigen::VectorXd::Constant(2, detail::kInf);
    REQUIRE(solve_lp(lp2).status == LpStatus::Unbounded);
}

TEST_CASE("solve_lp rejects malformed input") {
    LinearProgram lp;
    lp.objective = Eigen::VectorXd::Zero(2);
    lp.equality_lhs = Eigen::MatrixXd::Zero(1, 3);  // wrong column count
    lp.equality_rhs = Eigen::VectorXd::Zero(1);
    lp.lower_bounds = Eigen::VectorXd::Constant(2, -1.0);
    lp.upper_bounds = Eigen::VectorXd::Constant(2, 1.0);
    REQUIRE_THROWS_AS(solve_lp(lp), DimensionMismatch);

    LinearProgram lp2 = box_lp(Eigen::VectorXd::Zero(1), 1.0, -1.0);
    REQUIRE_THROWS_AS(solve_lp(lp2), DimensionMismatch);
}

TEST_CASE("min_inf_norm basics") {
    SECTION("no constraint rows") {
        const auto v = min_inf_norm(Eigen::MatrixXd::Zero(0, 3), Eigen::VectorXd::Zero(0));
        REQUIRE(v.has_value());
        REQUIRE(*v == 0.0);
    }
    SECTION("symmetric split") {
        Eigen::MatrixXd A(1, 2);
        A << 1.0, 1.0;
        Eigen::VectorXd b(1);
        b << 2.0;
        const auto v = min_inf_norm(A, b);
        REQUIRE(v.has_value());
        REQUIRE(*v == Catch::Approx(1.0).margin(1e-8));
    }
    SECTION("free coordinate stays at zero") {
        Eigen::MatrixXd A(1, 2);
        A << 1.0, 0.0;
        Eigen::VectorXd b(1);
        b << 0.5;
        const auto v = min_inf_norm(A, b);
        REQUIRE(v.has_value());
        REQUIRE(*v == Catch::Approx(0.5).margin(1e-8));
    }
    SECTION("inconsistent rows are infeasible") {
        Eigen::MatrixXd A(2, 1);
        A << 1.0, 1.0;
        Eigen::VectorXd b(2);
        b << 0.0, 1.0;
        REQUIRE_FALSE(min_inf_norm(A, b).has_value());
    }
    SECTION("degenerate zero-variable system") {
        REQUIRE(min_inf_norm(Eigen::MatrixXd::Zero(1, 0), Eigen::VectorXd::Zero(1)).has_value());
        REQUIRE_FALSE(
            min_inf_norm(Eigen::MatrixXd::Zero(1, 0), Eigen::VectorXd::Constant(1, 1.0)).has_value());
    }
}

TEST_CASE("min_inf_norm agrees with the grid oracle") {
    std::mt19937_64 rng(20240817);
    int compared = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const int nG = 1 + static_cast<int>(rng() % 3);
        const int nA = 1 + static_cast<int>(rng() % 2);
        Eigen::MatrixXd A(nA, nG);
        for (int r = 0; r < nA; ++r) {
            for (int j = 0; j < nG; ++j) A(r, j) = oracle::uniform_pm1(rng);
        }
        Eigen::VectorXd b(nA);
        for (int r = 0; r < nA; ++r) b(r) = 1.6 * oracle::uniform_pm1(rng);
        const auto lp_value = min_inf_norm(A, b);
        // Unit-threshold emptiness test against the unit-cube grid.
        if (lp_value.has_value() && std::abs(*lp_value - 1.0) < 2e-2) continue;  // boundary band
        const bool grid_inside = oracle::grid_feasible(A, b, 1e-2);
        const bool lp_inside = lp_value.has_value() && *lp_value <= 1.0;
        REQUIRE(lp_inside == grid_inside);
        ++compared;
    }
    REQUIRE(compared >= 40);
}

TEST_CASE("bound_along support intervals") {
    SECTION("unit box") {
        const Interval s = bound_along(Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 0.0),
                                       Eigen::MatrixXd::Identity(2, 2),
                                       Eigen::MatrixXd::Zero(0, 2), Eigen::VectorXd::Zero(0));
        REQUIRE(s.lo == Catch::Approx(-1.0).margin(1e-9));
        REQUIRE(s.hi == Catch::Approx(1.0).margin(1e-9));
    }
    SECTION("shifted box along x1") {
        const Interval s = bound_along(Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(2.75, 0.0),
                                       Eigen::Vector2d(0.25, 0.25).asDiagonal(),
                                       Eigen::MatrixXd::Zero(0, 2), Eigen::VectorXd::Zero(0));
        REQUIRE(s.lo == Catch::Approx(2.5).margin(1e-9));
        REQUIRE(s.hi == Catch::Approx(3.0).margin(1e-9));
    }
    SECTION("anti-diagonal constraint keeps the full range") {
        Eigen::MatrixXd A(1, 2);
        A << 1.0, 1.0;
        const Interval s = bound_along(Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 0.0),
                                       Eigen::MatrixXd::Identity(2, 2), A, Eigen::VectorXd::Zero(1));
        REQUIRE(s.lo == Catch::Approx(-1.0).margin(1e-8));
        REQUIRE(s.hi == Catch::Approx(1.0).margin(1e-8));
    }
    SECTION("empty set raises") {
        Eigen::MatrixXd A(1, 1);
        A << 1.0;
        REQUIRE_THROWS_AS(bound_along(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Zero(1),
                                      Eigen::MatrixXd::Identity(1, 1), A,
                                      Eigen::VectorXd::Constant(1, 2.0)),
                          EmptySetError);
    }
}

TEST_CASE("bound_along is mirror symmetric") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 2);
        const int nG = 1 + static_cast<int>(rng() % 4);
        const int nA = static_cast<int>(rng() % 2);
        Eigen::VectorXd anchor;
        const ConstrainedZonotope Z = oracle::random_czonotope(n, nG, nA, rng, &anchor);
        Eigen::VectorXd d(n);
        for (int i = 0; i < n; ++i) d(i) = oracle::uniform_pm1(rng);
        const Interval fwd = bound_along(d, Z.c, Z.G, Z.A, Z.b);
        const Interval bwd = bound_along(Eigen::VectorXd(-d), Z.c, Z.G, Z.A, Z.b);
        REQUIRE(fwd.lo == Catch::Approx(-bwd.hi).margin(1e-9));
        REQUIRE(fwd.hi == Catch::Approx(-bwd.lo).margin(1e-9));
    }
}

TEST_CASE("random equality LPs carry dual certificates and match the grid") {
    std::mt19937_64 rng(991);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 2);
        const int m = 1 + static_cast<int>(rng() % 2);
        Eigen::MatrixXd A(m, n);
        for (int r = 0; r < m; ++r) {
            for (int j = 0; j < n; ++j) A(r, j) = oracle::uniform_pm1(rng);
        }
        Eigen::VectorXd anchor(n);
        for (int j = 0; j < n; ++j) anchor(j) = 0.5 * oracle::uniform_pm1(rng);
        const Eigen::VectorXd b = A * anchor;  // guarantees feasibility
        Eigen::VectorXd c(n);
        for (int j = 0; j < n; ++j) c(j) = oracle::uniform_pm1(rng);

        LinearProgram lp;
        lp.objective = c;
        lp.equality_lhs = A;
        lp.equality_rhs = b;
        lp.lower_bounds = Eigen::VectorXd::Constant(n, -1.0);
        lp.upper_bounds = Eigen::VectorXd::Constant(n, 1.0);
        const LpSolution sol = solve_lp(lp);
        require_dual_certificate(lp, sol);

        const auto grid = oracle::grid_min_objective(A, b, c, 1e-2);
        REQUIRE(grid.has_value());
        // Grid points are slack-feasible, so the grid minimum may undershoot
        // the LP optimum by at most the dual-weighted slack; it overshoots by
        // at most the objective Lipschitz constant times half a grid step.
        const double dual_slack = sol.dual.cwiseAbs().dot(oracle::row_slack(A, 1e-2));
        REQUIRE(sol.value <= *grid + dual_slack + 1e-8);
        REQUIRE(*grid <= sol.value + 0.5e-2 * c.cwiseAbs().sum() + 1e-8);
    }
}

TEST_CASE("CZREACH_LP_TOL is read once and positive") {
    REQUIRE(lp_tolerance() > 0.0);
}
