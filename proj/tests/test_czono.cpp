#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "czreach/constrained_zonotope.hpp"
#include "czreach/simulate.hpp"
#include "oracle_helpers.hpp"

using namespace czreach;

namespace {

ConstrainedZonotope box2(double x_lo, double x_hi, double y_lo, double y_hi) {
    return ConstrainedZonotope::from_box(
        Box{Eigen::Vector2d(x_lo, y_lo), Eigen::Vector2d(x_hi, y_hi)});
}

} // namespace

TEST_CASE("linear_map identity and collapse") {
    std::mt19937_64 rng(23);
    Eigen::VectorXd anchor;
    const ConstrainedZonotope Z = oracle::random_czonotope(2, 4, 1, rng, &anchor);

    const ConstrainedZonotope same = linear_map(Eigen::MatrixXd::Identity(2, 2), Z);
    REQUIRE((same.c - Z.c).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE((same.G - Z.G).cwiseAbs().maxCoeff() == 0.0);

    const ConstrainedZonotope squashed = linear_map(Eigen::MatrixXd::Zero(1, 2), Z);
    REQUIRE(squashed.dim() == 1);
    const Box hull = interval_hull(squashed);
    REQUIRE(hull.lo(0) == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(hull.hi(0) == Catch::Approx(0.0).margin(1e-12));

    REQUIRE_THROWS_AS(linear_map(Eigen::MatrixXd::Identity(3, 3), Z), DimensionMismatch);
}

TEST_CASE("linear_map of the shifted box matches the hand product") {
    // [1 1; 0 1] maps [2.5, 3.0] x [-0.25, 0.25]: first coordinate becomes
    // x1 + x2 with range [2.25, 3.25], second stays [-0.25, 0.25].
    Eigen::MatrixXd R(2, 2);
    R << 1, 1, 0, 1;
    const ConstrainedZonotope Z = box2(2.5, 3.0, -0.25, 0.25);
    const Box hull = interval_hull(linear_map(R, Z));
    REQUIRE(hull.lo(0) == Catch::Approx(2.25).margin(1e-9));
    REQUIRE(hull.hi(0) == Catch::Approx(3.25).margin(1e-9));
    REQUIRE(hull.lo(1) == Catch::Approx(-0.25).margin(1e-9));
    REQUIRE(hull.hi(1) == Catch::Approx(0.25).margin(1e-9));
}

TEST_CASE("minkowski_sum basics") {
    const ConstrainedZonotope Z = box2(0.0, 1.0, 0.0, 1.0);
    const ConstrainedZonotope origin = ConstrainedZonotope::point(Eigen::VectorXd::Zero(2));
    REQUIRE(oracle::support_equal_2d(minkowski_sum(Z, origin), Z, 1e-9));

    const auto seg = [](double r) {
        return ConstrainedZonotope::zonotope(Eigen::VectorXd::Zero(1),
                                             Eigen::MatrixXd::Constant(1, 1, r));
    };
    const Box sum = interval_hull(minkowski_sum(seg(1.0), seg(1.0)));
    REQUIRE(sum.lo(0) == Catch::Approx(-2.0).margin(1e-12));
    REQUIRE(sum.hi(0) == Catch::Approx(2.0).margin(1e-12));

    REQUIRE_THROWS_AS(minkowski_sum(Z, seg(1.0)), DimensionMismatch);
}

TEST_CASE("minkowski_sum of box and diagonal segment is the sampled hexagon") {
    const ConstrainedZonotope Z = box2(0.0, 1.0, 0.0, 1.0);
    Eigen::MatrixXd Gseg(2, 1);
    Gseg << 1.0, 1.0;
    const ConstrainedZonotope W = ConstrainedZonotope::zonotope(Eigen::VectorXd::Zero(2), Gseg);
    const ConstrainedZonotope S = minkowski_sum(Z, W);

    // Brute-force support: enumerate the box corners and segment endpoints.
    const Eigen::Vector2d corners[4] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    for (int k = 0; k < 8; ++k) {
        const double theta = 2.0 * M_PI * k / 8;
        const Eigen::Vector2d d(std::cos(theta), std::sin(theta));
        double best = -1e300;
        for (const auto& x : corners) {
            for (double t : {-1.0, 1.0}) {
                best = std::max(best, d.dot(x + Eigen::Vector2d(t, t)));
            }
        }
        REQUIRE(support_bound(S, d).hi == Catch::Approx(best).margin(1e-9));
    }
}

TEST_CASE("intersect basics") {
    const ConstrainedZonotope Z = box2(-1.0, 1.0, -1.0, 1.0);
    REQUIRE(oracle::support_equal_2d(intersect(Z, Z), Z, 1e-8));

    REQUIRE(is_empty(intersect(Z, box2(3.0, 4.0, 0.0, 1.0))));

    const ConstrainedZonotope quadrant = intersect(Z, box2(0.0, 2.0, 0.0, 2.0));
    REQUIRE_FALSE(is_empty(quadrant));
    REQUIRE(oracle::support_equal_2d(quadrant, box2(0.0, 1.0, 0.0, 1.0), 1e-8));
}

TEST_CASE("intersect_halfspace constructs the documented row") {
    const ConstrainedZonotope Z = box2(-1.0, 1.0, -1.0, 1.0);
    Eigen::VectorXd h(2);
    h << 1.0, 0.0;
    const ConstrainedZonotope H = intersect_halfspace(Z, h, 0.0);
    // d_m = 0 - 0 + 1 = 1: appended row [1 0 | 0.5] with rhs -0.5.
    REQUIRE(H.num_generators() == 3);
    REQUIRE(H.num_constraints() == 1);
    REQUIRE(H.A(0, 0) == Catch::Approx(1.0));
    REQUIRE(H.A(0, 1) == Catch::Approx(0.0));
    REQUIRE(H.A(0, 2) == Catch::Approx(0.5));
    REQUIRE(H.b(0) == Catch::Approx(-0.5));

    const Box hull = interval_hull(H);
    REQUIRE(hull.lo(0) == Catch::Approx(-1.0).margin(1e-8));
    REQUIRE(hull.hi(0) == Catch::Approx(0.0).margin(1e-8));
    REQUIRE(hull.lo(1) == Catch::Approx(-1.0).margin(1e-8));
    REQUIRE(hull.hi(1) == Catch::Approx(1.0).margin(1e-8));
}

TEST_CASE("intersect_halfspace inactive and separating cases") {
    const ConstrainedZonotope Z = box2(-1.0, 1.0, -1.0, 1.0);
    Eigen::VectorXd h(2);
    h << 1.0, 0.0;
    REQUIRE(oracle::support_equal_2d(intersect_halfspace(Z, h, 2.0), Z, 1e-8));
    REQUIRE(is_empty(intersect_halfspace(Z, h, -3.0)));
}

TEST_CASE("is_empty basics") {
    REQUIRE_FALSE(is_empty(box2(0.0, 1.0, 0.0, 1.0)));
    REQUIRE(is_empty(ConstrainedZonotope::empty(2)));

    Eigen::MatrixXd A(1, 1);
    A << 1.0;
    const ConstrainedZonotope forced{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1), A,
                                     Eigen::VectorXd::Constant(1, 2.0)};
    REQUIRE(is_empty(forced));
}

TEST_CASE("is_empty agrees with the grid oracle on 200 random instances") {
    std::mt19937_64 rng(31);
    int compared = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int nG = 1 + static_cast<int>(rng() % 3);
        const int nA = 1 + static_cast<int>(rng() % 2);
        Eigen::MatrixXd A(nA, nG);
        for (int r = 0; r < nA; ++r) {
            for (int j = 0; j < nG; ++j) A(r, j) = oracle::uniform_pm1(rng);
        }
        Eigen::VectorXd b(nA);
        for (int r = 0; r < nA; ++r) b(r) = 1.4 * oracle::uniform_pm1(rng);
        Eigen::MatrixXd G(2, nG);
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < nG; ++j) G(i, j) = oracle::uniform_pm1(rng);
        }
        const ConstrainedZonotope Z{Eigen::VectorXd::Zero(2), G, A, b};

        const auto min_norm = min_inf_norm(A, b);
        if (min_norm.has_value() && std::abs(*min_norm - 1.0) < 2e-2) continue;  // boundary band
        const bool oracle_nonempty = oracle::grid_feasible(A, b, 1e-2);
        REQUIRE(is_empty(Z) == !oracle_nonempty);
        ++compared;
    }
    REQUIRE(compared >= 150);
}

TEST_CASE("interval_hull examples") {
    const Box b0 = interval_hull(box2(2.5, 3.0, -0.25, 0.25));
    REQUIRE(b0.lo(0) == Catch::Approx(2.5).margin(1e-9));
    REQUIRE(b0.hi(0) == Catch::Approx(3.0).margin(1e-9));
    REQUIRE(b0.lo(1) == Catch::Approx(-0.25).margin(1e-9));
    REQUIRE(b0.hi(1) == Catch::Approx(0.25).margin(1e-9));

    Eigen::VectorXd p(2);
    p << 0.25, -3.5;
    const Box bp = interval_hull(ConstrainedZonotope::point(p));
    REQUIRE(bp.lo == p);
    REQUIRE(bp.hi == p);

    Eigen::MatrixXd A(1, 2);
    A << 1.0, 1.0;
    const ConstrainedZonotope diag{Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2), A,
                                   Eigen::VectorXd::Zero(1)};
    const Box bd = interval_hull(diag);
    REQUIRE(bd.lo(0) == Catch::Approx(-1.0).margin(1e-8));
    REQUIRE(bd.hi(0) == Catch::Approx(1.0).margin(1e-8));
    REQUIRE(bd.lo(1) == Catch::Approx(-1.0).margin(1e-8));
    REQUIRE(bd.hi(1) == Catch::Approx(1.0).margin(1e-8));

    REQUIRE_THROWS_AS(interval_hull(ConstrainedZonotope::empty(2)), EmptySetError);
}

TEST_CASE("interval_hull is invariant under the identity map") {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd anchor;
        const ConstrainedZonotope Z = oracle::random_czonotope(2, 3, 1, rng, &anchor);
        if (is_empty(Z)) continue;
        const Box h1 = interval_hull(Z);
        const Box h2 = interval_hull(linear_map(Eigen::MatrixXd::Identity(2, 2), Z));
        REQUIRE(h1.lo == h2.lo);
        REQUIRE(h1.hi == h2.hi);
    }
}

TEST_CASE("contains_point basics") {
    std::mt19937_64 rng(41);
    Eigen::VectorXd anchor;
    const ConstrainedZonotope Z = oracle::random_czonotope(2, 4, 0, rng, &anchor);
    REQUIRE(contains_point(Z, Z.c));

    const Box hull = interval_hull(Z);
    Eigen::VectorXd outside = hull.hi;
    outside(0) += 1.0;
    REQUIRE_FALSE(contains_point(Z, outside));

    const ConstrainedZonotope unit = box2(0.0, 1.0, 0.0, 1.0);
    REQUIRE(contains_point(unit, Eigen::Vector2d(1.0, 1.0)));  // corner, xi = (1, 1)
    REQUIRE(contains_point(unit, Eigen::Vector2d(0.0, 1.0)));
    REQUIRE_FALSE(contains_point(unit, Eigen::Vector2d(1.001, 1.0)));
    REQUIRE_THROWS_AS(contains_point(unit, Eigen::VectorXd::Zero(3)), DimensionMismatch);
}

TEST_CASE("reduce_order keeps within-budget sets bitwise") {
    std::mt19937_64 rng(43);
    Eigen::VectorXd anchor;
    const ConstrainedZonotope Z = oracle::random_czonotope(2, 4, 2, rng, &anchor);
    const ConstrainedZonotope R = reduce_order(Z, 4, 2);
    REQUIRE(R.c == Z.c);
    REQUIRE(R.G == Z.G);
    REQUIRE(R.A == Z.A);
    REQUIRE(R.b == Z.b);
}

TEST_CASE("reduce_order to the minimum budget returns the interval hull") {
    std::mt19937_64 rng(47);
    Eigen::VectorXd anchor;
    const ConstrainedZonotope Z = oracle::random_czonotope(2, 6, 2, rng, &anchor);
    REQUIRE_FALSE(is_empty(Z));
    const ConstrainedZonotope R = reduce_order(Z, 2, 0);
    REQUIRE(R.num_generators() == 2);
    REQUIRE(R.num_constraints() == 0);
    const Box hull = interval_hull(Z);
    const Box rhull = interval_hull(R);
    REQUIRE(rhull.lo.isApprox(hull.lo, 1e-9));
    REQUIRE(rhull.hi.isApprox(hull.hi, 1e-9));
}

TEST_CASE("reduce_order never shrinks: sampled members stay inside") {
    std::mt19937_64 rng(53);
    for (int instance = 0; instance < 5; ++instance) {
        Eigen::VectorXd anchor;
        const ConstrainedZonotope Z = oracle::random_czonotope(2, 10, 2, rng, &anchor);
        if (is_empty(Z)) continue;
        const ConstrainedZonotope R = reduce_order(Z, 4, 1);
        REQUIRE(R.num_generators() <= 4);
        REQUIRE(R.num_constraints() <= 1);
        for (int s = 0; s < 1000; ++s) {
            const Eigen::VectorXd xi = oracle::sample_member_point(Z, anchor, rng);
            REQUIRE(contains_point(R, Z.c + Z.G * xi));
        }
    }
}

TEST_CASE("reduce_order budget below the dimension is rejected") {
    const ConstrainedZonotope Z = box2(0.0, 1.0, 0.0, 1.0);
    REQUIRE_THROWS_AS(reduce_order(Z, 1, 0), DimensionMismatch);
}

TEST_CASE("set operations are exact at sampled points") {
    std::mt19937_64 rng(59);
    for (int trial = 0; trial < 8; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 2);
        Eigen::VectorXd anchor_z, anchor_w;
        const ConstrainedZonotope Z = oracle::random_czonotope(
            n, 2 + static_cast<int>(rng() % 4), static_cast<int>(rng() % 2), rng, &anchor_z);
        const ConstrainedZonotope W = oracle::random_czonotope(
            n, 2 + static_cast<int>(rng() % 4), static_cast<int>(rng() % 2), rng, &anchor_w);
        Eigen::MatrixXd R(2, n);
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < n; ++j) R(i, j) = oracle::uniform_pm1(rng);
        }
        const ConstrainedZonotope mapped = linear_map(R, Z);
        const ConstrainedZonotope summed = minkowski_sum(Z, W);
        for (int s = 0; s < 200; ++s) {
            const Eigen::VectorXd x = Z.c + Z.G * oracle::sample_member_point(Z, anchor_z, rng);
            const Eigen::VectorXd y = W.c + W.G * oracle::sample_member_point(W, anchor_w, rng);
            REQUIRE(contains_point(mapped, R * x));
            REQUIRE(contains_point(summed, x + y));
        }
    }
}

TEST_CASE("intersection points lie in both operands") {
    const ConstrainedZonotope Z = box2(-1.0, 1.0, -1.0, 1.0);
    const ConstrainedZonotope W = box2(0.0, 2.0, -0.5, 2.0);
    const ConstrainedZonotope I = intersect(Z, W);
    REQUIRE_FALSE(is_empty(I));
    std::mt19937_64 rng(61);
    SetSampler sampler(I);
    for (int s = 0; s < 300; ++s) {
        const Eigen::VectorXd x = sampler.sample_point(rng);
        REQUIRE(contains_point(Z, x, 1e-6));
        REQUIRE(contains_point(W, x, 1e-6));
        REQUIRE(contains_point(I, x, 1e-6));
    }
}

TEST_CASE("halfspace intersection is the restriction of Z") {
    std::mt19937_64 rng(67);
    for (int trial = 0; trial < 6; ++trial) {
        Eigen::VectorXd anchor;
        const ConstrainedZonotope Z = oracle::random_czonotope(2, 4, 1, rng, &anchor);
        if (is_empty(Z)) continue;
        Eigen::VectorXd h(2);
        h << oracle::uniform_pm1(rng), oracle::uniform_pm1(rng);
        if (h.cwiseAbs().maxCoeff() < 0.1) continue;
        const double f = h.dot(Z.c) + 0.3 * oracle::uniform_pm1(rng);
        const ConstrainedZonotope H = intersect_halfspace(Z, h, f);
        for (int s = 0; s < 500; ++s) {
            const Eigen::VectorXd x = Z.c + Z.G * oracle::sample_member_point(Z, anchor, rng);
            if (h.dot(x) <= f - 1e-9) {
                REQUIRE(contains_point(H, x));
            }
        }
        if (!is_empty(H)) {
            SetSampler sampler(H);
            for (int s = 0; s < 200; ++s) {
                const Eigen::VectorXd x = sampler.sample_point(rng);
                REQUIRE(h.dot(x) <= f + 1e-6);
                REQUIRE(contains_point(Z, x, 1e-6));
            }
        }
    }
}

TEST_CASE("set union helpers") {
    SetUnion empty_union;
    REQUIRE(empty_union.empty());
    REQUIRE(is_empty(empty_union));

    SetUnion u(box2(0.0, 1.0, 0.0, 1.0));
    u.members.push_back(box2(2.0, 3.0, 0.0, 1.0));
    REQUIRE_FALSE(is_empty(u));
    REQUIRE(contains_point(u, Eigen::Vector2d(2.5, 0.5)));
    REQUIRE_FALSE(contains_point(u, Eigen::Vector2d(1.5, 0.5)));
    const Box hull = interval_hull(u);
    REQUIRE(hull.lo(0) == Catch::Approx(0.0).margin(1e-9));
    REQUIRE(hull.hi(0) == Catch::Approx(3.0).margin(1e-9));

    u.members.push_back(ConstrainedZonotope::point(Eigen::VectorXd::Zero(3)));
    REQUIRE_THROWS_AS(u.validate(), DimensionMismatch);
}
