#ifndef CZREACH_VERIFY_HPP
#define CZREACH_VERIFY_HPP

#include <chrono>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "czreach/constrained_zonotope.hpp"
#include "czreach/errors.hpp"
#include "czreach/reach.hpp"

namespace czreach {

struct UnsafeSet {
    ConstrainedZonotope region;
    std::string label;
};

enum class Verdict { Safe, UnsafeIntersectionFound, Unknown };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Safe: return "Safe";
        case Verdict::UnsafeIntersectionFound: return "Unsafe-Intersection-Found";
        case Verdict::Unknown: return "Unknown";
    }
    return "Unknown";
}

struct Witness {
    int t = 0;
    int member = 0;
    int obstacle = 0;
    double lp_value = 0.0;
};

struct VerificationReport {
    Verdict verdict = Verdict::Safe;
    std::vector<Witness> witnesses;
    std::size_t lp_count = 0;   // mandated emptiness checks (N * sum_t n_t or N * T)
    std::size_t lp_solved = 0;  // checks that survived the hull pre-filter
    double wall_ms = 0.0;
};

namespace detail {

inline bool hulls_disjoint(const Box& a, const Box& b) {
    for (Eigen::Index i = 0; i < a.dim(); ++i) {
        if (a.hi(i) < b.lo(i) || b.hi(i) < a.lo(i)) return true;
    }
    return false;
}

/// min |xi|_inf over the stacked intersection system; the
/// pair is avoided iff the value exceeds 1 (strict threshold 1 + 1e-9).
inline std::optional<double> intersection_lp_value(const ConstrainedZonotope& R,
                                                   const ConstrainedZonotope& O) {
    const auto n = R.dim();
    const auto gR = R.num_generators(), gO = O.num_generators();
    const auto aR = R.num_constraints(), aO = O.num_constraints();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(aR + aO + n, gR + gO);
    A.topLeftCorner(aR, gR) = R.A;
    A.block(aR, gR, aO, gO) = O.A;
    A.bottomLeftCorner(n, gR) = R.G;
    A.bottomRightCorner(n, gO) = -O.G;
    Eigen::VectorXd b(aR + aO + n);
    b << R.b, O.b, O.c - R.c;
    return min_inf_norm(A, b);
}

struct AvoidanceScan {
    std::vector<Witness> witnesses;
    std::size_t lp_count = 0;
    std::size_t lp_solved = 0;
};

inline AvoidanceScan scan_avoidance(const ReachResult& reach,
                                    const std::vector<UnsafeSet>& obstacles) {
    AvoidanceScan scan;
    if (obstacles.empty() || reach.horizon() < 1) return scan;
    const auto n = reach.dim();
    std::vector<Box> obstacle_hulls;
    obstacle_hulls.reserve(obstacles.size());
    for (const auto& o : obstacles) {
        if (o.region.dim() != n) {
            throw DimensionMismatch("check_avoid: obstacle dimension mismatch.");
        }
        obstacle_hulls.push_back(interval_hull(o.region));
    }
    for (int t = 1; t <= reach.horizon(); ++t) {
        const auto& members = reach.steps[static_cast<std::size_t>(t)].members;
        for (std::size_t i = 0; i < members.size(); ++i) {
            const Box member_hull = interval_hull(members[i]);
            for (std::size_t j = 0; j < obstacles.size(); ++j) {
                ++scan.lp_count;
                // Disjoint hulls certify emptiness; the LP is skipped.
                if (hulls_disjoint(member_hull, obstacle_hulls[j])) continue;
                ++scan.lp_solved;
                const auto value = intersection_lp_value(members[i], obstacles[j].region);
                if (!value.has_value()) continue;  // inconsistent system: empty
                if (!(*value > 1.0 + 1e-9)) {
                    scan.witnesses.push_back(
                        {t, static_cast<int>(i), static_cast<int>(j), *value});
                }
            }
        }
    }
    return scan;
}

} // namespace detail

/// Avoidance check over exact reach sets: Safe is sound and complete for
/// the given horizon; every violated (t, i, j) triple is reported.
inline VerificationReport check_avoid_exact(const ReachResult& reach,
                                            const std::vector<UnsafeSet>& obstacles) {
    if (!reach.exact_sets) {
        throw MethodMismatch("check_avoid_exact: reach result is not exact.");
    }
    const auto start = std::chrono::steady_clock::now();
    detail::AvoidanceScan scan = detail::scan_avoidance(reach, obstacles);
    VerificationReport report;
    report.witnesses = std::move(scan.witnesses);
    report.lp_count = scan.lp_count;
    report.lp_solved = scan.lp_solved;
    report.verdict =
        report.witnesses.empty() ? Verdict::Safe : Verdict::UnsafeIntersectionFound;
    report.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return report;
}

/// Avoidance check over over-approximated reach sets: Safe is sound;
/// an intersection with an over-approximation is inconclusive, so non-safe
/// outcomes are reported as Unknown.
inline VerificationReport check_avoid_over(const ReachResult& reach,
                                           const std::vector<UnsafeSet>& obstacles) {
    const auto start = std::chrono::steady_clock::now();
    detail::AvoidanceScan scan = detail::scan_avoidance(reach, obstacles);
    VerificationReport report;
    report.witnesses = std::move(scan.witnesses);
    report.lp_count = scan.lp_count;
    report.lp_solved = scan.lp_solved;
    report.verdict = report.witnesses.empty() ? Verdict::Safe : Verdict::Unknown;
    report.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return report;
}

} // namespace czreach

#endif
