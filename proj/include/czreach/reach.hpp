#ifndef CZREACH_REACH_HPP
#define CZREACH_REACH_HPP

#include <chrono>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "czreach/constrained_zonotope.hpp"
#include "czreach/errors.hpp"
#include "czreach/expr.hpp"
#include "czreach/network.hpp"

namespace czreach {

/// x(t+1) = A_d x(t) + B_d u(t).
struct LinearModel {
    Eigen::MatrixXd A_d;
    Eigen::MatrixXd B_d;

    void validate() const {
        if (A_d.rows() != A_d.cols()) throw DimensionMismatch("LinearModel: A_d must be square.");
        if (B_d.rows() != A_d.rows()) throw DimensionMismatch("LinearModel: B_d rows != A_d rows.");
    }
    Eigen::Index state_dim() const { return A_d.rows(); }
    Eigen::Index input_dim() const { return B_d.cols(); }
};

struct ReachOptions {
    std::size_t member_cap = 100000;
    RangeMethod range_method = RangeMethod::Lp;
    /// Order reduction applied to the state set before every step. Turns the
    /// exact path into an over-approximation (result is flagged accordingly).
    bool reduce_between_steps = false;
    Eigen::Index max_generators = 0;
    Eigen::Index max_constraints = 0;
};

/// Reach sets per time step, t = 0..T. Entry 0 is the initial set.
struct ReachResult {
    std::string method;        // "exact" | "over" | "nonlinear"
    std::string controller;    // "exact" | "over" (controller propagation mode)
    bool exact_sets = false;   // true only for the unreduced exact linear path
    std::vector<SetUnion> steps;
    std::vector<double> timings_ms;        // per step, entry 0 is 0
    std::vector<std::size_t> member_counts;

    Eigen::Index dim() const { return steps.front().members.front().dim(); }
    int horizon() const { return static_cast<int>(steps.size()) - 1; }
};

namespace detail {

/// Checks the structure the closed-loop composition relies on: the network
/// output member must keep the input's xi variables as a prefix (leading
/// constraint block [A 0] with rhs b) and, on the exact path, carry only
/// zero columns beyond the input generators.
inline void assert_prefix(const ConstrainedZonotope& in, const ConstrainedZonotope& out,
                          bool expect_zero_tail) {
    const auto nG = in.num_generators();
    const auto nA = in.num_constraints();
    if (out.num_generators() < nG || out.num_constraints() < nA) {
        throw PrefixViolation("network output lost the input generator prefix.");
    }
    if (nA > 0) {
        const double da = (out.A.topLeftCorner(nA, nG) - in.A).cwiseAbs().maxCoeff();
        const double db = (out.b.head(nA) - in.b).cwiseAbs().maxCoeff();
        double dz = 0.0;
        if (out.num_generators() > nG) {
            dz = out.A.topRightCorner(nA, out.num_generators() - nG).cwiseAbs().maxCoeff();
        }
        if (da > 1e-12 || db > 1e-12 || dz > 1e-12) {
            throw PrefixViolation("network output rewrote the input constraint block.");
        }
    }
    if (expect_zero_tail && out.num_generators() > nG) {
        const double tail =
            out.G.rightCols(out.num_generators() - nG).cwiseAbs().maxCoeff();
        if (tail > 1e-12) {
            throw PrefixViolation("exact network output has nonzero trailing generators.");
        }
    }
}

inline PropagationOptions as_propagation(const ReachOptions& opts) {
    PropagationOptions p;
    p.range_method = opts.range_method;
    p.member_cap = opts.member_cap;
    return p;
}

inline void check_loop_dimensions(const LinearModel& model, const FeedforwardNetwork& net,
                                  Eigen::Index set_dim) {
    model.validate();
    net.validate();
    if (set_dim != model.state_dim() || net.input_dim() != model.state_dim() ||
        net.output_dim() != model.input_dim()) {
        throw DimensionMismatch("closed loop: model, network, and set dimensions disagree.");
    }
}

} // namespace detail

// ---------------------------------------------------------------------------
// Linear model
// ---------------------------------------------------------------------------

/// Exact one-step image f_cl(Z) = A_d Z "+" B_d pi(Z), composed through the
/// shared input generators rather than a Minkowski sum.
inline SetUnion closed_loop_exact_step(const SetUnion& Z, const LinearModel& model,
                                       const FeedforwardNetwork& net,
                                       const ReachOptions& opts = {}) {
    if (Z.empty()) return {};
    detail::check_loop_dimensions(model, net, Z.members.front().dim());
    SetUnion out;
    for (const auto& member : Z.members) {
        const SetUnion pi = reach_exact_network(net, SetUnion(member), detail::as_propagation(opts));
        for (const auto& piece : pi.members) {
            detail::assert_prefix(member, piece, /*expect_zero_tail=*/true);
            const auto nG = member.num_generators();
            const auto nGi = piece.num_generators();
            Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(model.state_dim(), nGi);
            padded.leftCols(nG) = member.G;
            ConstrainedZonotope cl{model.A_d * member.c + model.B_d * piece.c,
                                   model.A_d * padded + model.B_d * piece.G, piece.A, piece.b};
            out.members.push_back(std::move(cl));
            if (out.members.size() > opts.member_cap) {
                throw MemberExplosion("closed_loop_exact_step: member cap exceeded.");
            }
        }
    }
    return out;
}

/// Over-approximated one-step image through the triangle-relaxed network output.
inline ConstrainedZonotope closed_loop_over_step(const ConstrainedZonotope& Z,
                                                 const LinearModel& model,
                                                 const FeedforwardNetwork& net,
                                                 const ReachOptions& opts = {}) {
    detail::check_loop_dimensions(model, net, Z.dim());
    const ConstrainedZonotope pi = reach_over_network(net, Z, detail::as_propagation(opts));
    detail::assert_prefix(Z, pi, /*expect_zero_tail=*/false);
    const auto nG = Z.num_generators();
    Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(model.state_dim(), pi.num_generators());
    padded.leftCols(nG) = Z.G;
    return {model.A_d * Z.c + model.B_d * pi.c, model.A_d * padded + model.B_d * pi.G, pi.A,
            pi.b};
}

namespace detail {

inline void start_result(ReachResult& result, const ConstrainedZonotope& X0, int T) {
    if (T < 1) throw std::invalid_argument("reach: horizon must be at least 1.");
    X0.validate();
    if (is_empty(X0)) throw EmptySetError("reach: initial set is empty.");
    result.steps.clear();
    result.steps.push_back(SetUnion(X0));
    result.timings_ms.assign(1, 0.0);
    result.member_counts.assign(1, 1);
}

inline SetUnion maybe_reduce(const SetUnion& U, const ReachOptions& opts) {
    if (!opts.reduce_between_steps || opts.max_generators <= 0) return U;
    SetUnion out;
    for (const auto& member : U.members) {
        out.members.push_back(reduce_order(member, opts.max_generators, opts.max_constraints));
    }
    return out;
}

class StepTimer {
  public:
    StepTimer() : start_(std::chrono::steady_clock::now()) {}
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
            .count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

} // namespace detail

/// Exact reach recursion R_0 = X0, R_t = f_cl(R_{t-1}).
inline ReachResult reach_exact(const ConstrainedZonotope& X0, const LinearModel& model,
                               const FeedforwardNetwork& net, int T,
                               const ReachOptions& opts = {}) {
    ReachResult result;
    result.method = "exact";
    result.controller = "exact";
    result.exact_sets = !opts.reduce_between_steps;
    detail::start_result(result, X0, T);
    for (int t = 1; t <= T; ++t) {
        const detail::StepTimer timer;
        const SetUnion prev = detail::maybe_reduce(result.steps.back(), opts);
        SetUnion next = closed_loop_exact_step(prev, model, net, opts);
        if (next.empty()) throw EmptySetError("reach_exact: reachable set vanished.");
        result.steps.push_back(std::move(next));
        result.timings_ms.push_back(timer.ms());
        result.member_counts.push_back(result.steps.back().size());
    }
    return result;
}

/// Over-approximation recursion with a single set per step.
inline ReachResult reach_over(const ConstrainedZonotope& X0, const LinearModel& model,
                              const FeedforwardNetwork& net, int T,
                              const ReachOptions& opts = {}) {
    ReachResult result;
    result.method = "over";
    result.controller = "over";
    result.exact_sets = false;
    detail::start_result(result, X0, T);
    for (int t = 1; t <= T; ++t) {
        const detail::StepTimer timer;
        ConstrainedZonotope prev = result.steps.back().members.front();
        if (opts.reduce_between_steps && opts.max_generators > 0) {
            prev = reduce_order(prev, opts.max_generators, opts.max_constraints);
        }
        result.steps.push_back(SetUnion(closed_loop_over_step(prev, model, net, opts)));
        result.timings_ms.push_back(timer.ms());
        result.member_counts.push_back(1);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Nonlinear model
// ---------------------------------------------------------------------------

namespace detail {

/// First-order Taylor data of f over Z around gamma, with the Lagrange
/// remainder enclosed through interval Hessians over the interval hull.
struct TaylorPieces {
    Eigen::MatrixXd jacobian;    // J(gamma)
    Eigen::VectorXd center;      // J (c - gamma) + f(gamma) + mid(remainder)
    Eigen::VectorXd remainder_radius;
};

inline TaylorPieces taylor_pieces(const NonlinearModel& model, const ConstrainedZonotope& Z,
                                  const Eigen::VectorXd& gamma, const Box& hull) {
    if (gamma.size() != Z.dim()) throw DimensionMismatch("nonlinear_enclosure: gamma dimension.");
    if (!hull.contains(gamma, 1e-12)) {
        throw GammaOutsideHull("nonlinear_enclosure: gamma outside the interval hull.");
    }
    const int n = model.n;
    TaylorPieces pieces;
    pieces.jacobian = model.eval_jacobian(gamma);
    Eigen::VectorXd remainder_mid(n);
    pieces.remainder_radius.resize(n);
    const Box dbox{hull.lo - gamma, hull.hi - gamma};
    for (int q = 0; q < n; ++q) {
        Interval total = Interval::point(0.0);
        bool any_nonzero = false;
        for (int i = 0; i < n; ++i) {
            for (int j = i; j < n; ++j) {
                const Expr& entry =
                    model.half_hessian[static_cast<std::size_t>(q)][static_cast<std::size_t>(i)]
                                      [static_cast<std::size_t>(j)];
                if (entry.is_zero()) continue;
                any_nonzero = true;
                const Interval Qij = eval_interval(entry, hull);
                total = total + Qij * dbox.coord(i) * dbox.coord(j);
            }
        }
        remainder_mid(q) = total.mid();
        // Round-to-nearest arithmetic is not outward-directed; a fixed slack
        // absorbs rounding whenever the remainder is not identically zero.
        pieces.remainder_radius(q) = any_nonzero ? total.rad() + 1e-9 : 0.0;
    }
    pieces.center = pieces.jacobian * (Z.c - gamma) + model.eval(gamma) + remainder_mid;
    return pieces;
}

} // namespace detail

/// Sound enclosure of f(Z) by first-order Taylor expansion around gamma plus
/// a box bounding the Lagrange remainder:
///   c_f = J(c - gamma) + f(gamma) + c_R,  G_f = [J G  G_R],  A_f = [A 0],
/// with G_R the diagonal remainder radii.
inline ConstrainedZonotope nonlinear_enclosure(const NonlinearModel& model,
                                               const ConstrainedZonotope& Z,
                                               const Eigen::VectorXd& gamma) {
    Z.validate();
    if (Z.dim() != model.n) throw DimensionMismatch("nonlinear_enclosure: dimension mismatch.");
    if (is_empty(Z)) throw EmptySetError("nonlinear_enclosure: set is empty.");
    const Box hull = interval_hull(Z);
    const detail::TaylorPieces pieces = detail::taylor_pieces(model, Z, gamma, hull);
    const auto nG = Z.num_generators();
    const int n = model.n;
    Eigen::MatrixXd G(n, nG + n);
    G.leftCols(nG) = pieces.jacobian * Z.G;
    G.rightCols(n) = pieces.remainder_radius.asDiagonal();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(Z.num_constraints(), nG + n);
    A.leftCols(nG) = Z.A;
    return {pieces.center, std::move(G), std::move(A), Z.b};
}

/// Enclosure around the hull midpoint.
inline ConstrainedZonotope nonlinear_enclosure(const NonlinearModel& model,
                                               const ConstrainedZonotope& Z) {
    return nonlinear_enclosure(model, Z, interval_hull(Z).mid());
}

/// One over-approximated closed-loop step for a nonlinear model. The FNN
/// branch and the Taylor enclosure share the input's xi variables, so the
/// composition avoids Minkowski-sum conservatism in the controller coupling.
/// With approx_controller the union collapses to the relaxed network output.
inline SetUnion closed_loop_nonlinear_step(const ConstrainedZonotope& Z,
                                           const NonlinearModel& model,
                                           const FeedforwardNetwork& net,
                                           bool approx_controller = false,
                                           const ReachOptions& opts = {}) {
    Z.validate();
    net.validate();
    if (Z.dim() != model.n || net.input_dim() != model.n ||
        net.output_dim() != model.input_dim()) {
        throw DimensionMismatch("closed_loop_nonlinear_step: dimensions disagree.");
    }
    const Box hull = interval_hull(Z);
    const Eigen::VectorXd gamma = hull.mid();
    const detail::TaylorPieces pieces = detail::taylor_pieces(model, Z, gamma, hull);
    const int n = model.n;
    const auto nG = Z.num_generators();
    const Eigen::MatrixXd JG = pieces.jacobian * Z.G;

    SetUnion pi;
    if (approx_controller) {
        pi = SetUnion(reach_over_network(net, Z, detail::as_propagation(opts)));
    } else {
        pi = reach_exact_network(net, SetUnion(Z), detail::as_propagation(opts));
    }

    SetUnion out;
    for (const auto& piece : pi.members) {
        detail::assert_prefix(Z, piece, /*expect_zero_tail=*/!approx_controller);
        const auto nGi = piece.num_generators();
        // Column layout: [xi_1 (input), xi_2 (controller extras), xi_3 (remainder box)].
        Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, nGi + n);
        G.leftCols(nG) = JG;
        G.rightCols(n) = pieces.remainder_radius.asDiagonal();
        Eigen::MatrixXd Bg = model.B_d * piece.G;
        G.leftCols(nGi) += Bg;
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(piece.num_constraints(), nGi + n);
        A.leftCols(nGi) = piece.A;
        out.members.push_back(ConstrainedZonotope{pieces.center + model.B_d * piece.c,
                                                  std::move(G), std::move(A), piece.b});
        if (out.members.size() > opts.member_cap) {
            throw MemberExplosion("closed_loop_nonlinear_step: member cap exceeded.");
        }
    }
    return out;
}

/// Over-approximated nonlinear reach recursion. With approx_controller each
/// step keeps a single set; otherwise unions propagate membrewise.
inline ReachResult reach_nonlinear(const ConstrainedZonotope& X0, const NonlinearModel& model,
                                   const FeedforwardNetwork& net, int T, bool approx_controller,
                                   const ReachOptions& opts = {}) {
    ReachResult result;
    result.method = "nonlinear";
    result.controller = approx_controller ? "over" : "exact";
    result.exact_sets = false;
    detail::start_result(result, X0, T);
    for (int t = 1; t <= T; ++t) {
        const detail::StepTimer timer;
        const SetUnion prev = detail::maybe_reduce(result.steps.back(), opts);
        SetUnion next;
        for (const auto& member : prev.members) {
            SetUnion part = closed_loop_nonlinear_step(member, model, net, approx_controller, opts);
            next.members.insert(next.members.end(), part.members.begin(), part.members.end());
            if (next.members.size() > opts.member_cap) {
                throw MemberExplosion("reach_nonlinear: member cap exceeded.");
            }
        }
        if (next.empty()) throw EmptySetError("reach_nonlinear: reachable set vanished.");
        result.steps.push_back(std::move(next));
        result.timings_ms.push_back(timer.ms());
        result.member_counts.push_back(result.steps.back().size());
    }
    return result;
}

} // namespace czreach

#endif
