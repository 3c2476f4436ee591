#ifndef CZREACH_NETWORK_HPP
#define CZREACH_NETWORK_HPP

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "czreach/constrained_zonotope.hpp"
#include "czreach/errors.hpp"

namespace czreach {

struct Layer {
    Eigen::MatrixXd W;
    Eigen::VectorXd v;
};

/// ReLU feedforward network: every layer except the last applies
/// ReLU(W x + v); the last layer is linear only.
struct FeedforwardNetwork {
    std::vector<Layer> layers;

    void validate() const {
        if (layers.empty()) throw DimensionChainError("FeedforwardNetwork: no layers.");
        for (std::size_t k = 0; k < layers.size(); ++k) {
            if (layers[k].W.rows() != layers[k].v.size()) {
                throw DimensionChainError("FeedforwardNetwork: layer " + std::to_string(k) +
                                          " weight rows != bias length.");
            }
            if (k > 0 && layers[k].W.cols() != layers[k - 1].W.rows()) {
                throw DimensionChainError("FeedforwardNetwork: layer " + std::to_string(k) +
                                          " input width != previous layer output width.");
            }
        }
    }

    Eigen::Index input_dim() const { return layers.front().W.cols(); }
    Eigen::Index output_dim() const { return layers.back().W.rows(); }
};

inline Eigen::VectorXd eval_network(const FeedforwardNetwork& net, const Eigen::VectorXd& x) {
    if (x.size() != net.input_dim()) {
        throw DimensionMismatch("eval_network: input dimension mismatch.");
    }
    Eigen::VectorXd h = x;
    for (std::size_t k = 0; k < net.layers.size(); ++k) {
        h = net.layers[k].W * h + net.layers[k].v;
        if (k + 1 < net.layers.size()) h = h.cwiseMax(0.0);
    }
    return h;
}

enum class RangeMethod { Lp, IntervalArithmetic };

struct PropagationOptions {
    RangeMethod range_method = RangeMethod::Lp;
    std::size_t member_cap = 100000;
    // Optional per-layer order reduction (off by default, over-approx only).
    bool reduce_each_layer = false;
    Eigen::Index max_generators = 0;
    Eigen::Index max_constraints = 0;
};

/// Coordinatewise pre-activation ranges over I. The LP method is tight to LP
/// tolerance; the interval method drops the constraints (still sound).
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> neuron_ranges(
    const ConstrainedZonotope& I, RangeMethod method = RangeMethod::Lp) {
    if (method == RangeMethod::IntervalArithmetic || I.num_constraints() == 0) {
        const Eigen::VectorXd spread = I.G.cwiseAbs().rowwise().sum();
        return {I.c - spread, I.c + spread};
    }
    const Box hull = interval_hull(I);
    return {hull.lo, hull.hi};
}

namespace detail {

/// Identity with row i zeroed: projection onto the hyperplane x_i = 0.
inline Eigen::MatrixXd relu_projection(Eigen::Index n, Eigen::Index i) {
    Eigen::MatrixXd E = Eigen::MatrixXd::Identity(n, n);
    E(i, i) = 0.0;
    return E;
}

inline ConstrainedZonotope apply_linear_layer(const Layer& layer, const ConstrainedZonotope& Z) {
    return {layer.W * Z.c + layer.v, layer.W * Z.G, Z.A, Z.b};
}

} // namespace detail

/// Exact image of the union under x_i -> max(0, x_i), given the neuron's
/// pre-activation range [lb_i, ub_i] of the pre-split set. Branches found
/// empty are dropped. Caller skips neurons with lb_i >= 0.
inline SetUnion step_relu_exact(const SetUnion& I, Eigen::Index i, double lb_i, double ub_i) {
    SetUnion out;
    for (const auto& member : I.members) {
        if (i < 0 || i >= member.dim()) {
            throw IndexOutOfRange("step_relu_exact: neuron index outside set dimension.");
        }
        const Eigen::MatrixXd E = detail::relu_projection(member.dim(), i);
        if (ub_i <= 0.0) {
            out.members.push_back(linear_map(E, member));
            continue;
        }
        if (lb_i < 0.0) {
            Eigen::VectorXd h = Eigen::VectorXd::Zero(member.dim());
            h(i) = -1.0;  // x_i >= 0
            ConstrainedZonotope plus = intersect_halfspace(member, h, 0.0);
            h(i) = 1.0;   // x_i <= 0
            ConstrainedZonotope minus = intersect_halfspace(member, h, 0.0);
            if (!is_empty(plus)) out.members.push_back(std::move(plus));
            if (!is_empty(minus)) out.members.push_back(linear_map(E, minus));
        } else {
            out.members.push_back(member);
        }
    }
    return out;
}

/// Triangle relaxation of coordinate-i ReLU: four extra generators, three
/// extra constraints encoding y_i >= 0, y_i >= x_i and the upper edge
/// y_i <= u(x_i - l)/(u - l) through box-bounded slack variables.
inline ConstrainedZonotope step_relu_over(const ConstrainedZonotope& I, Eigen::Index i,
                                          double l_i, double u_i) {
    if (i < 0 || i >= I.dim()) {
        throw IndexOutOfRange("step_relu_over: neuron index outside set dimension.");
    }
    const Eigen::MatrixXd E = detail::relu_projection(I.dim(), i);
    if (u_i <= 0.0) return linear_map(E, I);
    if (l_i >= 0.0) return I;

    const auto n = I.dim();
    const auto nG = I.num_generators();
    const auto nA = I.num_constraints();
    const double span = u_i - l_i;

    Eigen::VectorXd c = E * I.c;
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, nG + 4);
    G.leftCols(nG) = E * I.G;
    G(i, nG) = u_i;

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nA + 3, nG + 4);
    A.topLeftCorner(nA, nG) = I.A;
    A(nA, nG) = 1.0;
    A(nA, nG + 1) = 1.0;
    A.row(nA + 1).head(nG) = -I.G.row(i);
    A(nA + 1, nG) = u_i;
    A(nA + 1, nG + 2) = span;
    A.row(nA + 2).head(nG) = -I.G.row(i);
    A(nA + 2, nG) = span;
    A(nA + 2, nG + 3) = span;

    Eigen::VectorXd b(nA + 3);
    b.head(nA) = I.b;
    b(nA) = 1.0;
    b(nA + 1) = I.c(i) + span;
    b(nA + 2) = I.c(i) - u_i;

    return {std::move(c), std::move(G), std::move(A), std::move(b)};
}

/// Exact FNN output set (union of constrained zonotopes), layer by layer.
/// Every output member keeps the input set's generators as a prefix: the
/// appended generator columns are zero and only participate in constraints.
inline SetUnion reach_exact_network(const FeedforwardNetwork& net, const SetUnion& Z,
                                    const PropagationOptions& opts = {}) {
    net.validate();
    SetUnion current;
    for (const auto& member : Z.members) {
        if (member.dim() != net.input_dim()) {
            throw DimensionMismatch("reach_exact_network: input dimension mismatch.");
        }
        if (!is_empty(member)) current.members.push_back(member);
    }

    for (std::size_t k = 0; k + 1 < net.layers.size(); ++k) {
        SetUnion next;
        for (const auto& member : current.members) {
            const ConstrainedZonotope pre = detail::apply_linear_layer(net.layers[k], member);
            const auto [lb, ub] = neuron_ranges(pre, opts.range_method);
            SetUnion branch(pre);
            for (Eigen::Index i = 0; i < pre.dim(); ++i) {
                if (lb(i) < 0.0) {
                    branch = step_relu_exact(branch, i, lb(i), ub(i));
                    if (next.members.size() + branch.members.size() > opts.member_cap) {
                        throw MemberExplosion(
                            "reach_exact_network: member cap exceeded; consider the "
                            "over-approximation path.");
                    }
                }
            }
            next.members.insert(next.members.end(), branch.members.begin(), branch.members.end());
        }
        current = std::move(next);
    }

    SetUnion out;
    for (const auto& member : current.members) {
        out.members.push_back(detail::apply_linear_layer(net.layers.back(), member));
    }
    return out;
}

/// Over-approximated FNN output set as a single constrained zonotope.
/// Each split neuron adds exactly 4 generators and 3 constraints; the input
/// set's generators remain the leading columns.
inline ConstrainedZonotope reach_over_network(const FeedforwardNetwork& net,
                                              const ConstrainedZonotope& Z,
                                              const PropagationOptions& opts = {}) {
    net.validate();
    if (Z.dim() != net.input_dim()) {
        throw DimensionMismatch("reach_over_network: input dimension mismatch.");
    }
    ConstrainedZonotope I = Z;
    for (std::size_t k = 0; k + 1 < net.layers.size(); ++k) {
        I = detail::apply_linear_layer(net.layers[k], I);
        const auto [lb, ub] = neuron_ranges(I, opts.range_method);
        for (Eigen::Index i = 0; i < I.dim(); ++i) {
            if (lb(i) < 0.0) I = step_relu_over(I, i, lb(i), ub(i));
        }
        if (opts.reduce_each_layer && opts.max_generators > 0) {
            I = reduce_order(I, opts.max_generators, opts.max_constraints);
        }
    }
    return detail::apply_linear_layer(net.layers.back(), I);
}

} // namespace czreach

#endif
