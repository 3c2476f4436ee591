#ifndef CZREACH_CONSTRAINED_ZONOTOPE_HPP
#define CZREACH_CONSTRAINED_ZONOTOPE_HPP

#include <algorithm>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "czreach/errors.hpp"
#include "czreach/interval.hpp"
#include "czreach/linprog.hpp"

namespace czreach {

/// The set { G*xi + c : |xi|_inf <= 1, A*xi = b }.
///
/// Values are immutable by convention: operations return fresh objects.
/// nG = 0 and nA = 0 are both legal; nG = 0 denotes the single point {c}
/// (empty when the zero-column constraint system is inconsistent).
struct ConstrainedZonotope {
    Eigen::VectorXd c;
    Eigen::MatrixXd G;  // n x nG
    Eigen::MatrixXd A;  // nA x nG
    Eigen::VectorXd b;  // nA

    ConstrainedZonotope() = default;
    ConstrainedZonotope(Eigen::VectorXd c_, Eigen::MatrixXd G_, Eigen::MatrixXd A_,
                        Eigen::VectorXd b_)
        : c(std::move(c_)), G(std::move(G_)), A(std::move(A_)), b(std::move(b_)) {
        validate();
    }

    Eigen::Index dim() const { return c.size(); }
    Eigen::Index num_generators() const { return G.cols(); }
    Eigen::Index num_constraints() const { return A.rows(); }

    void validate() const {
        if (G.rows() != c.size()) {
            throw DimensionMismatch("ConstrainedZonotope: G rows != center length.");
        }
        if (A.cols() != G.cols()) {
            throw DimensionMismatch("ConstrainedZonotope: A columns != generator count.");
        }
        if (A.rows() != b.size()) {
            throw DimensionMismatch("ConstrainedZonotope: A rows != b length.");
        }
    }

    /// Unconstrained zonotope.
    static ConstrainedZonotope zonotope(Eigen::VectorXd c_, Eigen::MatrixXd G_) {
        const auto nG = G_.cols();
        return {std::move(c_), std::move(G_), Eigen::MatrixXd::Zero(0, nG), Eigen::VectorXd::Zero(0)};
    }

    /// Degenerate single point {c}.
    static ConstrainedZonotope point(Eigen::VectorXd c_) {
        const auto n = c_.size();
        return {std::move(c_), Eigen::MatrixXd::Zero(n, 0), Eigen::MatrixXd::Zero(0, 0),
                Eigen::VectorXd::Zero(0)};
    }

    /// Axis-aligned box as a diagonal zonotope.
    static ConstrainedZonotope from_box(const Box& box) {
        return zonotope(box.mid(), Eigen::MatrixXd(box.rad().asDiagonal()));
    }

    /// Canonical empty set in dimension n: one generator forced to 2.
    static ConstrainedZonotope empty(Eigen::Index n) {
        Eigen::MatrixXd A_(1, 1);
        A_(0, 0) = 1.0;
        Eigen::VectorXd b_(1);
        b_(0) = 2.0;
        return {Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Zero(n, 1), A_, b_};
    }
};

/// Finite union of constrained zonotopes of equal dimension.
/// An empty member list denotes the empty set.
struct SetUnion {
    std::vector<ConstrainedZonotope> members;

    SetUnion() = default;
    explicit SetUnion(ConstrainedZonotope z) { members.push_back(std::move(z)); }
    explicit SetUnion(std::vector<ConstrainedZonotope> ms) : members(std::move(ms)) { validate(); }

    std::size_t size() const { return members.size(); }
    bool empty() const { return members.empty(); }

    void validate() const {
        for (const auto& z : members) {
            z.validate();
            if (z.dim() != members.front().dim()) {
                throw DimensionMismatch("SetUnion: member dimensions differ.");
            }
        }
    }
};

// ---------------------------------------------------------------------------
// Set algebra
// ---------------------------------------------------------------------------

/// Exact image R*Z = { R*x : x in Z }.
inline ConstrainedZonotope linear_map(const Eigen::MatrixXd& R, const ConstrainedZonotope& Z) {
    if (R.cols() != Z.dim()) throw DimensionMismatch("linear_map: R columns != set dimension.");
    return {R * Z.c, R * Z.G, Z.A, Z.b};
}

/// Z translated by v.
inline ConstrainedZonotope translate(const ConstrainedZonotope& Z, const Eigen::VectorXd& v) {
    if (v.size() != Z.dim()) throw DimensionMismatch("translate: vector dimension mismatch.");
    return {Z.c + v, Z.G, Z.A, Z.b};
}

/// Exact Minkowski sum: stacked generators, block-diagonal constraints.
inline ConstrainedZonotope minkowski_sum(const ConstrainedZonotope& Z, const ConstrainedZonotope& W) {
    if (Z.dim() != W.dim()) throw DimensionMismatch("minkowski_sum: dimension mismatch.");
    const auto gZ = Z.num_generators(), gW = W.num_generators();
    const auto aZ = Z.num_constraints(), aW = W.num_constraints();
    Eigen::MatrixXd G(Z.dim(), gZ + gW);
    G << Z.G, W.G;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(aZ + aW, gZ + gW);
    A.topLeftCorner(aZ, gZ) = Z.A;
    A.bottomRightCorner(aW, gW) = W.A;
    Eigen::VectorXd b(aZ + aW);
    b << Z.b, W.b;
    return {Z.c + W.c, std::move(G), std::move(A), std::move(b)};
}

/// Exact intersection; emptiness is not detected here (use is_empty).
inline ConstrainedZonotope intersect(const ConstrainedZonotope& Z, const ConstrainedZonotope& W) {
    if (Z.dim() != W.dim()) throw DimensionMismatch("intersect: dimension mismatch.");
    const auto gZ = Z.num_generators(), gW = W.num_generators();
    const auto aZ = Z.num_constraints(), aW = W.num_constraints();
    const auto n = Z.dim();
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, gZ + gW);
    G.leftCols(gZ) = Z.G;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(aZ + aW + n, gZ + gW);
    A.topLeftCorner(aZ, gZ) = Z.A;
    A.block(aZ, gZ, aW, gW) = W.A;
    A.bottomLeftCorner(n, gZ) = Z.G;
    A.bottomRightCorner(n, gW) = -W.G;
    Eigen::VectorXd b(aZ + aW + n);
    b << Z.b, W.b, W.c - Z.c;
    return {Z.c, std::move(G), std::move(A), std::move(b)};
}

/// Z intersected with the halfspace { x : h'x <= f }, one extra generator
/// and one extra constraint. Exact whenever Z meets the bounding hyperplane
/// or lies inside the halfspace; empty when Z lies strictly outside.
///
/// d_m < 0 means even the box relaxation of Z sits strictly beyond the
/// halfspace; the appended row would then pin h'x to the wrong side instead
/// of emptying the set, so that case returns the canonical empty set.
inline ConstrainedZonotope intersect_halfspace(const ConstrainedZonotope& Z,
                                               const Eigen::VectorXd& h, double f) {
    if (h.size() != Z.dim()) throw DimensionMismatch("intersect_halfspace: dimension mismatch.");
    const auto nG = Z.num_generators();
    const auto nA = Z.num_constraints();
    const Eigen::VectorXd hG = Z.G.transpose() * h;
    const double d_m = f - h.dot(Z.c) + hG.cwiseAbs().sum();
    if (d_m < 0.0) return ConstrainedZonotope::empty(Z.dim());
    Eigen::MatrixXd G(Z.dim(), nG + 1);
    G << Z.G, Eigen::VectorXd::Zero(Z.dim());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nA + 1, nG + 1);
    A.topLeftCorner(nA, nG) = Z.A;
    A.row(nA).head(nG) = hG.transpose();
    A(nA, nG) = 0.5 * d_m;
    Eigen::VectorXd b(nA + 1);
    b.head(nA) = Z.b;
    b(nA) = f - h.dot(Z.c) - 0.5 * d_m;
    return {Z.c, std::move(G), std::move(A), std::move(b)};
}

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

/// Emptiness test: the set is empty iff min{|xi|_inf : A xi = b} > 1.
/// Implemented as feasibility of the box system with the unit box inflated by
/// 1e-9, so values within that tolerance of 1 count as nonempty.
inline bool is_empty(const ConstrainedZonotope& Z) {
    Z.validate();
    if (Z.num_constraints() == 0) return false;
    return !box_system_feasible(Z.A, Z.b, 1.0 + 1e-9);
}

inline bool is_empty(const SetUnion& U) {
    for (const auto& z : U.members) {
        if (!is_empty(z)) return false;
    }
    return true;
}

/// Exact support interval of d'x over Z.
inline Interval support_bound(const ConstrainedZonotope& Z, const Eigen::VectorXd& d) {
    return bound_along(d, Z.c, Z.G, Z.A, Z.b);
}

/// Support interval of d'x over a union (max/min across members).
inline Interval support_bound(const SetUnion& U, const Eigen::VectorXd& d) {
    if (U.empty()) throw EmptySetError("support_bound: empty union.");
    bool first = true;
    Interval out;
    for (const auto& z : U.members) {
        const Interval s = support_bound(z, d);
        if (first) {
            out = s;
            first = false;
        } else {
            out.lo = std::min(out.lo, s.lo);
            out.hi = std::max(out.hi, s.hi);
        }
    }
    return out;
}

/// Tightest axis-aligned box containing Z (2n support LPs).
inline Box interval_hull(const ConstrainedZonotope& Z) {
    Z.validate();
    const auto n = Z.dim();
    Eigen::VectorXd lo(n), hi(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
        d(i) = 1.0;
        const Interval s = support_bound(Z, d);
        lo(i) = s.lo;
        hi(i) = s.hi;
    }
    return {std::move(lo), std::move(hi)};
}

inline Box interval_hull(const SetUnion& U) {
    if (U.empty()) throw EmptySetError("interval_hull: empty union.");
    Box out = interval_hull(U.members.front());
    for (std::size_t k = 1; k < U.members.size(); ++k) {
        const Box h = interval_hull(U.members[k]);
        out.lo = out.lo.cwiseMin(h.lo);
        out.hi = out.hi.cwiseMax(h.hi);
    }
    return out;
}

/// Membership test: feasibility of G xi = x - c, A xi = b over the unit box
/// inflated by `tol` (default 1e-7).
inline bool contains_point(const ConstrainedZonotope& Z, const Eigen::VectorXd& x,
                           double tol = 1e-7) {
    if (x.size() != Z.dim()) throw DimensionMismatch("contains_point: dimension mismatch.");
    const auto nG = Z.num_generators();
    if (nG == 0) {
        const bool consistent =
            Z.num_constraints() == 0 || Z.b.lpNorm<Eigen::Infinity>() <= tol;
        return consistent && (x - Z.c).lpNorm<Eigen::Infinity>() <= tol;
    }
    Eigen::MatrixXd S(Z.dim() + Z.num_constraints(), nG);
    S << Z.G, Z.A;
    Eigen::VectorXd r(Z.dim() + Z.num_constraints());
    r << x - Z.c, Z.b;
    return box_system_feasible(S, r, 1.0 + tol);
}

inline bool contains_point(const SetUnion& U, const Eigen::VectorXd& x, double tol = 1e-7) {
    for (const auto& z : U.members) {
        if (contains_point(z, x, tol)) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Order reduction
// ---------------------------------------------------------------------------

namespace detail {

/// Removes one constraint row and one generator column by solving the pivot
/// constraint for the pivot variable and substituting. The dropped variable's
/// box bound is relaxed, so the result is a superset of the input.
inline ConstrainedZonotope eliminate_one_constraint(const ConstrainedZonotope& Z) {
    const auto nA = Z.num_constraints();
    const auto nG = Z.num_generators();
    Eigen::Index pr = 0, pc = 0;
    Z.A.cwiseAbs().maxCoeff(&pr, &pc);
    const double piv = Z.A(pr, pc);
    if (piv == 0.0) {
        // All-zero constraint matrix: rows are either redundant (b=0) or the
        // set is empty; drop the first row either way.
        Eigen::MatrixXd A(nA - 1, nG);
        A << Z.A.topRows(pr), Z.A.bottomRows(nA - pr - 1);
        Eigen::VectorXd b(nA - 1);
        b << Z.b.head(pr), Z.b.tail(nA - pr - 1);
        return {Z.c, Z.G, std::move(A), std::move(b)};
    }
    // xi_pc = (b_pr - sum_{k != pc} A(pr,k) xi_k) / piv
    const Eigen::RowVectorXd arow = Z.A.row(pr) / piv;
    const double brow = Z.b(pr) / piv;

    auto drop_col = [&](const Eigen::MatrixXd& M) {
        Eigen::MatrixXd out(M.rows(), nG - 1);
        out << M.leftCols(pc), M.rightCols(nG - pc - 1);
        return out;
    };
    auto drop_entry = [&](const Eigen::RowVectorXd& v) {
        Eigen::RowVectorXd out(nG - 1);
        out << v.head(pc), v.tail(nG - pc - 1);
        return out;
    };

    const Eigen::RowVectorXd sub = drop_entry(arow);
    Eigen::VectorXd c = Z.c + Z.G.col(pc) * brow;
    Eigen::MatrixXd G = drop_col(Z.G) - Z.G.col(pc) * sub;
    Eigen::MatrixXd A_full = drop_col(Z.A) - Z.A.col(pc) * sub;
    Eigen::VectorXd b_full = Z.b - Z.A.col(pc) * brow;
    Eigen::MatrixXd A(nA - 1, nG - 1);
    A << A_full.topRows(pr), A_full.bottomRows(nA - pr - 1);
    Eigen::VectorXd b(nA - 1);
    b << b_full.head(pr), b_full.tail(nA - pr - 1);
    return {std::move(c), std::move(G), std::move(A), std::move(b)};
}

/// Replaces the k unconstrained generators of smallest norm with their box
/// contribution. Caller guarantees the candidates' A-columns are zero.
inline ConstrainedZonotope box_merge_generators(const ConstrainedZonotope& Z, Eigen::Index keep) {
    const auto nG = Z.num_generators();
    const auto n = Z.dim();
    std::vector<Eigen::Index> unconstrained;
    for (Eigen::Index j = 0; j < nG; ++j) {
        if (Z.num_constraints() == 0 || Z.A.col(j).cwiseAbs().maxCoeff() == 0.0) {
            unconstrained.push_back(j);
        }
    }
    const Eigen::Index excess = nG - keep;
    std::stable_sort(unconstrained.begin(), unconstrained.end(), [&](Eigen::Index a, Eigen::Index c) {
        return Z.G.col(a).norm() < Z.G.col(c).norm();
    });
    std::vector<bool> drop(nG, false);
    Eigen::Index dropped = 0;
    for (Eigen::Index j : unconstrained) {
        if (dropped >= excess + n) break;  // leave room for the n box columns
        drop[static_cast<std::size_t>(j)] = true;
        ++dropped;
    }
    Eigen::VectorXd box_radius = Eigen::VectorXd::Zero(n);
    std::vector<Eigen::Index> kept;
    for (Eigen::Index j = 0; j < nG; ++j) {
        if (drop[static_cast<std::size_t>(j)]) {
            box_radius += Z.G.col(j).cwiseAbs();
        } else {
            kept.push_back(j);
        }
    }
    Eigen::MatrixXd G(n, static_cast<Eigen::Index>(kept.size()) + n);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(Z.num_constraints(),
                                              static_cast<Eigen::Index>(kept.size()) + n);
    for (std::size_t k = 0; k < kept.size(); ++k) {
        G.col(static_cast<Eigen::Index>(k)) = Z.G.col(kept[k]);
        A.col(static_cast<Eigen::Index>(k)) = Z.A.col(kept[k]);
    }
    G.rightCols(n) = box_radius.asDiagonal();
    return {Z.c, std::move(G), std::move(A), Z.b};
}

} // namespace detail

/// Returns a superset of Z with at most max_generators generators and
/// max_constraints constraints. Within-budget inputs are returned unchanged.
/// Reduction order: constraint elimination (exact pivot substitution, sound),
/// then box-merging of unconstrained generators; with the minimum generator
/// budget the interval hull is returned directly.
inline ConstrainedZonotope reduce_order(const ConstrainedZonotope& Z, Eigen::Index max_generators,
                                        Eigen::Index max_constraints) {
    Z.validate();
    if (max_generators < Z.dim()) {
        throw DimensionMismatch("reduce_order: generator budget below the set dimension.");
    }
    if (max_constraints < 0) throw DimensionMismatch("reduce_order: negative constraint budget.");
    if (Z.num_generators() <= max_generators && Z.num_constraints() <= max_constraints) {
        return Z;
    }
    if (is_empty(Z)) throw EmptySetError("reduce_order: set is empty.");
    if (max_generators == Z.dim()) {
        return ConstrainedZonotope::from_box(interval_hull(Z));
    }
    ConstrainedZonotope out = Z;
    while (out.num_constraints() > max_constraints) {
        out = detail::eliminate_one_constraint(out);
    }
    while (out.num_generators() > max_generators) {
        Eigen::Index unconstrained = 0;
        for (Eigen::Index j = 0; j < out.num_generators(); ++j) {
            if (out.num_constraints() == 0 || out.A.col(j).cwiseAbs().maxCoeff() == 0.0) {
                ++unconstrained;
            }
        }
        const Eigen::Index excess = out.num_generators() - max_generators;
        if (unconstrained >= excess + out.dim()) {
            out = detail::box_merge_generators(out, max_generators);
        } else if (out.num_constraints() > 0) {
            out = detail::eliminate_one_constraint(out);
        } else {
            // Not enough room to merge into a box within budget.
            return ConstrainedZonotope::from_box(interval_hull(out));
        }
    }
    return out;
}

} // namespace czreach

#endif
