#ifndef CZREACH_ENCLOSURE_HPP
#define CZREACH_ENCLOSURE_HPP

#include <Eigen/Dense>

#include "czreach/constrained_zonotope.hpp"
#include "czreach/errors.hpp"
#include "czreach/interval.hpp"

namespace czreach {

/// Sound enclosure of { M*x : M in [J], x in Z } by the center-radius split
///   [J] = Jc +- Jr,  |x| <= |zc| + zr coordinatewise on the interval hull,
/// giving  linear_map(Jc, Z) (+) Box(Jr * (|zc| + zr)).
inline ConstrainedZonotope im_cz_enclosure(const IntervalMatrix& J, const ConstrainedZonotope& Z) {
    if (J.cols() != Z.dim()) throw DimensionMismatch("im_cz_enclosure: J columns != set dimension.");
    if (is_empty(Z)) throw EmptySetError("im_cz_enclosure: set is empty.");
    const Box hull = interval_hull(Z);
    const Eigen::VectorXd reach = hull.mid().cwiseAbs() + hull.rad();
    const Eigen::VectorXd radius = J.radius() * reach;
    const ConstrainedZonotope centered = linear_map(J.center(), Z);
    const ConstrainedZonotope slack =
        ConstrainedZonotope::zonotope(Eigen::VectorXd::Zero(J.rows()),
                                      Eigen::MatrixXd(radius.asDiagonal()));
    return minkowski_sum(centered, slack);
}

} // namespace czreach

#endif
