#ifndef CZREACH_INTERVAL_HPP
#define CZREACH_INTERVAL_HPP

#include <algorithm>
#include <cmath>
#include <ostream>

#include <Eigen/Dense>

#include "czreach/errors.hpp"

namespace czreach {

/// Closed real interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
        if (!(lo <= hi)) {
            throw DimensionMismatch("Interval: lower bound exceeds upper bound.");
        }
    }
    static Interval point(double v) { return {v, v}; }

    double mid() const { return 0.5 * (lo + hi); }
    double rad() const { return 0.5 * (hi - lo); }
    double width() const { return hi - lo; }
    bool contains(double v, double tol = 0.0) const { return v >= lo - tol && v <= hi + tol; }
    bool contains(const Interval& other, double tol = 0.0) const {
        return other.lo >= lo - tol && other.hi <= hi + tol;
    }
    /// Largest absolute value attained on the interval.
    double mag() const { return std::max(std::abs(lo), std::abs(hi)); }
};

inline std::ostream& operator<<(std::ostream& os, const Interval& a) {
    return os << "[" << a.lo << ", " << a.hi << "]";
}

inline Interval operator+(const Interval& a, const Interval& b) {
    return {a.lo + b.lo, a.hi + b.hi};
}

inline Interval operator-(const Interval& a, const Interval& b) {
    return {a.lo - b.hi, a.hi - b.lo};
}

inline Interval operator-(const Interval& a) { return {-a.hi, -a.lo}; }

inline Interval operator*(const Interval& a, const Interval& b) {
    const double p1 = a.lo * b.lo;
    const double p2 = a.lo * b.hi;
    const double p3 = a.hi * b.lo;
    const double p4 = a.hi * b.hi;
    return {std::min(std::min(p1, p2), std::min(p3, p4)),
            std::max(std::max(p1, p2), std::max(p3, p4))};
}

inline Interval operator*(double s, const Interval& a) { return Interval::point(s) * a; }

inline Interval operator/(const Interval& a, const Interval& b) {
    if (b.lo <= 0.0 && b.hi >= 0.0) {
        throw DivisionByZeroInterval("Interval division: divisor contains zero.");
    }
    const double p1 = a.lo / b.lo;
    const double p2 = a.lo / b.hi;
    const double p3 = a.hi / b.lo;
    const double p4 = a.hi / b.hi;
    return {std::min(std::min(p1, p2), std::min(p3, p4)),
            std::max(std::max(p1, p2), std::max(p3, p4))};
}

enum class IvOp { Add, Sub, Mul, Div };

/// Exact interval extension of a single arithmetic operation.
inline Interval iv_arith(IvOp op, const Interval& a, const Interval& b) {
    switch (op) {
        case IvOp::Add: return a + b;
        case IvOp::Sub: return a - b;
        case IvOp::Mul: return a * b;
        case IvOp::Div: return a / b;
    }
    throw std::logic_error("iv_arith: unreachable");
}

/// Axis-aligned box, stored as coordinatewise bounds.
struct Box {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;

    Box() = default;
    Box(Eigen::VectorXd lo_, Eigen::VectorXd hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
        if (lo.size() != hi.size()) {
            throw DimensionMismatch("Box: bound vectors differ in length.");
        }
        for (Eigen::Index i = 0; i < lo.size(); ++i) {
            if (!(lo(i) <= hi(i))) {
                throw DimensionMismatch("Box: lower bound exceeds upper bound.");
            }
        }
    }

    Eigen::Index dim() const { return lo.size(); }
    Interval coord(Eigen::Index i) const { return {lo(i), hi(i)}; }
    Eigen::VectorXd mid() const { return 0.5 * (lo + hi); }
    Eigen::VectorXd rad() const { return 0.5 * (hi - lo); }
    bool contains(const Eigen::VectorXd& x, double tol = 0.0) const {
        if (x.size() != lo.size()) return false;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            if (x(i) < lo(i) - tol || x(i) > hi(i) + tol) return false;
        }
        return true;
    }
    bool contains(const Box& other, double tol = 0.0) const {
        for (Eigen::Index i = 0; i < lo.size(); ++i) {
            if (other.lo(i) < lo(i) - tol || other.hi(i) > hi(i) + tol) return false;
        }
        return true;
    }
    double volume() const {
        double v = 1.0;
        for (Eigen::Index i = 0; i < lo.size(); ++i) v *= hi(i) - lo(i);
        return v;
    }
};

/// Interval matrix given by elementwise bounds.
struct IntervalMatrix {
    Eigen::MatrixXd lo;
    Eigen::MatrixXd hi;

    IntervalMatrix() = default;
    IntervalMatrix(Eigen::MatrixXd lo_, Eigen::MatrixXd hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
        if (lo.rows() != hi.rows() || lo.cols() != hi.cols()) {
            throw DimensionMismatch("IntervalMatrix: bound matrices differ in shape.");
        }
        if (((hi - lo).array() < 0.0).any()) {
            throw DimensionMismatch("IntervalMatrix: lower bound exceeds upper bound.");
        }
    }
    static IntervalMatrix exact(const Eigen::MatrixXd& m) { return {m, m}; }

    Eigen::Index rows() const { return lo.rows(); }
    Eigen::Index cols() const { return lo.cols(); }
    Eigen::MatrixXd center() const { return 0.5 * (lo + hi); }
    Eigen::MatrixXd radius() const { return 0.5 * (hi - lo); }
    Interval coeff(Eigen::Index i, Eigen::Index j) const { return {lo(i, j), hi(i, j)}; }
};

} // namespace czreach

#endif
