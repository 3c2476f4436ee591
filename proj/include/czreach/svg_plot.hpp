#ifndef CZREACH_SVG_PLOT_HPP
#define CZREACH_SVG_PLOT_HPP

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "czreach/constrained_zonotope.hpp"
#include "czreach/errors.hpp"
#include "czreach/json_io.hpp"
#include "czreach/reach.hpp"
#include "czreach/verify.hpp"

namespace czreach {

namespace detail {

inline std::string fmt_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

/// Outer polygon of the (i, j)-projection from support values in `dirs`
/// evenly spread directions: the intersection of the supporting halfspaces,
/// with vertices at consecutive constraint boundaries.
inline std::vector<Eigen::Vector2d> projection_polygon(const ConstrainedZonotope& Z,
                                                       Eigen::Index di, Eigen::Index dj,
                                                       int dirs = 64) {
    std::vector<double> support(static_cast<std::size_t>(dirs));
    std::vector<Eigen::Vector2d> normal(static_cast<std::size_t>(dirs));
    for (int k = 0; k < dirs; ++k) {
        const double theta = 2.0 * M_PI * k / dirs;
        Eigen::VectorXd d = Eigen::VectorXd::Zero(Z.dim());
        d(di) = std::cos(theta);
        d(dj) = std::sin(theta);
        support[static_cast<std::size_t>(k)] = support_bound(Z, d).hi;
        normal[static_cast<std::size_t>(k)] = {std::cos(theta), std::sin(theta)};
    }
    std::vector<Eigen::Vector2d> poly;
    poly.reserve(static_cast<std::size_t>(dirs));
    for (int k = 0; k < dirs; ++k) {
        const int k2 = (k + 1) % dirs;
        const Eigen::Vector2d& n1 = normal[static_cast<std::size_t>(k)];
        const Eigen::Vector2d& n2 = normal[static_cast<std::size_t>(k2)];
        Eigen::Matrix2d M;
        M << n1.transpose(), n2.transpose();
        const double det = M.determinant();
        if (std::abs(det) < 1e-12) continue;
        poly.push_back(M.inverse() * Eigen::Vector2d(support[static_cast<std::size_t>(k)],
                                                     support[static_cast<std::size_t>(k2)]));
    }
    return poly;
}

struct PlotTransform {
    double x0, y0, sx, sy, height;
    double px(double x) const { return (x - x0) * sx; }
    double py(double y) const { return height - (y - y0) * sy; }
};

inline std::string polygon_tag(const std::vector<Eigen::Vector2d>& poly, const PlotTransform& tr,
                               const std::string& style) {
    std::ostringstream os;
    os << "  <polygon points=\"";
    for (std::size_t k = 0; k < poly.size(); ++k) {
        if (k) os << " ";
        os << fmt_num(tr.px(poly[k].x())) << "," << fmt_num(tr.py(poly[k].y()));
    }
    os << "\" " << style << "/>\n";
    return os.str();
}

} // namespace detail

struct PlotStyle {
    int directions = 64;
    double width = 640.0;
    double height = 480.0;
    double margin = 32.0;
};

/// Renders the (dim_i, dim_j)-projection outlines of the reach sets per step,
/// the initial set and unsafe sets shaded, and optional sample overlays.
/// Projections are outer approximations from support sampling.
inline std::string render_reach_svg(const ReachResult& reach, Eigen::Index dim_i,
                                    Eigen::Index dim_j,
                                    const std::vector<UnsafeSet>& unsafe_sets = {},
                                    const std::vector<Eigen::Vector2d>& samples = {},
                                    const PlotStyle& style = {}) {
    if (reach.steps.empty()) throw DimensionError("plot: empty reach result.");
    const auto n = reach.dim();
    if (n < 2) throw DimensionError("plot: need at least 2 state dimensions.");
    if (dim_i < 0 || dim_j < 0 || dim_i >= n || dim_j >= n || dim_i == dim_j) {
        throw DimensionError("plot: invalid projection dimensions.");
    }

    std::vector<std::vector<std::vector<Eigen::Vector2d>>> step_polys(reach.steps.size());
    std::vector<std::size_t> skipped_steps;
    double min_x = 1e300, max_x = -1e300, min_y = 1e300, max_y = -1e300;
    auto grow = [&](const std::vector<Eigen::Vector2d>& poly) {
        for (const auto& p : poly) {
            min_x = std::min(min_x, p.x());
            max_x = std::max(max_x, p.x());
            min_y = std::min(min_y, p.y());
            max_y = std::max(max_y, p.y());
        }
    };
    for (std::size_t t = 0; t < reach.steps.size(); ++t) {
        if (reach.steps[t].empty()) {
            skipped_steps.push_back(t);
            continue;
        }
        for (const auto& member : reach.steps[t].members) {
            auto poly = detail::projection_polygon(member, dim_i, dim_j, style.directions);
            grow(poly);
            step_polys[t].push_back(std::move(poly));
        }
    }
    std::vector<std::vector<Eigen::Vector2d>> obstacle_polys;
    for (const auto& o : unsafe_sets) {
        auto poly = detail::projection_polygon(o.region, dim_i, dim_j, style.directions);
        grow(poly);
        obstacle_polys.push_back(std::move(poly));
    }
    for (const auto& p : samples) {
        min_x = std::min(min_x, p.x());
        max_x = std::max(max_x, p.x());
        min_y = std::min(min_y, p.y());
        max_y = std::max(max_y, p.y());
    }
    if (min_x > max_x) throw DimensionError("plot: nothing to draw.");

    const double span_x = std::max(max_x - min_x, 1e-9);
    const double span_y = std::max(max_y - min_y, 1e-9);
    detail::PlotTransform tr;
    tr.x0 = min_x - 0.05 * span_x;
    tr.y0 = min_y - 0.05 * span_y;
    tr.sx = (style.width - 2 * style.margin) / (1.1 * span_x);
    tr.sy = (style.height - 2 * style.margin) / (1.1 * span_y);
    tr.height = style.height;

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::fmt_num(style.width)
       << "\" height=\"" << detail::fmt_num(style.height) << "\">\n";
    os << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (const auto& poly : obstacle_polys) {
        os << detail::polygon_tag(poly, tr,
                                  "fill=\"magenta\" fill-opacity=\"0.35\" stroke=\"magenta\"");
    }
    // Initial set shaded.
    for (const auto& poly : step_polys[0]) {
        os << detail::polygon_tag(poly, tr, "fill=\"cyan\" fill-opacity=\"0.5\" stroke=\"teal\"");
    }
    const bool dashed = !reach.exact_sets;
    for (std::size_t t = 1; t < step_polys.size(); ++t) {
        for (const auto& poly : step_polys[t]) {
            std::string stroke = "fill=\"none\" stroke=\"blue\" stroke-width=\"1\"";
            if (dashed) stroke += " stroke-dasharray=\"4 2\"";
            os << detail::polygon_tag(poly, tr, stroke);
        }
    }
    for (const std::size_t t : skipped_steps) {
        os << "  <!-- step " << t << " skipped: no members -->\n";
    }
    for (const auto& p : samples) {
        os << "  <circle cx=\"" << detail::fmt_num(tr.px(p.x())) << "\" cy=\""
           << detail::fmt_num(tr.py(p.y())) << "\" r=\"1.2\" fill=\"red\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

inline void plot_reach(const ReachResult& reach, Eigen::Index dim_i, Eigen::Index dim_j,
                       const std::filesystem::path& out,
                       const std::vector<UnsafeSet>& unsafe_sets = {},
                       const std::vector<Eigen::Vector2d>& samples = {},
                       const PlotStyle& style = {}) {
    write_file_atomic(out, render_reach_svg(reach, dim_i, dim_j, unsafe_sets, samples, style));
}

} // namespace czreach

#endif
