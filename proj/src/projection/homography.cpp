#include "cobot/projection/homography.hpp"

#include <cmath>
#include <string>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "cobot/error.hpp"

namespace cobot::projection {

namespace {

constexpr double kSingular = 1e-12;

Homography normalized(Eigen::Matrix3d m) {
    if (std::abs(m(2, 2)) < kSingular) {
        throw Error("E_DEGENERATE", "homography cannot be normalized (h33 ~ 0)");
    }
    m /= m(2, 2);
    if (std::abs(m.determinant()) <= kSingular) {
        throw Error("E_DEGENERATE", "homography is singular");
    }
    return Homography{m};
}

// Similarity moving the centroid to the origin with mean distance sqrt(2).
template <class Get>
Eigen::Matrix3d conditioning(std::span<const Correspondence> pairs, Get get) {
    double cx = 0.0, cy = 0.0;
    for (const auto& c : pairs) {
        cx += get(c).x;
        cy += get(c).y;
    }
    cx /= static_cast<double>(pairs.size());
    cy /= static_cast<double>(pairs.size());
    double mean = 0.0;
    for (const auto& c : pairs) {
        mean += std::hypot(get(c).x - cx, get(c).y - cy);
    }
    mean /= static_cast<double>(pairs.size());
    if (mean < kSingular) {
        throw Error("E_DEGENERATE", "all points coincide");
    }
    const double s = std::sqrt(2.0) / mean;
    Eigen::Matrix3d t;
    t << s, 0, -s * cx, 0, s, -s * cy, 0, 0, 1;
    return t;
}

bool collinear(Point2 a, Point2 b, Point2 c, double scale) {
    const double cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    return std::abs(cross) <= 1e-9 * scale * scale;
}

void reject_collinear_triples(std::span<const Correspondence> pairs) {
    for (int side = 0; side < 2; ++side) {
        auto pt = [side](const Correspondence& c) { return side == 0 ? c.from : c.to; };
        double scale = 0.0;
        for (const auto& c : pairs) {
            scale = std::max({scale, std::abs(pt(c).x), std::abs(pt(c).y)});
        }
        scale = std::max(scale, 1.0);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            for (std::size_t j = i + 1; j < pairs.size(); ++j) {
                for (std::size_t k = j + 1; k < pairs.size(); ++k) {
                    if (collinear(pt(pairs[i]), pt(pairs[j]), pt(pairs[k]), scale)) {
                        throw Error("E_DEGENERATE", "points " + std::to_string(i) + ", " + std::to_string(j) +
                                                        ", " + std::to_string(k) + " are collinear");
                    }
                }
            }
        }
    }
}

} // namespace

Homography Homography::translation(double dx, double dy) {
    Homography h;
    h.m(0, 2) = dx;
    h.m(1, 2) = dy;
    return h;
}

Homography Homography::inverse() const {
    if (std::abs(m.determinant()) <= kSingular) {
        throw Error("E_DEGENERATE", "homography is singular");
    }
    return normalized(m.inverse());
}

Homography estimate_homography(std::span<const Correspondence> pairs) {
    if (pairs.size() < 4) {
        throw Error("E_DEGENERATE", "homography needs at least 4 correspondences, got " +
                                        std::to_string(pairs.size()));
    }
    if (pairs.size() == 4) {
        reject_collinear_triples(pairs);
    }

    const Eigen::Matrix3d t_from = conditioning(pairs, [](const Correspondence& c) { return c.from; });
    const Eigen::Matrix3d t_to = conditioning(pairs, [](const Correspondence& c) { return c.to; });

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * static_cast<Eigen::Index>(pairs.size()), 9);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const Eigen::Vector3d p = t_from * Eigen::Vector3d(pairs[i].from.x, pairs[i].from.y, 1.0);
        const Eigen::Vector3d q = t_to * Eigen::Vector3d(pairs[i].to.x, pairs[i].to.y, 1.0);
        const auto r = 2 * static_cast<Eigen::Index>(i);
        a.row(r) << -p.x(), -p.y(), -1.0, 0.0, 0.0, 0.0, q.x() * p.x(), q.x() * p.y(), q.x();
        a.row(r + 1) << 0.0, 0.0, 0.0, -p.x(), -p.y(), -1.0, q.y() * p.x(), q.y() * p.y(), q.y();
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    // A well-posed system has a one-dimensional null space: the second
    // smallest singular value must stay clear of zero.
    if (sv(7) <= 1e-10 * sv(0)) {
        throw Error("E_DEGENERATE", "correspondences do not determine a homography (rank deficient)");
    }
    const Eigen::VectorXd h = svd.matrixV().col(8);
    Eigen::Matrix3d hn;
    hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
    return normalized(t_to.inverse() * hn * t_from);
}

Point2 project_point(const Homography& h, Point2 p) {
    const Eigen::Vector3d q = h.m * Eigen::Vector3d(p.x, p.y, 1.0);
    if (std::abs(q.z()) < kSingular) {
        throw Error("E_POINT_AT_INFINITY", "point maps to infinity");
    }
    return {q.x() / q.z(), q.y() / q.z()};
}

double mean_reprojection_error(const Homography& h, std::span<const Correspondence> pairs) {
    double sum = 0.0;
    for (const auto& c : pairs) {
        const auto q = project_point(h, c.from);
        sum += std::hypot(q.x - c.to.x, q.y - c.to.y);
    }
    return pairs.empty() ? 0.0 : sum / static_cast<double>(pairs.size());
}

} // namespace cobot::projection
