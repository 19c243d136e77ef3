#pragma once

#include <span>

#include <Eigen/Core>

#include "cobot/point.hpp"

namespace cobot::projection {

/// Plane-to-plane projective map, normalized so that m(2,2) == 1.
struct Homography {
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();

    static Homography identity() { return {}; }
    static Homography translation(double dx, double dy);

    /// Throws E_DEGENERATE when the matrix is (numerically) singular.
    Homography inverse() const;
};

struct Correspondence {
    Point2 from;
    Point2 to;
};

/// Normalized direct linear transform (least squares for more than four
/// pairs). Throws E_DEGENERATE for fewer than four pairs, three collinear
/// points in a minimal set, or a rank-deficient system.
Homography estimate_homography(std::span<const Correspondence> pairs);

/// Throws E_POINT_AT_INFINITY when |w| < 1e-12.
Point2 project_point(const Homography& h, Point2 p);

double mean_reprojection_error(const Homography& h, std::span<const Correspondence> pairs);

} // namespace cobot::projection
