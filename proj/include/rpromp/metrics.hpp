#pragma once

#include "rpromp/manifold.hpp"

#include <vector>

namespace rpromp {

/// Discrete integral of squared jerk, summed over components:
/// sum_k |D3 y_k|^2 / dt^6 * dt, where D3 is the third difference
/// y_{k+3} - 3 y_{k+2} + 3 y_{k+1} - y_k (centred between samples k+1 and k+2).
/// Rows of `samples` are time steps. Needs >= 4 uniformly spaced samples.
double jerkiness(const Eigen::MatrixXd& samples, const Eigen::VectorXd& times);
double jerkiness(const std::vector<Point>& traj, const Eigen::VectorXd& times);

/// Geodesic distance to the target at the sample whose phase is nearest z.
double tracking_accuracy(const Manifold& M, const std::vector<Point>& traj, const Eigen::VectorXd& phases, double z,
                         const Point& target);

/// Sum of per-step geodesic distances between two equally long trajectories.
double deviation_from_mean(const Manifold& M, const std::vector<Point>& traj, const std::vector<Point>& reference);

Eigen::MatrixXd to_matrix(const std::vector<Point>& traj);

}  // namespace rpromp
