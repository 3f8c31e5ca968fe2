#pragma once

#include "rpromp/orientation_promp.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rpromp {

/// Synthetic demonstration generators. Every demo is the same nominal motion
/// perturbed by a smooth per-demo tangent-space offset a_0 / 2 +
/// sum_{k=1..3} a_k sin(k pi s), a_k ~ N(0, noise^2), plus a duration jitter
/// of the same relative size. noise == 0 gives identical demos.
struct SynthOptions {
  int demos = 4;
  int samples = 100;
  double duration = 2.0;   // seconds
  double noise = 0.05;     // radians (orientation / letter tangent) and 0.2 * noise metres (position)
  double angle_deg = 90.0; // total rotation of the pose skills
  double radius = 1.2;     // lift radius of 2D curves on S^2
  std::optional<double> scale;  // explicit 2D scale for import-2d (overrides radius)
  char letter = 'S';            // one of S, I, J, G
  std::uint64_t seed = 1;
};

struct SynthDataset {
  Manifold manifold;
  std::vector<ManifoldDemo> demos;
};

/// Point on the unit-size letter outline at arc parameter s in [0, 1].
Eigen::Vector2d letter_point(char letter, double s);

/// Centres a 2D curve (bounding-box midpoint), scales it into a disc of the
/// given radius (or by `scale` when set) and maps it to S^2 with the
/// exponential map at the north pole (0, 0, 1). Tangent coordinates there are
/// (x, y). Throws std::invalid_argument if any scaled point reaches pi.
std::vector<Point> lift_2d(const Eigen::MatrixXd& curve, double radius, std::optional<double> scale = std::nullopt);

/// Letter on S^2.
SynthDataset synth_letter(const SynthOptions& options);

/// Full-pose R3xS3 skill: a reaching arc while the gripper rotates by
/// angle_deg about a fixed tilted axis.
SynthDataset synth_reorient(const SynthOptions& options);

/// Full-pose R3xS3 skill: short approach, then rotation by angle_deg about the
/// tool axis while the position is held.
SynthDataset synth_keyturn(const SynthOptions& options);

/// Lifts an imported 2D curve (T x 2, or T x 3 with a leading time column)
/// to S^2 and replicates it with noise.
SynthDataset synth_import(const Eigen::MatrixXd& curve, const SynthOptions& options);

/// kind: letter-curve, reorient-like, key-turn-like.
SynthDataset synthesize(const std::string& kind, const SynthOptions& options);

/// Splits R3xS3 demos into position and quaternion parts.
FullPoseDemo to_fullpose(const ManifoldDemo& demo);
ManifoldDemo orientation_part(const ManifoldDemo& demo);

}  // namespace rpromp
