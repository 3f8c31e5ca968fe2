#pragma once

#include "rpromp/orientation_promp.hpp"

#include "json.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace rpromp {

/// Delimited trajectory file:
///
///   # rpromp-trajectory manifold=R3xS3 samples=100
///   time,x,y,z,qw,qx,qy,qz
///   0,0.4,...
///
/// Column names per tag: R3 x,y,z; R<n> c0..c<n-1>; S2 x,y,z; S3 qw,qx,qy,qz;
/// R3xS3 x,y,z,qw,qx,qy,qz. Sphere factors off unit norm by more than 1e-6
/// are renormalized and reported in `warnings`.
struct TrajectoryFile {
  Manifold manifold;
  ManifoldDemo demo;
  std::vector<std::string> warnings;
};

std::vector<std::string> column_names(const Manifold& M);

/// Throws IoError when the file cannot be opened, std::invalid_argument
/// (message names the file and the field) on malformed content.
TrajectoryFile read_trajectory(const std::string& path);
void write_trajectory(const std::string& path, const Manifold& M, const ManifoldDemo& demo);
void write_trajectory(std::ostream& out, const Manifold& M, const ManifoldDemo& demo);

/// Reads a 2D curve: rows "x,y" or "t,x,y", an optional non-numeric header
/// line and '#' comments.
Eigen::MatrixXd read_curve_2d(const std::string& path);

using AnyPromp = std::variant<EuclideanPromp, OrientationPromp, FullPosePromp>;

struct ModelFile {
  std::string tag;  // manifold tag of the training data
  AnyPromp model;
  nlohmann::json metadata = nlohmann::json::object();
};

nlohmann::json to_json(const ModelFile& file);
ModelFile model_from_json(const nlohmann::json& j);
void save_model(const std::string& path, const ModelFile& file);
ModelFile load_model(const std::string& path);

/// 64-bit FNV-1a of the file contents, as 16 hex digits.
std::string file_checksum(const std::string& path);

/// Numeric table with named columns.
struct Series {
  std::vector<std::string> columns;
  Eigen::MatrixXd rows;
};

/// csv: header line then rows with %.17g; json: {"columns": [...], "rows": [[...]]}.
void write_series(std::ostream& out, const Series& series, const std::string& format);

std::string format_number(double v);

}  // namespace rpromp
