#include "rpromp/io.hpp"

#include "rpromp/errors.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace rpromp {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, sep)) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  return out;
}

bool parse_double(const std::string& s, double& v) {
  if (s.empty()) return false;
  char* end = nullptr;
  v = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw std::invalid_argument(path + ": " + what);
}

json vec(const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json mat(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vec(m.row(i).transpose()));
  return rows;
}

VectorXd to_vec(const json& j, const char* field) {
  if (!j.is_array()) throw std::invalid_argument(std::string("model field '") + field + "' is not an array");
  VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

MatrixXd to_mat(const json& j, const char* field) {
  if (!j.is_array()) throw std::invalid_argument(std::string("model field '") + field + "' is not an array");
  if (j.empty()) return {};
  MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j[0].size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i].size() != j[0].size()) throw std::invalid_argument(std::string("model field '") + field + "' is ragged");
    m.row(static_cast<Eigen::Index>(i)) = to_vec(j[i], field).transpose();
  }
  return m;
}

const json& field(const json& j, const char* name) {
  if (!j.contains(name)) throw std::invalid_argument(std::string("model file lacks field '") + name + "'");
  return j.at(name);
}

json basis_json(const BasisConfig& b) {
  return {{"n_basis", b.n_basis}, {"width", b.width}, {"centers", vec(b.centers)}};
}

BasisConfig basis_from(const json& j) {
  BasisConfig b;
  b.n_basis = field(j, "n_basis").get<int>();
  b.width = field(j, "width").get<double>();
  b.centers = to_vec(field(j, "centers"), "centers");
  b.validate();
  return b;
}

json gaussian_json(const EuclideanGaussian& g) { return {{"mean", vec(g.mean)}, {"cov", mat(g.cov)}}; }

EuclideanGaussian gaussian_from(const json& j) {
  return {to_vec(field(j, "mean"), "mean"), to_mat(field(j, "cov"), "cov")};
}

json euclidean_json(const EuclideanPromp& m) {
  return {{"type", "euclidean"},     {"basis", basis_json(m.basis)}, {"dim", m.dim},
          {"weights", gaussian_json(m.weights)}, {"noise", mat(m.noise)}, {"mean_duration", m.mean_duration}};
}

EuclideanPromp euclidean_from(const json& j) {
  EuclideanPromp m;
  m.basis = basis_from(field(j, "basis"));
  m.dim = field(j, "dim").get<int>();
  m.weights = gaussian_from(field(j, "weights"));
  m.noise = to_mat(field(j, "noise"), "noise");
  m.mean_duration = field(j, "mean_duration").get<double>();
  if (m.weights.mean.size() != m.dim * m.basis.n_basis) throw std::invalid_argument("model weights have the wrong size");
  return m;
}

json orientation_json(const OrientationPromp& m) {
  return {{"type", "riemannian"},
          {"manifold", m.manifold.tag()},
          {"basis", basis_json(m.basis)},
          {"base", vec(m.base)},
          {"weights", gaussian_json(m.weights)},
          {"noise", mat(m.noise)},
          {"mean_duration", m.mean_duration}};
}

OrientationPromp orientation_from(const json& j) {
  OrientationPromp m;
  m.manifold = Manifold::parse(field(j, "manifold").get<std::string>());
  m.basis = basis_from(field(j, "basis"));
  m.base = to_vec(field(j, "base"), "base");
  m.manifold.check_point(m.base, 1e-9);
  m.weights = gaussian_from(field(j, "weights"));
  m.noise = to_mat(field(j, "noise"), "noise");
  m.mean_duration = field(j, "mean_duration").get<double>();
  if (m.weights.mean.size() != m.manifold.dim() * m.basis.n_basis) {
    throw std::invalid_argument("model weights have the wrong size");
  }
  return m;
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> column_names(const Manifold& M) {
  const std::string tag = M.tag();
  if (tag == "S2") return {"x", "y", "z"};
  if (tag == "S3") return {"qw", "qx", "qy", "qz"};
  if (tag == "R3xS3") return {"x", "y", "z", "qw", "qx", "qy", "qz"};
  if (tag == "R3") return {"x", "y", "z"};
  if (M.is_euclidean() && M.factors().size() == 1) {
    std::vector<std::string> names;
    for (int i = 0; i < M.dim(); ++i) names.push_back("c" + std::to_string(i));
    return names;
  }
  throw std::invalid_argument("no trajectory file layout for manifold " + tag);
}

void write_trajectory(std::ostream& out, const Manifold& M, const ManifoldDemo& demo) {
  if (demo.points.size() != static_cast<std::size_t>(demo.times.size())) {
    throw std::invalid_argument("write_trajectory: times and points differ in length");
  }
  const auto names = column_names(M);
  out << "# rpromp-trajectory manifold=" << M.tag() << " samples=" << demo.points.size() << "\n";
  out << "time";
  for (const auto& n : names) out << "," << n;
  out << "\n";
  for (std::size_t t = 0; t < demo.points.size(); ++t) {
    if (demo.points[t].size() != M.ambient_dim()) throw std::invalid_argument("write_trajectory: wrong point size");
    out << format_number(demo.times(static_cast<Eigen::Index>(t)));
    for (Eigen::Index i = 0; i < demo.points[t].size(); ++i) out << "," << format_number(demo.points[t](i));
    out << "\n";
  }
}

void write_trajectory(const std::string& path, const Manifold& M, const ManifoldDemo& demo) {
  auto out = open_out(path);
  write_trajectory(out, M, demo);
  if (!out) throw IoError("failed writing '" + path + "'");
}

TrajectoryFile read_trajectory(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# rpromp-trajectory", 0) != 0) {
    bad(path, "missing '# rpromp-trajectory' header line");
  }
  std::string tag;
  long samples = -1;
  for (const auto& tok : split(line.substr(1), ' ')) {
    if (tok.rfind("manifold=", 0) == 0) tag = tok.substr(9);
    if (tok.rfind("samples=", 0) == 0) {
      double v = 0.0;
      if (!parse_double(tok.substr(8), v) || v < 0) bad(path, "field 'samples' is not a count");
      samples = static_cast<long>(v);
    }
  }
  if (tag.empty()) bad(path, "header lacks field 'manifold'");
  TrajectoryFile file{Manifold::euclidean(1), {}, {}};
  try {
    file.manifold = Manifold::parse(tag);
  } catch (const std::invalid_argument&) {
    bad(path, "unknown manifold tag '" + tag + "'");
  }
  std::vector<std::string> expected{"time"};
  for (const auto& n : column_names(file.manifold)) expected.push_back(n);
  if (!std::getline(in, line) || split(line, ',') != expected) bad(path, "column header does not match manifold " + tag);

  std::vector<double> times;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line == "\r") continue;
    ++row;
    const auto cells = split(line, ',');
    if (cells.size() != expected.size()) {
      bad(path, "row " + std::to_string(row) + " has " + std::to_string(cells.size()) + " columns, expected " +
                    std::to_string(expected.size()));
    }
    double t = 0.0;
    if (!parse_double(cells[0], t)) bad(path, "row " + std::to_string(row) + " field 'time' is not a number");
    Point x(file.manifold.ambient_dim());
    for (std::size_t i = 1; i < cells.size(); ++i) {
      double v = 0.0;
      if (!parse_double(cells[i], v) || !std::isfinite(v)) {
        bad(path, "row " + std::to_string(row) + " field '" + expected[i] + "' is not a finite number");
      }
      x(static_cast<Eigen::Index>(i - 1)) = v;
    }
    int offset = 0;
    for (const auto& f : file.manifold.factors()) {
      if (f.kind == FactorKind::Sphere) {
        const double n = x.segment(offset, f.ambient_dim()).norm();
        if (!(n > 0.0)) bad(path, "row " + std::to_string(row) + " has a zero-norm sphere component");
        if (std::abs(n - 1.0) > 1e-6) {
          file.warnings.push_back(path + ": row " + std::to_string(row) + " renormalized (norm " + format_number(n) + ")");
        }
        if (std::abs(n - 1.0) > 1e-12) x.segment(offset, f.ambient_dim()) /= n;
      }
      offset += f.ambient_dim();
    }
    times.push_back(t);
    file.demo.points.push_back(std::move(x));
  }
  if (samples >= 0 && static_cast<std::size_t>(samples) != times.size()) {
    bad(path, "header says samples=" + std::to_string(samples) + " but file has " + std::to_string(times.size()) + " rows");
  }
  if (times.size() < 2) bad(path, "need at least two samples");
  file.demo.times = Eigen::Map<VectorXd>(times.data(), static_cast<Eigen::Index>(times.size()));
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (times[i] < times[i - 1]) bad(path, "field 'time' decreases at row " + std::to_string(i + 1));
  }
  return file;
}

MatrixXd read_curve_2d(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  std::vector<std::vector<double>> rows;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line == "\r") continue;
    const auto cells = split(line, ',');
    std::vector<double> vals;
    bool numeric = true;
    for (const auto& c : cells) {
      double v = 0.0;
      if (!parse_double(c, v)) numeric = false;
      vals.push_back(v);
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      bad(path, "row " + std::to_string(rows.size() + 1) + " is not numeric");
    }
    first = false;
    if (vals.size() != 2 && vals.size() != 3) bad(path, "expected 2 (x,y) or 3 (t,x,y) columns");
    if (!rows.empty() && vals.size() != rows.front().size()) bad(path, "inconsistent column count");
    rows.push_back(std::move(vals));
  }
  if (rows.size() < 2) bad(path, "need at least two curve points");
  MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return m;
}

json to_json(const ModelFile& file) {
  json j;
  j["format"] = "rpromp-model";
  j["version"] = 1;
  j["tag"] = file.tag;
  j["metadata"] = file.metadata;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, EuclideanPromp>) {
          j["model"] = euclidean_json(m);
        } else if constexpr (std::is_same_v<T, OrientationPromp>) {
          j["model"] = orientation_json(m);
        } else {
          j["model"] = {{"type", "fullpose"},
                        {"position", euclidean_json(m.position)},
                        {"orientation", orientation_json(m.orientation)}};
        }
      },
      file.model);
  return j;
}

ModelFile model_from_json(const json& j) {
  if (!j.is_object() || j.value("format", "") != "rpromp-model") {
    throw std::invalid_argument("not an rpromp model file (field 'format')");
  }
  ModelFile file{field(j, "tag").get<std::string>(), EuclideanPromp{}, j.value("metadata", json::object())};
  const json& m = field(j, "model");
  const std::string type = field(m, "type").get<std::string>();
  if (type == "euclidean") {
    file.model = euclidean_from(m);
  } else if (type == "riemannian") {
    file.model = orientation_from(m);
  } else if (type == "fullpose") {
    file.model = FullPosePromp{euclidean_from(field(m, "position")), orientation_from(field(m, "orientation"))};
  } else {
    throw std::invalid_argument("unknown model type '" + type + "' (field 'model.type')");
  }
  return file;
}

void save_model(const std::string& path, const ModelFile& file) {
  auto out = open_out(path);
  out << to_json(file).dump(1) << "\n";
  if (!out) throw IoError("failed writing '" + path + "'");
}

ModelFile load_model(const std::string& path) {
  auto in = open_in(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    bad(path, std::string("malformed JSON: ") + e.what());
  }
  try {
    return model_from_json(j);
  } catch (const json::exception& e) {
    bad(path, e.what());
  } catch (const std::invalid_argument& e) {
    bad(path, e.what());
  }
}

std::string file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::uint64_t h = 14695981039346656037ull;
  char c = 0;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << h;
  return ss.str();
}

void write_series(std::ostream& out, const Series& series, const std::string& format) {
  if (series.rows.cols() != static_cast<Eigen::Index>(series.columns.size())) {
    throw std::invalid_argument("write_series: column count mismatch");
  }
  if (format == "csv") {
    for (std::size_t i = 0; i < series.columns.size(); ++i) out << (i ? "," : "") << series.columns[i];
    out << "\n";
    for (Eigen::Index r = 0; r < series.rows.rows(); ++r) {
      for (Eigen::Index c = 0; c < series.rows.cols(); ++c) out << (c ? "," : "") << format_number(series.rows(r, c));
      out << "\n";
    }
  } else if (format == "json") {
    json j;
    j["columns"] = series.columns;
    j["rows"] = mat(series.rows);
    out << j.dump() << "\n";
  } else {
    throw std::invalid_argument("unknown output format '" + format + "'");
  }
}

}  // namespace rpromp
