#include "permqubo/instances.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace permqubo {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  return s;
}

// Published optima for a few TSPLIB instances in the EUC_2D metric.
std::optional<double> lookup_known_optimum(const std::string& name) {
  static const std::map<std::string, double> table = {
      {"berlin52", 7542}, {"eil51", 426}, {"st70", 675},     {"eil76", 538},
      {"pr76", 108159},   {"rat99", 1211}, {"kroA100", 21282}, {"eil101", 629},
  };
  auto it = table.find(name);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

}  // namespace

double euc2d_distance(const Point& a, const Point& b) noexcept {
  return std::floor(std::hypot(a.x - b.x, a.y - b.y) + 0.5);
}

Matrix euc2d_matrix(const std::vector<Point>& points) {
  const std::size_t n = points.size();
  Matrix d = Matrix::square(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d(i, j) = d(j, i) = euc2d_distance(points[i], points[j]);
  return d;
}

TspInstance TspInstance::from_points(std::string name, std::vector<Point> points) {
  TspInstance inst;
  inst.name = std::move(name);
  inst.dist = euc2d_matrix(points);
  inst.coords = std::move(points);
  return inst;
}

TspInstance TspInstance::from_matrix(std::string name, Matrix dist) {
  require(dist.is_square(), ErrorKind::Dimension, "distance matrix must be square");
  for (std::size_t i = 0; i < dist.rows(); ++i) dist(i, i) = 0.0;
  TspInstance inst;
  inst.name = std::move(name);
  inst.dist = std::move(dist);
  return inst;
}

TspInstance parse_tsplib(std::istream& in) {
  std::string name;
  std::string weight_type;
  std::string weight_format;
  long dimension = -1;
  std::vector<Point> coords;
  std::vector<double> weights;
  bool saw_coords = false;
  bool saw_weights = false;

  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty()) continue;
    std::string key = t;
    std::string value;
    if (auto colon = t.find(':'); colon != std::string::npos) {
      key = trim(t.substr(0, colon));
      value = trim(t.substr(colon + 1));
    }
    key = upper(key);

    if (key == "EOF") break;
    if (key == "NAME") {
      name = value;
    } else if (key == "DIMENSION") {
      try {
        dimension = std::stol(value);
      } catch (const std::exception&) {
        fail(ErrorKind::MalformedInput, "bad DIMENSION '" + value + "'");
      }
      require(dimension > 0, ErrorKind::MalformedInput, "DIMENSION must be positive");
    } else if (key == "EDGE_WEIGHT_TYPE") {
      weight_type = upper(value);
      if (weight_type != "EUC_2D" && weight_type != "EXPLICIT")
        fail(ErrorKind::UnsupportedFormat, "EDGE_WEIGHT_TYPE " + value);
    } else if (key == "EDGE_WEIGHT_FORMAT") {
      weight_format = upper(value);
    } else if (key == "NODE_COORD_SECTION") {
      require(dimension > 0, ErrorKind::MalformedInput, "NODE_COORD_SECTION before DIMENSION");
      saw_coords = true;
      // Read until a non-numeric line or dimension entries.
      while (static_cast<long>(coords.size()) < dimension) {
        auto pos = in.tellg();
        if (!std::getline(in, line)) break;
        std::istringstream ls(line);
        double id = 0, x = 0, y = 0;
        if (!(ls >> id >> x >> y)) {
          if (trim(line).empty()) continue;
          in.seekg(pos);
          break;
        }
        coords.push_back({x, y});
      }
    } else if (key == "EDGE_WEIGHT_SECTION") {
      require(dimension > 0, ErrorKind::MalformedInput, "EDGE_WEIGHT_SECTION before DIMENSION");
      saw_weights = true;
      const auto want = static_cast<std::size_t>(dimension * dimension);
      double w = 0;
      while (weights.size() < want && in >> w) weights.push_back(w);
      if (weights.size() < want) in.clear();
    } else if (key == "TYPE" || key == "COMMENT" || key == "DISPLAY_DATA_TYPE" || key == "NODE_COORD_TYPE") {
      // informational
    } else if (key == "DISPLAY_DATA_SECTION" || key == "TOUR_SECTION" || key == "FIXED_EDGES_SECTION") {
      fail(ErrorKind::UnsupportedFormat, key);
    }
  }

  require(dimension > 0, ErrorKind::MalformedInput, "missing DIMENSION");
  require(!weight_type.empty(), ErrorKind::MalformedInput, "missing EDGE_WEIGHT_TYPE");
  const auto n = static_cast<std::size_t>(dimension);

  TspInstance inst;
  if (weight_type == "EUC_2D") {
    require(saw_coords, ErrorKind::MalformedInput, "missing NODE_COORD_SECTION");
    require(coords.size() == n, ErrorKind::MalformedInput,
            "DIMENSION " + std::to_string(n) + " but " + std::to_string(coords.size()) + " coordinates");
    inst = TspInstance::from_points(name, std::move(coords));
  } else {
    if (!weight_format.empty() && weight_format != "FULL_MATRIX")
      fail(ErrorKind::UnsupportedFormat, "EDGE_WEIGHT_FORMAT " + weight_format);
    require(saw_weights, ErrorKind::MalformedInput, "missing EDGE_WEIGHT_SECTION");
    require(weights.size() == n * n, ErrorKind::MalformedInput, "EDGE_WEIGHT_SECTION has wrong entry count");
    Matrix d = Matrix::square(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d(i, j) = weights[i * n + j];
    inst = TspInstance::from_matrix(name, std::move(d));
  }
  inst.known_optimum = lookup_known_optimum(inst.name);
  return inst;
}

TspInstance parse_tsplib(const std::string& text) {
  std::istringstream in(text);
  return parse_tsplib(in);
}

FspInstance parse_fsp(std::istream& in) {
  std::vector<double> tokens;
  std::string tok;
  while (in >> tok) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      fail(ErrorKind::MalformedInput, "non-numeric token '" + tok + "'");
    }
    require(used == tok.size(), ErrorKind::MalformedInput, "non-numeric token '" + tok + "'");
    tokens.push_back(v);
  }
  require(tokens.size() >= 2, ErrorKind::MalformedInput, "missing 'n m' header");
  const double nj = tokens[0];
  const double nm = tokens[1];
  require(nj >= 1 && nm >= 1 && nj == std::floor(nj) && nm == std::floor(nm), ErrorKind::MalformedInput,
          "header must be two positive integers");
  const auto n = static_cast<std::size_t>(nj);
  const auto m = static_cast<std::size_t>(nm);
  require(tokens.size() == 2 + n * m, ErrorKind::MalformedInput,
          "expected " + std::to_string(n * m) + " processing times, got " + std::to_string(tokens.size() - 2));
  FspInstance inst;
  inst.times = Matrix(n, m);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) {
      double t = tokens[2 + j * m + i];
      require(t >= 0.0, ErrorKind::Domain, "negative processing time");
      inst.times(j, i) = t;
    }
  return inst;
}

FspInstance parse_fsp(const std::string& text) {
  std::istringstream in(text);
  return parse_fsp(in);
}

std::string write_fsp(const FspInstance& inst) {
  std::ostringstream out;
  out << inst.jobs() << ' ' << inst.machines() << '\n';
  for (std::size_t j = 0; j < inst.jobs(); ++j) {
    for (std::size_t i = 0; i < inst.machines(); ++i) {
      if (i) out << ' ';
      out << inst.times(j, i);
    }
    out << '\n';
  }
  return out.str();
}

namespace {
std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open " + path);
  return in;
}

std::string stem(const std::string& path) {
  auto slash = path.find_last_of("/\\");
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  auto dot = base.find_last_of('.');
  return dot == std::string::npos ? base : base.substr(0, dot);
}
}  // namespace

TspInstance load_tsp_file(const std::string& path) {
  auto in = open_or_throw(path);
  auto inst = parse_tsplib(in);
  if (inst.name.empty()) {
    inst.name = stem(path);
    inst.known_optimum = lookup_known_optimum(inst.name);
  }
  return inst;
}

FspInstance load_fsp_file(const std::string& path) {
  auto in = open_or_throw(path);
  auto inst = parse_fsp(in);
  inst.name = stem(path);
  return inst;
}

Permutation parse_tour_list(std::istream& in) {
  Permutation p;
  long v = 0;
  while (in >> v) {
    if (v == -1) break;
    require(v >= 1, ErrorKind::MalformedInput, "tour entries are 1-based");
    p.push_back(static_cast<int>(v - 1));
  }
  require(is_permutation(p, p.size()), ErrorKind::InvalidSolution, "tour list is not a permutation");
  return p;
}

double tour_length(const Matrix& dist, std::span<const int> tour) {
  const std::size_t n = dist.rows();
  require(is_permutation(tour, n), ErrorKind::InvalidSolution, "tour is not a permutation of 0..n-1");
  double len = 0.0;
  for (std::size_t j = 0; j < n; ++j) len += dist(tour[j], tour[(j + 1) % n]);
  return len;
}

double path_length(const Matrix& dist, std::span<const int> path) {
  const std::size_t n = dist.rows();
  require(is_permutation(path, n), ErrorKind::InvalidSolution, "path is not a permutation of 0..n-1");
  double len = 0.0;
  for (std::size_t j = 0; j + 1 < n; ++j) len += dist(path[j], path[j + 1]);
  return len;
}

}  // namespace permqubo
