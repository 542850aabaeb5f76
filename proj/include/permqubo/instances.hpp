#pragma once

#include <istream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "permqubo/matrix.hpp"
#include "permqubo/types.hpp"

namespace permqubo {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// TSPLIB EUC_2D metric: Euclidean distance rounded to the nearest integer.
double euc2d_distance(const Point& a, const Point& b) noexcept;
Matrix euc2d_matrix(const std::vector<Point>& points);

struct TspInstance {
  std::string name;
  std::vector<Point> coords;  // empty for explicit-matrix instances
  Matrix dist;
  std::optional<double> known_optimum;

  std::size_t size() const noexcept { return dist.rows(); }
  bool has_coords() const noexcept { return !coords.empty(); }

  static TspInstance from_points(std::string name, std::vector<Point> points);
  static TspInstance from_matrix(std::string name, Matrix dist);
};

struct FspInstance {
  std::string name;
  Matrix times;  // times(job, machine), machines in processing order
  std::optional<double> reference_makespan;

  std::size_t jobs() const noexcept { return times.rows(); }
  std::size_t machines() const noexcept { return times.cols(); }
};

/// TSPLIB subset: EUC_2D coordinates or EXPLICIT FULL_MATRIX weights.
TspInstance parse_tsplib(std::istream& in);
TspInstance parse_tsplib(const std::string& text);

/// "n m" header followed by n rows of m nonnegative processing times.
FspInstance parse_fsp(std::istream& in);
FspInstance parse_fsp(const std::string& text);
std::string write_fsp(const FspInstance& inst);

TspInstance load_tsp_file(const std::string& path);
FspInstance load_fsp_file(const std::string& path);

/// Whitespace separated permutation, 1-based as in .opt.tour files.
Permutation parse_tour_list(std::istream& in);

double tour_length(const Matrix& dist, std::span<const int> tour);
inline double tour_length(const TspInstance& inst, std::span<const int> tour) { return tour_length(inst.dist, tour); }
/// Open path: no closing edge from the last object back to the first.
double path_length(const Matrix& dist, std::span<const int> path);

}  // namespace permqubo
