#include "permqubo/fsp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "permqubo/error.hpp"

namespace permqubo {

namespace {

// Completion times of the last scheduled job on every machine, one row at a time.
double makespan_unchecked(const Matrix& t, std::span<const int> perm, std::vector<double>& row) {
  const std::size_t m = t.cols();
  row.assign(m, 0.0);
  for (int job : perm) {
    double prev = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      row[i] = std::max(row[i], prev) + t(job, i);
      prev = row[i];
    }
  }
  return m == 0 ? 0.0 : row[m - 1];
}

}  // namespace

double makespan(const FspInstance& inst, std::span<const int> perm) {
  require(is_permutation(perm, inst.jobs()), ErrorKind::InvalidSolution, "job order is not a permutation");
  std::vector<double> row;
  return makespan_unchecked(inst.times, perm, row);
}

std::string to_string(DistanceFormulation f) {
  switch (f) {
    case DistanceFormulation::ResidualSquare: return "residual-square";
    case DistanceFormulation::ResidualNoCarry: return "residual-no-carry";
    case DistanceFormulation::Spirit: return "spirit";
    case DistanceFormulation::Fshoph: return "fshoph";
  }
  return "unknown";
}

std::optional<DistanceFormulation> parse_distance_formulation(std::string_view name) {
  for (auto f : {DistanceFormulation::ResidualSquare, DistanceFormulation::ResidualNoCarry,
                 DistanceFormulation::Spirit, DistanceFormulation::Fshoph}) {
    std::string with_underscores = to_string(f);
    std::replace(with_underscores.begin(), with_underscores.end(), '-', '_');
    if (name == to_string(f) || name == with_underscores) return f;
  }
  return std::nullopt;
}

Matrix job_distance_matrix(const FspInstance& inst, DistanceFormulation f) {
  const std::size_t n = inst.jobs();
  const std::size_t m = inst.machines();
  const Matrix& t = inst.times;
  if (f == DistanceFormulation::ResidualSquare || f == DistanceFormulation::ResidualNoCarry)
    require(m >= 2, ErrorKind::Domain, "residual distances need at least two machines");
  require(m >= 1, ErrorKind::Domain, "instance has no machines");

  Matrix d = Matrix::square(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      double v = 0.0;
      switch (f) {
        case DistanceFormulation::ResidualSquare:
          for (std::size_t k = 1; k < m; ++k) {
            const double r = t(i, k) - t(j, k - 1);
            v += r * r;
          }
          break;
        case DistanceFormulation::ResidualNoCarry:
          for (std::size_t k = 1; k < m; ++k) {
            const double r = t(i, k) - t(j, k - 1);
            v += r > 0.0 ? r : -2.0 * r;
          }
          break;
        case DistanceFormulation::Spirit:
          // machines are 1-based in the weight (m - k)
          v = t(i, 0) + t(j, m - 1);
          for (std::size_t k = 1; k < m; ++k)
            v += static_cast<double>(m - (k + 1)) * std::abs(t(i, k) - t(j, k - 1));
          break;
        case DistanceFormulation::Fshoph: {
          double ubx = 0.0;
          for (std::size_t k = 0; k + 1 < m; ++k) ubx = std::max(0.0, ubx + (t(j, k) - t(i, k + 1)));
          v = ubx;
          break;
        }
      }
      d(i, j) = v;
    }
  return d;
}

ScheduleResult neh(const FspInstance& inst) {
  const std::size_t n = inst.jobs();
  require(n >= 1, ErrorKind::Domain, "NEH needs at least one job");
  std::vector<double> total(n, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < inst.machines(); ++i) total[j] += inst.times(j, i);
  std::vector<int> jobs(n);
  std::iota(jobs.begin(), jobs.end(), 0);
  std::stable_sort(jobs.begin(), jobs.end(), [&](int a, int b) { return total[a] > total[b]; });

  std::vector<int> seq;
  std::vector<int> trial;
  std::vector<double> row;
  for (int job : jobs) {
    std::size_t best_pos = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t pos = 0; pos <= seq.size(); ++pos) {
      trial = seq;
      trial.insert(trial.begin() + static_cast<long>(pos), job);
      const double c = makespan_unchecked(inst.times, trial, row);
      if (c < best) {
        best = c;
        best_pos = pos;
      }
    }
    seq.insert(seq.begin() + static_cast<long>(best_pos), job);
  }
  ScheduleResult out;
  out.makespan = makespan_unchecked(inst.times, seq, row);
  out.order = std::move(seq);
  return out;
}

ScheduleResult best_rotation(const FspInstance& inst, std::span<const int> cycle) {
  require(is_permutation(cycle, inst.jobs()), ErrorKind::InvalidSolution, "job order is not a permutation");
  const std::size_t n = cycle.size();
  ScheduleResult out;
  out.makespan = std::numeric_limits<double>::infinity();
  std::vector<int> rotated(n);
  std::vector<double> row;
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t j = 0; j < n; ++j) rotated[j] = cycle[(s + j) % n];
    const double c = makespan_unchecked(inst.times, rotated, row);
    if (c < out.makespan) {
      out.makespan = c;
      out.order = rotated;
    }
  }
  return out;
}

}  // namespace permqubo
