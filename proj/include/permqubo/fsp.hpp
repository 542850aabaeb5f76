#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "permqubo/instances.hpp"
#include "permqubo/matrix.hpp"
#include "permqubo/types.hpp"

namespace permqubo {

/// Completion time of the last job on the last machine.
double makespan(const FspInstance& inst, std::span<const int> perm);

enum class DistanceFormulation { ResidualSquare, ResidualNoCarry, Spirit, Fshoph };

std::string to_string(DistanceFormulation f);
/// Accepts the CLI spellings, e.g. "residual-no-carry".
std::optional<DistanceFormulation> parse_distance_formulation(std::string_view name);

/// Job-to-job distance for the FSP-as-TSP reduction; d(i, j) is the cost of
/// running job j right after job i. Generally asymmetric, zero diagonal.
Matrix job_distance_matrix(const FspInstance& inst, DistanceFormulation f);

struct ScheduleResult {
  Permutation order;
  double makespan = 0.0;
};

/// Nawaz-Enscore-Ham insertion heuristic.
ScheduleResult neh(const FspInstance& inst);

/// Best of the n rotations of a cyclic job order (earliest rotation on ties).
ScheduleResult best_rotation(const FspInstance& inst, std::span<const int> cycle);

}  // namespace permqubo
