// maxent.hpp — maximum-entropy inference of a global PDO from reduced PDOs,
// with a direct free-parameter ascent (exact feasibility by construction) and
// a neural-network parameterization (penalty method), plus the genuine
// k-correlation measure and a non-uniqueness witness.

#pragma once

#include "pdolab/entropy.hpp"
#include "pdolab/marginal.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace pdolab {

enum class Parameterization { direct, mlp };
enum class CorrelationNorm { trace, frobenius };

struct MlpOptions {
  int hidden_width = 16;
  std::vector<double> penalty_schedule = {1e2, 1e4, 1e6, 1e8};
  double gradient_step = 0.2;  // Adam learning rate, damped in stiff rounds
  double residual_target = 1e-6;
};

struct MaxEntOptions {
  std::uint64_t seed = 0;
  int restarts = 8;
  int iterations = 400;
  double gradient_step = 1e-5;  // central finite differences on free entries
  int threads = 1;              // restart-level parallelism cap
  bool include_zero_start = true;
  Parameterization parameterization = Parameterization::direct;
  MlpOptions mlp;
};

struct MaxEntProblem {
  MarginalScenario scenario;
  SolutionFamily family;
  double box = 0.0;  // per-entry bound prod sqrt(d_i)
  MaxEntOptions options;
};

MaxEntProblem make_problem(MarginalScenario scenario, MaxEntOptions options = {});

struct IterRecord {
  int restart = 0;
  int iteration = 0;
  double objective = 0.0;  // entropy in direct mode, penalized objective in mlp
};

struct MaxEntResult {
  Pdo pdo;
  double entropy = 0.0;
  double max_residual = 0.0;  // reduction deviation against the scenario
  int best_restart = 0;
  bool hit_box = false;       // optimum sits on the tensor bound
  std::vector<IterRecord> trace;
};

MaxEntResult infer(const MaxEntProblem& problem);

struct GenuineCorrelationResult {
  double value = 0.0;
  bool maximizer_nonunique = false;  // flagged when a witness pair exists
  MaxEntResult inference;
};

// C_k = |p - maxent completion of p's k-event reductions| in the chosen norm.
GenuineCorrelationResult genuine_correlation(const Pdo& p, int k,
                                             CorrelationNorm norm = CorrelationNorm::trace,
                                             MaxEntOptions options = {},
                                             bool check_uniqueness = false);

struct WitnessOptions {
  int probes = 12;
  double distance_tol = 1e-4;  // trace norm
  double entropy_tol = 1e-6;
};

// Runs infer from independent seeds; returns the first pair of results that
// agree in entropy but differ as states.
std::optional<std::pair<MaxEntResult, MaxEntResult>> non_uniqueness_witness(
    const MarginalScenario& scenario, MaxEntOptions options = {},
    WitnessOptions witness = {});

}  // namespace pdolab
