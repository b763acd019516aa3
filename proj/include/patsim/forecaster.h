// Copyright 2026 The patsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Forward simulation of the pattern semigroup.
//
// Starting from an initial pattern set S_0, each step fires every
// composition rule whose two sources are active plus an inverse transition
// for every active pattern whose inverse is not yet active. Candidate
// weights are
//
//   composition: pi(A) * pi(B) * max(0, lie_sim(A, B, C)) * lambda^t
//   inverse:     inverse_weight_factor * pi(A)
//
// optionally scaled by the path-consistency factor, then normalised by the
// step's partition function Z. Posteriors are merged into the pattern
// weights with pi'(P) ~ pi(P) + sum of posteriors targeting P. The run halts
// at the first step that adds no new pattern, or at the horizon.

#ifndef PATSIM_FORECASTER_H_
#define PATSIM_FORECASTER_H_

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "patsim/lie_space.h"
#include "patsim/ontology.h"

namespace patsim {

struct SimulationConfig {
  int horizon_steps = 6;
  double lambda = 0.85;
  double theta_phase = 0.25;
  double delta_bifurcation = 0.15;
  double alpha_path = 0.30;
  double inverse_weight_factor = 0.20;
  bool path_integration_enabled = true;

  absl::Status Validate() const;
};

// Name of the weight merge rule; echoed with every result.
inline constexpr char kMergeRule[] = "additive_renormalized";

enum class TransitionKind { kComposition, kInverse };

struct TransitionCandidate {
  std::string source_a;
  std::optional<std::string> source_b;  // absent for inverse transitions
  std::string target;
  TransitionKind kind = TransitionKind::kComposition;
  double pi_a = 0.0;
  std::optional<double> pi_b;
  double lie_sim = 0.0;
  bool lie_sim_degenerate = false;
  double decay_factor = 1.0;
  double raw_weight = 0.0;
  std::optional<double> consistency;
  bool consistency_degenerate = false;
  double adjusted_weight = 0.0;
  double normalized_posterior = 0.0;
  // Set by the analysis pipeline when a source was not observed and entered
  // with a discounted prior.
  bool source_a_latent = false;
  bool source_b_latent = false;
};

struct StepState {
  int step = 0;
  std::map<std::string, double> active;
  PatternVector state_vector{};
  std::vector<TransitionCandidate> fired;
  double partition_z = 0.0;
  std::set<std::string> new_patterns;
  bool phase_transition = false;
  bool bifurcation = false;
};

struct RankedPattern {
  std::string name;
  double posterior = 0.0;
};

struct ForecastResult {
  std::vector<std::string> initial;
  std::vector<StepState> steps;
  int converged_at = 0;
  // True when the run stopped on a non-productive step rather than the
  // horizon.
  bool halted_on_fixpoint = false;
  std::vector<RankedPattern> attractors;
  std::string primary;
  std::optional<std::string> secondary;
  std::vector<int> bifurcation_points;
  double c0 = 0.0;
  double c_final = 0.0;
  SimulationConfig config_echo;
};

// Runs the simulation. Errors: empty initial set (InvalidArgument), unknown
// pattern name (NotFound), invalid config (InvalidArgument).
absl::StatusOr<ForecastResult> Simulate(const PatternRegistry& reg,
                                        std::span<const std::string> initial,
                                        const SimulationConfig& cfg = {});

// (1 + alpha * max(0, consistency)) / (1 + alpha).
double PathConsistencyFactor(double consistency, double alpha);

// Fills consistency and adjusted_weight for a composition candidate from the
// registered vectors. Inverse candidates pass through with
// adjusted_weight = raw_weight.
TransitionCandidate AdjustPathConsistency(TransitionCandidate candidate,
                                          const PatternRegistry& reg,
                                          double alpha);

// Patterns P in `final_active` with compose(P, Q) either undefined or inside
// `final_active` for every Q in `final_active`.
std::set<std::string> AttractorSet(const PatternRegistry& reg,
                                   const std::set<std::string>& final_active);

// |top1 - top2| < delta; false with fewer than two entries.
bool DetectBifurcation(const std::map<std::string, double>& weights,
                       double delta = 0.15);

// c0 * lambda^T.
double Confidence(double c0, double lambda, int steps);

// v = sum_P weight(P) * vector(P).
PatternVector WeightedStateVector(const PatternRegistry& reg,
                                  const std::map<std::string, double>& weights);

// Orders candidates by descending adjusted weight, then target, source_a,
// source_b.
void SortCandidates(std::vector<TransitionCandidate>& candidates);

}  // namespace patsim

#endif  // PATSIM_FORECASTER_H_
