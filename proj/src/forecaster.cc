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

#include "patsim/forecaster.h"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "absl/strings/str_cat.h"

namespace patsim {

absl::Status SimulationConfig::Validate() const {
  if (horizon_steps < 1) {
    return absl::InvalidArgumentError("horizon_steps must be a positive integer");
  }
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    return absl::InvalidArgumentError("lambda must lie in (0, 1]");
  }
  if (!(theta_phase > 0.0)) {
    return absl::InvalidArgumentError("theta_phase must be positive");
  }
  if (!(delta_bifurcation > 0.0)) {
    return absl::InvalidArgumentError("delta_bifurcation must be positive");
  }
  if (!(alpha_path >= 0.0)) {
    return absl::InvalidArgumentError("alpha_path must be non-negative");
  }
  if (!(inverse_weight_factor >= 0.0)) {
    return absl::InvalidArgumentError("inverse_weight_factor must be non-negative");
  }
  return absl::OkStatus();
}

double PathConsistencyFactor(double consistency, double alpha) {
  return (1.0 + alpha * std::max(0.0, consistency)) / (1.0 + alpha);
}

TransitionCandidate AdjustPathConsistency(TransitionCandidate candidate,
                                          const PatternRegistry& reg,
                                          double alpha) {
  if (candidate.kind != TransitionKind::kComposition || !candidate.source_b) {
    candidate.adjusted_weight = candidate.raw_weight;
    return candidate;
  }
  const DynamicPattern* a = reg.Find(candidate.source_a);
  const DynamicPattern* b = reg.Find(*candidate.source_b);
  const DynamicPattern* c = reg.Find(candidate.target);
  if (a == nullptr || b == nullptr || c == nullptr) {
    candidate.adjusted_weight = candidate.raw_weight;
    return candidate;
  }
  Similarity consistency = EmergenceConsistency(a->vector, b->vector, c->vector);
  candidate.consistency = consistency.value;
  candidate.consistency_degenerate = consistency.degenerate;
  candidate.adjusted_weight =
      candidate.raw_weight * PathConsistencyFactor(consistency.value, alpha);
  return candidate;
}

std::set<std::string> AttractorSet(const PatternRegistry& reg,
                                   const std::set<std::string>& final_active) {
  std::set<std::string> out;
  for (const auto& p : final_active) {
    bool closed = true;
    for (const auto& q : final_active) {
      auto it = reg.composition.find(PatternPair{p, q});
      if (it != reg.composition.end() && !final_active.contains(it->second)) {
        closed = false;
        break;
      }
    }
    if (closed) out.insert(p);
  }
  return out;
}

bool DetectBifurcation(const std::map<std::string, double>& weights,
                       double delta) {
  if (weights.size() < 2) return false;
  double top1 = -1.0;
  double top2 = -1.0;
  for (const auto& [name, w] : weights) {
    if (w > top1) {
      top2 = top1;
      top1 = w;
    } else if (w > top2) {
      top2 = w;
    }
  }
  return std::abs(top1 - top2) < delta;
}

double Confidence(double c0, double lambda, int steps) {
  return c0 * std::pow(lambda, steps);
}

PatternVector WeightedStateVector(const PatternRegistry& reg,
                                  const std::map<std::string, double>& weights) {
  PatternVector v{};
  for (const auto& [name, w] : weights) {
    const DynamicPattern* p = reg.Find(name);
    if (p == nullptr) continue;
    for (std::size_t d = 0; d < kDims; ++d) v[d] += w * p->vector[d];
  }
  return v;
}

void SortCandidates(std::vector<TransitionCandidate>& candidates) {
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const TransitionCandidate& x, const TransitionCandidate& y) {
                     if (x.adjusted_weight != y.adjusted_weight) {
                       return x.adjusted_weight > y.adjusted_weight;
                     }
                     // An absent source_b sorts before any name.
                     return std::tie(x.target, x.source_a, x.source_b) <
                            std::tie(y.target, y.source_a, y.source_b);
                   });
}

namespace {

std::vector<TransitionCandidate> EnumerateStep(
    const PatternRegistry& reg, const std::map<std::string, double>& active,
    int step, const SimulationConfig& cfg) {
  std::vector<TransitionCandidate> out;
  const double decay = std::pow(cfg.lambda, step);

  // std::map iteration gives lexicographic (A, B) order.
  for (const auto& [key, target] : reg.composition) {
    auto a = active.find(key.first);
    auto b = active.find(key.second);
    if (a == active.end() || b == active.end()) continue;
    const DynamicPattern* pc = reg.Find(target);
    if (pc == nullptr) continue;
    TransitionCandidate c;
    c.kind = TransitionKind::kComposition;
    c.source_a = key.first;
    c.source_b = key.second;
    c.target = target;
    c.pi_a = a->second;
    c.pi_b = b->second;
    Similarity sim = LieSimilarity(reg.Find(key.first)->vector,
                                   reg.Find(key.second)->vector, pc->vector);
    c.lie_sim = sim.value;
    c.lie_sim_degenerate = sim.degenerate;
    c.decay_factor = decay;
    c.raw_weight = c.pi_a * *c.pi_b * std::max(0.0, c.lie_sim) * decay;
    c.adjusted_weight = c.raw_weight;
    if (cfg.path_integration_enabled) {
      c = AdjustPathConsistency(std::move(c), reg, cfg.alpha_path);
    }
    out.push_back(std::move(c));
  }

  for (const auto& [name, weight] : active) {
    auto inv = reg.inverses.find(name);
    if (inv == reg.inverses.end() || active.contains(inv->second)) continue;
    TransitionCandidate c;
    c.kind = TransitionKind::kInverse;
    c.source_a = name;
    c.target = inv->second;
    c.pi_a = weight;
    c.raw_weight = cfg.inverse_weight_factor * weight;
    c.adjusted_weight = c.raw_weight;
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

absl::StatusOr<ForecastResult> Simulate(const PatternRegistry& reg,
                                        std::span<const std::string> initial,
                                        const SimulationConfig& cfg) {
  if (auto s = cfg.Validate(); !s.ok()) return s;
  if (initial.empty()) return absl::InvalidArgumentError("initial pattern set is empty");
  std::set<std::string> start;
  for (const auto& name : initial) {
    if (!reg.Contains(name)) {
      return absl::NotFoundError(absl::StrCat("unknown pattern '", name, "'"));
    }
    start.insert(name);
  }

  ForecastResult result;
  result.config_echo = cfg;
  result.initial.assign(start.begin(), start.end());

  StepState s0;
  double prior_sum = 0.0;
  for (const auto& name : start) prior_sum += reg.Find(name)->confidence_prior;
  for (const auto& name : start) {
    s0.active[name] = reg.Find(name)->confidence_prior / prior_sum;
  }
  result.c0 = prior_sum / static_cast<double>(start.size());
  s0.state_vector = WeightedStateVector(reg, s0.active);
  s0.new_patterns = start;
  result.steps.push_back(std::move(s0));

  for (int t = 1; t <= cfg.horizon_steps; ++t) {
    const StepState& prev = result.steps.back();
    std::vector<TransitionCandidate> candidates =
        EnumerateStep(reg, prev.active, t, cfg);

    double z = 0.0;
    for (const auto& c : candidates) z += c.adjusted_weight;
    std::set<std::string> entering;
    for (const auto& c : candidates) {
      if (c.adjusted_weight > 0.0 && !prev.active.contains(c.target)) {
        entering.insert(c.target);
      }
    }
    if (entering.empty() || !(z > 0.0)) {
      result.halted_on_fixpoint = true;
      break;
    }

    StepState next;
    next.step = t;
    next.partition_z = z;
    next.active = prev.active;
    for (auto& c : candidates) {
      c.normalized_posterior = c.adjusted_weight / z;
      next.active[c.target] += c.normalized_posterior;
    }
    double total = 0.0;
    for (const auto& [name, w] : next.active) total += w;
    for (auto& [name, w] : next.active) w /= total;

    SortCandidates(candidates);
    next.fired = std::move(candidates);
    next.new_patterns = std::move(entering);
    next.state_vector = WeightedStateVector(reg, next.active);
    next.phase_transition =
        PhaseDetect(prev.state_vector, next.state_vector, cfg.theta_phase);
    next.bifurcation = DetectBifurcation(next.active, cfg.delta_bifurcation);
    result.steps.push_back(std::move(next));
  }

  const StepState& last = result.steps.back();
  result.converged_at = last.step;
  for (const auto& s : result.steps) {
    if (s.bifurcation) result.bifurcation_points.push_back(s.step);
  }

  std::set<std::string> final_active;
  for (const auto& [name, w] : last.active) final_active.insert(name);
  std::set<std::string> attractors = AttractorSet(reg, final_active);
  for (const auto& name : attractors) {
    result.attractors.push_back({name, last.active.at(name)});
  }
  std::stable_sort(result.attractors.begin(), result.attractors.end(),
                   [](const RankedPattern& x, const RankedPattern& y) {
                     if (x.posterior != y.posterior) return x.posterior > y.posterior;
                     return x.name < y.name;
                   });

  // Primary and secondary come from the attractors; if the horizon cut the
  // run before any pattern closed, fall back to the whole active set.
  std::vector<RankedPattern> ranking = result.attractors;
  if (ranking.empty()) {
    for (const auto& [name, w] : last.active) ranking.push_back({name, w});
    std::stable_sort(ranking.begin(), ranking.end(),
                     [](const RankedPattern& x, const RankedPattern& y) {
                       if (x.posterior != y.posterior) return x.posterior > y.posterior;
                       return x.name < y.name;
                     });
  }
  result.primary = ranking.front().name;
  if (ranking.size() > 1) result.secondary = ranking[1].name;

  result.c_final = Confidence(result.c0, cfg.lambda, result.converged_at);
  return result;
}

}  // namespace patsim
