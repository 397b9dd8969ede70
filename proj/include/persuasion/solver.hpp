#pragma once

#include "persuasion/core.hpp"
#include "persuasion/geometry.hpp"

namespace persuasion {

/// A candidate posterior for the sender: an extreme point of some best-reply
/// region, scored by the sender's indirect utility there.
struct ScoredPosterior {
  Belief belief;
  int best_action = -1;     // sender-preferred best reply at the belief
  double sender_value = 0;  // indirect utility at the belief
};

/// Union of the extreme points of all best-reply regions, deduplicated and
/// lexicographically sorted.
std::vector<ScoredPosterior> extreme_point_pool(const ReceiverType& type);

struct SolveResult {
  double value = 0.0;
  SignalPolicy policy;  // first basic optimum in canonical order
  std::vector<SignalPolicy> all_basic_optima;
};

/// Concavification at the prior: maximizes the expected score over weight
/// vectors on the pool whose barycenter is the prior. Enumerates basic
/// feasible supports (affinely independent, size <= N), which yields every
/// basic optimal policy, not just one.
SolveResult optimize_over_pool(const Belief& prior,
                               const std::vector<ScoredPosterior>& pool,
                               const Tolerances& tol);

/// Sender's optimal value and all basic optimal policies for one type.
SolveResult solve_optimal(const ReceiverType& type);

/// Reduces a policy supported on extreme points to a basic one (affinely
/// independent support, weights uniquely determined) without lowering its
/// value. Idempotent on basic inputs.
SignalPolicy make_basic(const SignalPolicy& policy, const ReceiverType& type);

}  // namespace persuasion
