#pragma once

#include "persuasion/solver.hpp"

#include <optional>

namespace persuasion {

/// A policy repaired after moving its posteriors: the original weights are
/// scaled by R/(R+||r||) and a correction posterior at distance R from the
/// prior restores the barycenter.
struct AdjustmentResult {
  SignalPolicy policy;
  double correction_weight = 0.0;
  Belief correction_posterior;
  double shift_norm = 0.0;  // ||r||_2, the barycenter drift before correction
  double gamma = 0.0;       // max Euclidean displacement of any posterior
};

AdjustmentResult build_adjustment(const SignalPolicy& policy,
                                  const std::vector<Belief>& new_posteriors,
                                  const Belief& prior);

/// Moves each posterior of a source-optimal policy to the nearest point of
/// the target type's region for the induced action, then repairs the
/// barycenter. Throws std::domain_error when some induced action has an empty
/// region at the target (no adjustment exists).
std::pair<AdjustmentResult, double> adjust_to_type(const SignalPolicy& policy,
                                                   const ReceiverType& source,
                                                   const ReceiverType& target);

/// Worst-case value loss of a gamma-adjustment:
/// sqrt(N)*gamma + gamma / R_prior.
double loss_bound(double gamma, const Belief& prior);

struct StabilityFlags {
  int action = -1;
  bool nonempty = false;
  bool u1 = false;  // no receiver-duplicate action
  bool u2 = false;  // best-reply region is full-dimensional
  std::vector<int> duplicates;  // receiver-equivalent actions, self included
};

StabilityFlags action_stability_flags(const InstancePtr& instance, int action);

/// True iff every receiver-duplicate of `action` gives the sender the same
/// expected utility at `belief`.
bool check_U1S(const InstancePtr& instance, int action, const Belief& belief);

enum class Verdict { ROBUST, FRAGILE };

struct FragilePosterior {
  Belief posterior;
  int inferior_action = -1;  // full-dimensional best reply the sender dislikes
};

struct RobustnessReport {
  Verdict verdict = Verdict::ROBUST;
  // A certifying basic optimal policy; for FRAGILE, the baseline optimum.
  SignalPolicy witness_policy;
  std::vector<FragilePosterior> fragile_posteriors;
  double gap_constant = 0.0;  // C* = C/2 for FRAGILE, 0 for ROBUST
  std::optional<ReceiverType> witness_type;
};

/// Decides continuity/robustness: ROBUST iff some basic optimal policy has at
/// every support posterior an induced action that is full-dimensional and
/// either duplicate-free or sender-equivalent to all its duplicates there.
/// The check quantifies over basic optima only. When no box is supplied, the
/// fragile witness is built inside a default width-0.02 box.
RobustnessReport classify(const InstancePtr& instance,
                          const std::optional<UtilityBox>& box = std::nullopt);

/// Verdict only; skips the fragile-witness construction.
Verdict classify_verdict(const InstancePtr& instance);

struct PseudoValue {
  double value = 0.0;  // optimum of the adversarial region system
  double C = 0.0;      // reference optimum minus that value
};

/// Optimal value over the pseudo region system: lower-dimensional actions
/// removed, duplicate full-dimensional regions carved by sender-adversarial
/// tie-breaking, stable actions untouched.
PseudoValue pseudo_optimal_value(const InstancePtr& instance);

struct FragileWitness {
  ReceiverType type;
  double gap = 0.0;  // reference optimum minus the witness optimum
};

/// A real type inside the box whose optimal value sits at least C/2 below the
/// reference optimum. Requires a FRAGILE instance and positive box margin in
/// every direction the construction moves.
FragileWitness fragile_witness_type(const InstancePtr& instance,
                                    const UtilityBox& box);

struct TypeEvaluation {
  struct Entry {
    ReceiverType type;
    double opt_value = 0.0;
    double policy_value = 0.0;
  };
  std::vector<Entry> per_type;
  double regret = 0.0;       // max over types of (opt_value - policy_value)
  double min_utility = 0.0;  // min over types of policy_value
};

TypeEvaluation evaluate_policy_over_types(const InstancePtr& instance,
                                          const SignalPolicy& policy,
                                          const std::vector<ReceiverType>& types);

/// Deterministic finite surrogate for the box: reference type, inf/sup corner
/// per action, the fragile witness when the instance is FRAGILE, then
/// `samples` pseudo-random box points.
std::vector<ReceiverType> witness_type_set(const InstancePtr& instance,
                                           const UtilityBox& box, int samples,
                                           uint64_t seed);

enum class RobustCriterion { maxmin, minregret };

struct SearchResult {
  SignalPolicy policy;
  double score = 0.0;  // regret (minregret) or min utility (maxmin)
};

/// Best policy under the criterion from a finite candidate family: every
/// basic optimum at every witness type, each one's adjustment into the
/// inf-corner regions, and the no-information policy; evaluated over the
/// witness type set. The score is an upper bound on the attainable min-regret
/// and a lower bound on the attainable max-min over the full box.
SearchResult search_robust_policy(const InstancePtr& instance,
                                  const UtilityBox& box,
                                  RobustCriterion criterion, int samples,
                                  uint64_t seed);

}  // namespace persuasion
