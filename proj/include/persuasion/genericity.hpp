#pragma once

#include "persuasion/robustness.hpp"

namespace persuasion {

struct TrialRecord {
  int index = 0;
  bool stability = false;  // every nonempty action satisfies U1 and U2
  bool lrs = false;        // every nonempty action is uniquely optimal somewhere
  bool robust = false;     // classifier verdict
  int failing_action = -1;
};

struct GenericityOutcome {
  int trials = 0;
  int pass_stability = 0;
  int pass_lrs = 0;
  int pass_classifier = 0;
  uint64_t seed = 0;
  std::vector<TrialRecord> records;
};

/// True iff every action whose best-reply region is nonempty is the unique
/// best reply at some belief; tested at the centroid of the region's
/// vertices, where strictness fails exactly for duplicated or
/// lower-dimensional regions.
bool check_lrs_property(const InstancePtr& instance);

/// Utilities i.i.d. uniform on [0,1]; prior uniform, normalized, then mixed
/// toward the floor so every coordinate is at least `prior_floor`.
InstancePtr sample_uniform_instance(int num_states, int num_actions,
                                    std::mt19937_64& rng,
                                    double prior_floor = 0.05);

/// Per-trial derived seed; trials are independent given the master seed.
uint64_t derive_trial_seed(uint64_t seed, int trial);

/// Samples `trials` random instances and runs the stability check, the
/// unique-optimality check, and the classifier on each. Deterministic given
/// the seed.
GenericityOutcome genericity_trial(int num_states, int num_actions, int trials,
                                   uint64_t seed);

}  // namespace persuasion
