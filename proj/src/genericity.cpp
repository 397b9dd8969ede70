#include "persuasion/genericity.hpp"

#include <algorithm>
#include <cmath>

namespace persuasion {

namespace {

Belief region_centroid(const RegionPolytope& region) {
  const auto& verts = region.vertices();
  Vector sum = Vector::Zero(region.system().num_states);
  for (const auto& v : verts) sum += v.probs();
  return Belief::clamped(sum / static_cast<double>(verts.size()));
}

}  // namespace

bool check_lrs_property(const InstancePtr& instance) {
  const ReceiverType ref = reference_type(instance);
  for (int a = 0; a < instance->num_actions(); ++a) {
    const RegionPolytope region = best_reply_region(ref, a);
    if (region.empty()) continue;
    // The centroid lies in the relative interior, so any surviving tie there
    // is a tie on the whole region: the action is never uniquely optimal.
    const auto replies =
        best_replies(ref, region_centroid(region), instance->tol().tie);
    if (replies.size() != 1 || replies.front() != a) return false;
  }
  return true;
}

InstancePtr sample_uniform_instance(int num_states, int num_actions,
                                    std::mt19937_64& rng, double prior_floor) {
  if (num_states < 2 || num_actions < 1)
    throw std::invalid_argument("need at least 2 states and 1 action");
  if (prior_floor < 0.0 || prior_floor * num_states >= 1.0)
    throw std::invalid_argument("prior floor too large for the state count");

  Matrix receiver_u(num_actions, num_states);
  Matrix sender_v(num_actions, num_states);
  for (int a = 0; a < num_actions; ++a)
    for (int j = 0; j < num_states; ++j) receiver_u(a, j) = uniform01(rng);
  for (int a = 0; a < num_actions; ++a)
    for (int j = 0; j < num_states; ++j) sender_v(a, j) = uniform01(rng);

  Vector raw(num_states);
  for (int j = 0; j < num_states; ++j) raw[j] = uniform01(rng);
  if (raw.sum() <= 0.0) raw.setOnes();
  raw /= raw.sum();
  const Vector prior = Vector::Constant(num_states, prior_floor) +
                       (1.0 - prior_floor * num_states) * raw;

  std::vector<std::string> states, actions;
  for (int j = 0; j < num_states; ++j) states.push_back("s" + std::to_string(j));
  for (int a = 0; a < num_actions; ++a)
    actions.push_back("a" + std::to_string(a));
  return PersuasionInstance::create(std::move(states), std::move(actions),
                                    Belief::checked(prior),
                                    std::move(receiver_u),
                                    std::move(sender_v));
}

uint64_t derive_trial_seed(uint64_t seed, int trial) {
  uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<uint64_t>(trial) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

GenericityOutcome genericity_trial(int num_states, int num_actions, int trials,
                                   uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  GenericityOutcome out;
  out.trials = trials;
  out.seed = seed;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(derive_trial_seed(seed, t));
    const InstancePtr inst =
        sample_uniform_instance(num_states, num_actions, rng);

    TrialRecord rec;
    rec.index = t;
    rec.stability = true;
    for (int a = 0; a < num_actions && rec.stability; ++a) {
      const StabilityFlags flags = action_stability_flags(inst, a);
      if (flags.nonempty && !(flags.u1 && flags.u2)) {
        rec.stability = false;
        rec.failing_action = a;
      }
    }
    rec.lrs = check_lrs_property(inst);
    // Stability already meets the sufficient condition at every posterior of
    // any optimal policy, so the classifier only needs to run otherwise.
    rec.robust =
        rec.stability || classify_verdict(inst) == Verdict::ROBUST;

    out.pass_stability += rec.stability ? 1 : 0;
    out.pass_lrs += rec.lrs ? 1 : 0;
    out.pass_classifier += rec.robust ? 1 : 0;
    out.records.push_back(rec);
  }
  return out;
}

}  // namespace persuasion
