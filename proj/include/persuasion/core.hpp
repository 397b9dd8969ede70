#pragma once

#include "persuasion/types.hpp"

namespace persuasion {

/// Expected receiver utility of `action` under `belief`.
double expected_receiver_utility(const ReceiverType& type, int action,
                                 const Belief& belief);

/// All actions within `tie_tol` of the receiver's best expected utility at
/// `belief`. Never empty.
std::vector<int> best_replies(const ReceiverType& type, const Belief& belief,
                              double tie_tol);

struct IndirectValue {
  double value = 0.0;  // sender's expected utility at the chosen action
  int chosen = -1;     // sender-preferred best reply, lowest index on v-ties
};

/// Sender's indirect utility at `belief`: the receiver best-responds and
/// breaks ties in the sender's favor.
IndirectValue indirect_sender_value(const ReceiverType& type,
                                    const Belief& belief);

/// Expected sender utility of a policy: weight-averaged indirect values.
/// Throws std::invalid_argument when the policy is invalid for the prior.
double policy_value(const ReceiverType& type, const SignalPolicy& policy);

/// Checks positivity, weight sum, and the barycenter constraint; reports the
/// first violation with its residual instead of throwing.
PolicyCheck validate_policy(const SignalPolicy& policy, const Belief& prior,
                            const Tolerances& tol = {});

enum class CornerMode { inf, sup };

/// inf: the owner action at its lower bounds and every rival at its upper
/// bounds — the type whose best-reply region for `action` is smallest.
/// sup is the mirror image.
ReceiverType corner_type(const UtilityBox& box, int action, CornerMode mode);

}  // namespace persuasion
