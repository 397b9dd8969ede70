#include "persuasion/core.hpp"

#include <cmath>
#include <sstream>

namespace persuasion {

namespace {

void check_belief_dim(const ReceiverType& type, const Belief& belief) {
  if (belief.size() != type.num_states())
    throw std::invalid_argument("belief length does not match state count");
}

void check_action_index(const ReceiverType& type, int action) {
  if (action < 0 || action >= type.num_actions())
    throw std::invalid_argument("action index out of range");
}

}  // namespace

double expected_receiver_utility(const ReceiverType& type, int action,
                                 const Belief& belief) {
  check_belief_dim(type, belief);
  check_action_index(type, action);
  return type.u().row(action).dot(belief.probs());
}

std::vector<int> best_replies(const ReceiverType& type, const Belief& belief,
                              double tie_tol) {
  check_belief_dim(type, belief);
  if (tie_tol < 0) throw std::invalid_argument("tie tolerance must be >= 0");
  const Vector eu = type.u() * belief.probs();
  const double best = eu.maxCoeff();
  std::vector<int> replies;
  for (int a = 0; a < eu.size(); ++a)
    if (eu[a] >= best - tie_tol) replies.push_back(a);
  return replies;
}

IndirectValue indirect_sender_value(const ReceiverType& type,
                                    const Belief& belief) {
  const auto replies = best_replies(type, belief, type.instance().tol().tie);
  const Matrix& v = type.instance().sender_v();
  IndirectValue out;
  out.value = -1.0;
  for (int a : replies) {
    const double val = v.row(a).dot(belief.probs());
    if (val > out.value + type.instance().tol().tie) {
      out.value = val;
      out.chosen = a;
    }
  }
  return out;
}

double policy_value(const ReceiverType& type, const SignalPolicy& policy) {
  const PolicyCheck check =
      validate_policy(policy, type.instance().prior(), type.instance().tol());
  if (!check.ok)
    throw std::invalid_argument("invalid policy: " + check.violation);
  double total = 0.0;
  for (const auto& s : policy.supports)
    total += s.weight * indirect_sender_value(type, s.posterior).value;
  return total;
}

PolicyCheck validate_policy(const SignalPolicy& policy, const Belief& prior,
                            const Tolerances& tol) {
  PolicyCheck out;
  if (policy.supports.empty()) {
    out.ok = false;
    out.violation = "policy has no supports";
    return out;
  }
  double weight_sum = 0.0;
  for (size_t i = 0; i < policy.supports.size(); ++i) {
    const auto& s = policy.supports[i];
    if (!(s.weight > 0.0)) {
      out.ok = false;
      out.violation = "weight " + std::to_string(i) + " is not positive";
      out.residual = s.weight;
      return out;
    }
    if (s.posterior.size() != prior.size()) {
      out.ok = false;
      out.violation = "posterior " + std::to_string(i) + " has wrong dimension";
      return out;
    }
    weight_sum += s.weight;
  }
  if (std::abs(weight_sum - 1.0) > tol.sum) {
    out.ok = false;
    out.violation = "weights sum to " + std::to_string(weight_sum);
    out.residual = std::abs(weight_sum - 1.0);
    return out;
  }
  Vector bary = Vector::Zero(prior.size());
  for (const auto& s : policy.supports)
    bary += s.weight * s.posterior.probs();
  const Vector diff = bary - prior.probs();
  int worst = 0;
  diff.cwiseAbs().maxCoeff(&worst);
  if (std::abs(diff[worst]) > tol.bary) {
    std::ostringstream os;
    os << "barycenter deviates from prior at coordinate " << worst;
    out.ok = false;
    out.violation = os.str();
    out.residual = std::abs(diff[worst]);
    return out;
  }
  return out;
}

ReceiverType corner_type(const UtilityBox& box, int action, CornerMode mode) {
  const auto& inst = box.reference();
  if (action < 0 || action >= inst->num_actions())
    throw std::invalid_argument("action index out of range");
  Matrix u = mode == CornerMode::inf ? box.hi() : box.lo();
  if (mode == CornerMode::inf)
    u.row(action) = box.lo().row(action);
  else
    u.row(action) = box.hi().row(action);
  return ReceiverType(inst, std::move(u));
}

}  // namespace persuasion
