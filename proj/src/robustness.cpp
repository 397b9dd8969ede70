#include "persuasion/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace persuasion {

namespace {

constexpr double kZeroShift = 1e-12;
constexpr double kDeltaStarFloor = 1e-12;

std::vector<int> duplicate_set(const PersuasionInstance& inst, int action) {
  std::vector<int> dups;
  const Matrix& u = inst.receiver_u();
  for (int b = 0; b < inst.num_actions(); ++b) {
    if ((u.row(b) - u.row(action)).cwiseAbs().maxCoeff() <= inst.tol().dup)
      dups.push_back(b);
  }
  return dups;
}

// Per-action regions and duplicate sets of the reference type.
struct ActionAnalysis {
  std::vector<RegionPolytope> regions;
  std::vector<std::vector<int>> duplicates;
  int full_dim = 0;

  bool low(int a) const {
    return !regions[a].empty() && regions[a].dim() < full_dim;
  }
  bool carved(int a) const {
    return regions[a].dim() == full_dim && duplicates[a].size() > 1;
  }
};

ActionAnalysis analyze(const InstancePtr& inst) {
  ActionAnalysis out;
  out.full_dim = inst->num_states() - 1;
  const ReceiverType ref = reference_type(inst);
  for (int a = 0; a < inst->num_actions(); ++a) {
    out.regions.push_back(best_reply_region(ref, a));
    out.duplicates.push_back(duplicate_set(*inst, a));
  }
  return out;
}

// Sender-optimal best replies at a belief (indirect-value maximizers).
std::vector<int> sender_optimal_replies(const ReceiverType& type,
                                        const Belief& belief) {
  const Tolerances& tol = type.instance().tol();
  const auto replies = best_replies(type, belief, tol.tie);
  double best = -1.0;
  for (int a : replies)
    best = std::max(best, type.instance().sender_v().row(a).dot(belief.probs()));
  std::vector<int> out;
  for (int a : replies)
    if (type.instance().sender_v().row(a).dot(belief.probs()) >= best - tol.tie)
      out.push_back(a);
  return out;
}

bool posterior_passes(const InstancePtr& inst, const ActionAnalysis& analysis,
                      const Belief& posterior) {
  const ReceiverType ref = reference_type(inst);
  for (int a : sender_optimal_replies(ref, posterior)) {
    const bool u2 = analysis.regions[a].dim() == analysis.full_dim;
    if (!u2) continue;
    const bool u1 = analysis.duplicates[a].size() == 1;
    if (u1 || check_U1S(inst, a, posterior)) return true;
  }
  return false;
}

struct CoreReport {
  Verdict verdict = Verdict::ROBUST;
  SignalPolicy witness_policy;
  std::vector<FragilePosterior> fragile_posteriors;
  double base_value = 0.0;
  double pseudo_value = 0.0;
  double C = 0.0;
};

int inferior_full_dim_reply(const InstancePtr& inst,
                            const ActionAnalysis& analysis,
                            const Belief& posterior) {
  const ReceiverType ref = reference_type(inst);
  const Tolerances& tol = inst->tol();
  const auto replies = best_replies(ref, posterior, tol.tie);
  double best = -1.0;
  for (int a : replies)
    best = std::max(best, inst->sender_v().row(a).dot(posterior.probs()));
  int pick = -1;
  double pick_value = std::numeric_limits<double>::infinity();
  for (int b : replies) {
    const double vb = inst->sender_v().row(b).dot(posterior.probs());
    if (vb >= best - tol.tie) continue;  // not inferior
    if (analysis.regions[b].dim() != analysis.full_dim) continue;
    if (vb < pick_value - tol.tie) {
      pick = b;
      pick_value = vb;
    }
  }
  return pick;
}

CoreReport classify_core(const InstancePtr& inst) {
  const ActionAnalysis analysis = analyze(inst);
  const SolveResult base = solve_optimal(reference_type(inst));

  CoreReport out;
  out.base_value = base.value;
  for (const auto& policy : base.all_basic_optima) {
    bool pass = true;
    for (const auto& s : policy.supports)
      if (!posterior_passes(inst, analysis, s.posterior)) {
        pass = false;
        break;
      }
    if (pass) {
      out.verdict = Verdict::ROBUST;
      out.witness_policy = policy;
      out.pseudo_value = base.value;
      return out;
    }
  }

  out.verdict = Verdict::FRAGILE;
  out.witness_policy = base.all_basic_optima.front();
  for (const auto& s : out.witness_policy.supports) {
    if (posterior_passes(inst, analysis, s.posterior)) continue;
    const int b = inferior_full_dim_reply(inst, analysis, s.posterior);
    if (b < 0)
      throw internal_error(
          "fragile posterior lacks an inferior full-dimensional best reply");
    out.fragile_posteriors.push_back({s.posterior, b});
  }
  const PseudoValue pseudo = pseudo_optimal_value(inst);
  out.pseudo_value = pseudo.value;
  out.C = pseudo.C;
  return out;
}

bool same_game(const PersuasionInstance& a, const PersuasionInstance& b) {
  return &a == &b ||
         (a.receiver_u() == b.receiver_u() && a.sender_v() == b.sender_v() &&
          a.prior().probs() == b.prior().probs());
}

void require_box_for(const InstancePtr& inst, const UtilityBox& box) {
  if (!same_game(*inst, *box.reference()))
    throw std::invalid_argument("box does not wrap this instance");
}

UtilityBox default_witness_box(const InstancePtr& inst) {
  // Unclipped so the construction always has room to move, even when the
  // reference sits on the [0,1] boundary.
  return UtilityBox::uniform_delta(inst, 0.02, /*clip=*/false);
}

SignalPolicy no_information_policy(const InstancePtr& inst) {
  SignalPolicy policy;
  policy.supports.push_back({1.0, inst->prior()});
  return policy;
}

}  // namespace

AdjustmentResult build_adjustment(const SignalPolicy& policy,
                                  const std::vector<Belief>& new_posteriors,
                                  const Belief& prior) {
  if (new_posteriors.size() != policy.supports.size())
    throw std::invalid_argument(
        "adjustment: one replacement posterior per support required");
  const PolicyCheck check = validate_policy(policy, prior);
  if (!check.ok)
    throw std::invalid_argument("adjustment: invalid policy: " +
                                check.violation);
  for (const auto& p : new_posteriors)
    if (p.size() != prior.size())
      throw std::invalid_argument("adjustment: posterior dimension mismatch");

  const double radius = max_ball_radius(prior);
  Vector drift = -prior.probs();
  double gamma = 0.0;
  for (size_t i = 0; i < new_posteriors.size(); ++i) {
    drift += policy.supports[i].weight * new_posteriors[i].probs();
    gamma = std::max(gamma, (new_posteriors[i].probs() -
                             policy.supports[i].posterior.probs())
                                .norm());
  }
  const double shift = drift.norm();

  AdjustmentResult out;
  out.gamma = gamma;
  if (shift <= kZeroShift) {
    out.shift_norm = 0.0;
    out.correction_weight = 0.0;
    out.correction_posterior = prior;
    for (size_t i = 0; i < new_posteriors.size(); ++i)
      out.policy.supports.push_back(
          {policy.supports[i].weight, new_posteriors[i]});
    return out;
  }

  out.shift_norm = shift;
  out.correction_weight = shift / (radius + shift);
  out.correction_posterior =
      Belief::clamped(prior.probs() - (radius / shift) * drift);
  const double scale = radius / (radius + shift);
  for (size_t i = 0; i < new_posteriors.size(); ++i)
    out.policy.supports.push_back(
        {scale * policy.supports[i].weight, new_posteriors[i]});
  out.policy.supports.push_back(
      {out.correction_weight, out.correction_posterior});
  return out;
}

std::pair<AdjustmentResult, double> adjust_to_type(const SignalPolicy& policy,
                                                   const ReceiverType& source,
                                                   const ReceiverType& target) {
  const Belief& prior = source.instance().prior();
  const PolicyCheck check =
      validate_policy(policy, prior, source.instance().tol());
  if (!check.ok)
    throw std::invalid_argument("adjustment: invalid policy: " +
                                check.violation);

  std::vector<Belief> moved;
  moved.reserve(policy.supports.size());
  for (const auto& s : policy.supports) {
    const int induced = indirect_sender_value(source, s.posterior).chosen;
    const RegionPolytope region = best_reply_region(target, induced);
    if (region.empty()) {
      std::ostringstream os;
      os << "no adjustment exists: target region for induced action "
         << source.instance().action_labels()[induced] << " is empty";
      throw std::domain_error(os.str());
    }
    moved.push_back(nearest_point_in_region(region, s.posterior));
  }
  AdjustmentResult out = build_adjustment(policy, moved, prior);
  const double gamma = out.gamma;
  return {std::move(out), gamma};
}

double loss_bound(double gamma, const Belief& prior) {
  if (gamma < 0) throw std::invalid_argument("loss bound: gamma must be >= 0");
  const double n = static_cast<double>(prior.size());
  return std::sqrt(n) * gamma + gamma / max_ball_radius(prior);
}

StabilityFlags action_stability_flags(const InstancePtr& instance,
                                      int action) {
  if (action < 0 || action >= instance->num_actions())
    throw std::invalid_argument("action index out of range");
  const RegionPolytope region =
      best_reply_region(reference_type(instance), action);
  StabilityFlags flags;
  flags.action = action;
  flags.nonempty = !region.empty();
  flags.duplicates = duplicate_set(*instance, action);
  flags.u1 = flags.duplicates.size() == 1;
  flags.u2 = region.dim() == instance->num_states() - 1;
  return flags;
}

bool check_U1S(const InstancePtr& instance, int action, const Belief& belief) {
  if (belief.size() != instance->num_states())
    throw std::invalid_argument("belief length does not match state count");
  const Matrix& v = instance->sender_v();
  for (int b : duplicate_set(*instance, action)) {
    if (b == action) continue;
    const double gap = (v.row(action) - v.row(b)).dot(belief.probs());
    if (std::abs(gap) > instance->tol().tie) return false;
  }
  return true;
}

Verdict classify_verdict(const InstancePtr& instance) {
  return classify_core(instance).verdict;
}

RobustnessReport classify(const InstancePtr& instance,
                          const std::optional<UtilityBox>& box) {
  const CoreReport core = classify_core(instance);
  RobustnessReport report;
  report.verdict = core.verdict;
  report.witness_policy = core.witness_policy;
  if (core.verdict == Verdict::ROBUST) return report;

  report.fragile_posteriors = core.fragile_posteriors;
  report.gap_constant = core.C / 2.0;
  const UtilityBox witness_box = box ? *box : default_witness_box(instance);
  report.witness_type = fragile_witness_type(instance, witness_box).type;
  return report;
}

PseudoValue pseudo_optimal_value(const InstancePtr& instance) {
  const ReceiverType ref = reference_type(instance);
  const ActionAnalysis analysis = analyze(instance);
  const Tolerances& tol = instance->tol();
  const SolveResult base = solve_optimal(ref);

  // Region system of the pseudo type: drop lower-dimensional actions, carve
  // duplicated full-dimensional regions with sender-adversarial tie-breaking,
  // keep stable regions as they are.
  std::vector<RegionPolytope> pseudo_regions;
  for (int a = 0; a < instance->num_actions(); ++a) {
    if (analysis.regions[a].empty() || analysis.low(a)) continue;
    if (!analysis.carved(a)) {
      pseudo_regions.push_back(analysis.regions[a]);
      continue;
    }
    HalfspaceSystem sys = reduce_region(ref, a);
    for (int b : analysis.duplicates[a]) {
      if (b == a) continue;
      const Vector w =
          (instance->sender_v().row(a) - instance->sender_v().row(b))
              .transpose();
      append_simplex_halfspace(sys, w, b);
    }
    pseudo_regions.emplace_back(a, std::move(sys), tol);
  }

  std::vector<Belief> points;
  for (const auto& region : pseudo_regions)
    for (const auto& v : region.vertices()) {
      bool dup = false;
      for (const auto& p : points)
        if ((p.probs() - v.probs()).norm() <= tol.dedup) {
          dup = true;
          break;
        }
      if (!dup) points.push_back(v);
    }
  std::sort(points.begin(), points.end(),
            [](const Belief& a, const Belief& b) {
              for (int j = 0; j < a.size(); ++j) {
                if (a[j] < b[j]) return true;
                if (a[j] > b[j]) return false;
              }
              return false;
            });

  std::vector<ScoredPosterior> pool;
  for (auto& p : points) {
    double value = -1.0;
    int chosen = -1;
    for (const auto& region : pseudo_regions) {
      if (!region_contains(region, p, tol.mem)) continue;
      const double v =
          instance->sender_v().row(region.owner_action()).dot(p.probs());
      if (v > value + tol.tie) {
        value = v;
        chosen = region.owner_action();
      }
    }
    if (chosen < 0)
      throw internal_error("pseudo pool point outside every pseudo region");
    pool.push_back({std::move(p), chosen, value});
  }

  const SolveResult pseudo =
      optimize_over_pool(instance->prior(), pool, tol);
  return {pseudo.value, base.value - pseudo.value};
}

FragileWitness fragile_witness_type(const InstancePtr& instance,
                                    const UtilityBox& box) {
  require_box_for(instance, box);
  const CoreReport core = classify_core(instance);
  if (core.verdict == Verdict::ROBUST)
    throw std::domain_error("fragile witness requires a FRAGILE instance");

  const ActionAnalysis analysis = analyze(instance);
  const Matrix& u = instance->receiver_u();
  const Matrix& v = instance->sender_v();

  // Largest step the box permits in every direction the construction moves:
  // lower-dimensional rows move down by delta, carved rows move up by
  // delta * (1 - v).
  double room = std::numeric_limits<double>::infinity();
  for (int a = 0; a < instance->num_actions(); ++a) {
    for (int j = 0; j < instance->num_states(); ++j) {
      if (analysis.low(a)) {
        room = std::min(room, u(a, j) - box.lo()(a, j));
      } else if (analysis.carved(a)) {
        const double scale = 1.0 - v(a, j);
        if (scale > 0.0)
          room = std::min(room, (box.hi()(a, j) - u(a, j)) / scale);
      }
    }
  }
  if (!(room > 0.0) || !std::isfinite(room))
    throw std::domain_error(
        "box has no interior margin along the witness construction");

  const double target = core.C / 2.0;
  double delta_star = room / 2.0;
  while (true) {
    Matrix u_witness = u;
    for (int a = 0; a < instance->num_actions(); ++a) {
      if (analysis.low(a)) {
        u_witness.row(a).array() -= delta_star;
      } else if (analysis.carved(a)) {
        for (int j = 0; j < instance->num_states(); ++j)
          u_witness(a, j) += delta_star * (1.0 - v(a, j));
      }
    }
    ReceiverType witness(instance, std::move(u_witness));
    const double gap = core.base_value - solve_optimal(witness).value;
    if (gap >= target - 1e-12) {
      if (!box.contains(witness, 1e-9))
        throw internal_error("fragile witness escaped its box");
      return {std::move(witness), gap};
    }
    delta_star /= 2.0;
    if (delta_star < kDeltaStarFloor)
      throw internal_error(
          "fragile witness construction failed to certify the gap");
  }
}

TypeEvaluation evaluate_policy_over_types(
    const InstancePtr& instance, const SignalPolicy& policy,
    const std::vector<ReceiverType>& types) {
  if (types.empty())
    throw std::invalid_argument("type evaluation needs at least one type");
  for (const auto& type : types)
    if (!same_game(*instance, type.instance()))
      throw std::invalid_argument("type does not belong to this instance");
  TypeEvaluation out;
  out.regret = -std::numeric_limits<double>::infinity();
  out.min_utility = std::numeric_limits<double>::infinity();
  for (const auto& type : types) {
    TypeEvaluation::Entry entry{type, solve_optimal(type).value,
                                policy_value(type, policy)};
    out.regret = std::max(out.regret, entry.opt_value - entry.policy_value);
    out.min_utility = std::min(out.min_utility, entry.policy_value);
    out.per_type.push_back(std::move(entry));
  }
  return out;
}

std::vector<ReceiverType> witness_type_set(const InstancePtr& instance,
                                           const UtilityBox& box, int samples,
                                           uint64_t seed) {
  require_box_for(instance, box);
  std::vector<ReceiverType> types;
  types.push_back(reference_type(instance));
  for (int a = 0; a < instance->num_actions(); ++a) {
    types.push_back(corner_type(box, a, CornerMode::inf));
    types.push_back(corner_type(box, a, CornerMode::sup));
  }
  if (classify_core(instance).verdict == Verdict::FRAGILE)
    types.push_back(fragile_witness_type(instance, box).type);
  std::mt19937_64 rng(seed);
  for (int s = 0; s < samples; ++s) types.push_back(box.sample(rng));
  return types;
}

SearchResult search_robust_policy(const InstancePtr& instance,
                                  const UtilityBox& box,
                                  RobustCriterion criterion, int samples,
                                  uint64_t seed) {
  const std::vector<ReceiverType> types =
      witness_type_set(instance, box, samples, seed);

  std::vector<double> opt_values;
  std::vector<SolveResult> solved;
  opt_values.reserve(types.size());
  for (const auto& type : types) {
    solved.push_back(solve_optimal(type));
    opt_values.push_back(solved.back().value);
  }

  // Candidate family: basic optima at every witness type, their adjustments
  // into the inf-corner regions, and the no-information policy.
  std::vector<SignalPolicy> candidates;
  for (size_t t = 0; t < types.size(); ++t) {
    for (const auto& policy : solved[t].all_basic_optima) {
      candidates.push_back(policy);
      bool feasible = true;
      std::vector<Belief> moved;
      for (const auto& s : policy.supports) {
        const int induced = indirect_sender_value(types[t], s.posterior).chosen;
        const RegionPolytope target = best_reply_region(
            corner_type(box, induced, CornerMode::inf), induced);
        if (target.empty()) {
          feasible = false;
          break;
        }
        moved.push_back(nearest_point_in_region(target, s.posterior));
      }
      if (feasible)
        candidates.push_back(
            build_adjustment(policy, moved, instance->prior()).policy);
    }
  }
  candidates.push_back(no_information_policy(instance));

  SearchResult best;
  bool have_best = false;
  for (const auto& candidate : candidates) {
    double regret = 0.0;
    double min_utility = std::numeric_limits<double>::infinity();
    for (size_t t = 0; t < types.size(); ++t) {
      const double pv = policy_value(types[t], candidate);
      regret = std::max(regret, opt_values[t] - pv);
      min_utility = std::min(min_utility, pv);
    }
    const double score =
        criterion == RobustCriterion::minregret ? regret : min_utility;
    const bool better = criterion == RobustCriterion::minregret
                            ? score < best.score
                            : score > best.score;
    if (!have_best || better) {
      best.policy = candidate;
      best.score = score;
      have_best = true;
    }
  }
  return best;
}

}  // namespace persuasion
