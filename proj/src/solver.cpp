#include "persuasion/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace persuasion {

namespace {

constexpr double kWeightFloor = 1e-12;

bool lex_less(const Belief& a, const Belief& b) {
  for (int j = 0; j < a.size(); ++j) {
    if (a[j] < b[j]) return true;
    if (a[j] > b[j]) return false;
  }
  return false;
}

template <typename Fn>
void for_each_subset(int total, int k, Fn&& fn) {
  if (k > total || k <= 0) return;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    int pos = k - 1;
    while (pos >= 0 && idx[pos] == total - k + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
  }
}

SignalPolicy policy_from(const std::vector<ScoredPosterior>& pool,
                         const std::vector<int>& support,
                         const Vector& weights) {
  SignalPolicy policy;
  for (size_t i = 0; i < support.size(); ++i)
    policy.supports.push_back({weights[static_cast<int>(i)],
                               pool[support[i]].belief});
  return policy;
}

}  // namespace

std::vector<ScoredPosterior> extreme_point_pool(const ReceiverType& type) {
  const Tolerances& tol = type.instance().tol();
  std::vector<Belief> points;
  for (int a = 0; a < type.num_actions(); ++a) {
    const RegionPolytope region = best_reply_region(type, a);
    for (const auto& v : region.vertices()) {
      bool dup = false;
      for (const auto& p : points)
        if ((p.probs() - v.probs()).norm() <= tol.dedup) {
          dup = true;
          break;
        }
      if (!dup) points.push_back(v);
    }
  }
  std::sort(points.begin(), points.end(), lex_less);
  std::vector<ScoredPosterior> pool;
  pool.reserve(points.size());
  for (auto& p : points) {
    const IndirectValue iv = indirect_sender_value(type, p);
    pool.push_back({std::move(p), iv.chosen, iv.value});
  }
  return pool;
}

SolveResult optimize_over_pool(const Belief& prior,
                               const std::vector<ScoredPosterior>& pool,
                               const Tolerances& tol) {
  if (pool.empty()) throw internal_error("posterior pool is empty");
  const int n_states = prior.size();
  const int pool_size = static_cast<int>(pool.size());

  struct Candidate {
    double value;
    std::vector<int> support;
    Vector weights;
  };
  double best = -std::numeric_limits<double>::infinity();
  std::vector<Candidate> near_optimal;

  Matrix A(n_states, n_states);  // reused buffer, widest needed size
  for (int k = 1; k <= std::min(n_states, pool_size); ++k) {
    for_each_subset(pool_size, k, [&](const std::vector<int>& idx) {
      // a feasible support must straddle the prior in every coordinate
      for (int j = 0; j < n_states; ++j) {
        double lo = 1.0, hi = 0.0;
        for (int i = 0; i < k; ++i) {
          lo = std::min(lo, pool[idx[i]].belief[j]);
          hi = std::max(hi, pool[idx[i]].belief[j]);
        }
        if (lo > prior[j] + tol.bary || hi < prior[j] - tol.bary) return;
      }
      for (int i = 0; i < k; ++i) A.col(i) = pool[idx[i]].belief.probs();
      Eigen::ColPivHouseholderQR<Matrix> qr(A.leftCols(k));
      qr.setThreshold(1e-9);
      if (qr.rank() < k) return;  // affinely dependent support
      const Vector alpha = qr.solve(prior.probs());
      if ((A.leftCols(k) * alpha - prior.probs()).cwiseAbs().maxCoeff() >
          tol.bary)
        return;  // prior not in the affine hull
      if (alpha.minCoeff() < kWeightFloor) return;  // outside the convex hull
      double value = 0.0;
      for (int i = 0; i < k; ++i) value += alpha[i] * pool[idx[i]].sender_value;

      if (value > best + tol.opt) {
        best = value;
        std::erase_if(near_optimal, [&](const Candidate& c) {
          return c.value < best - tol.opt;
        });
        near_optimal.push_back({value, idx, alpha});
      } else if (value >= best - tol.opt) {
        near_optimal.push_back({value, idx, alpha});
      }
    });
  }
  if (near_optimal.empty())
    throw internal_error("no feasible basic policy spans the prior");

  std::sort(near_optimal.begin(), near_optimal.end(),
            [](const Candidate& a, const Candidate& b) {
              return a.support < b.support;
            });

  SolveResult out;
  out.value = best;
  for (const auto& c : near_optimal)
    out.all_basic_optima.push_back(policy_from(pool, c.support, c.weights));
  out.policy = out.all_basic_optima.front();
  return out;
}

SolveResult solve_optimal(const ReceiverType& type) {
  return optimize_over_pool(type.instance().prior(), extreme_point_pool(type),
                            type.instance().tol());
}

SignalPolicy make_basic(const SignalPolicy& policy, const ReceiverType& type) {
  const Tolerances& tol = type.instance().tol();
  const PolicyCheck check =
      validate_policy(policy, type.instance().prior(), tol);
  if (!check.ok)
    throw std::invalid_argument("make_basic: invalid policy: " +
                                check.violation);

  const auto pool = extreme_point_pool(type);
  // Supports must sit on extreme points; merge duplicates while mapping.
  std::vector<int> support;
  std::vector<double> weight;
  for (const auto& s : policy.supports) {
    int found = -1;
    for (int e = 0; e < static_cast<int>(pool.size()); ++e)
      if ((pool[e].belief.probs() - s.posterior.probs()).norm() <= tol.dedup) {
        found = e;
        break;
      }
    if (found < 0)
      throw std::domain_error(
          "make_basic: support posterior is not an extreme point");
    const auto it = std::find(support.begin(), support.end(), found);
    if (it == support.end()) {
      support.push_back(found);
      weight.push_back(s.weight);
    } else {
      weight[static_cast<size_t>(it - support.begin())] += s.weight;
    }
  }

  const int n_states = type.num_states();
  while (true) {
    const int k = static_cast<int>(support.size());
    Matrix A(n_states, k);
    for (int i = 0; i < k; ++i) A.col(i) = pool[support[i]].belief.probs();
    Eigen::FullPivLU<Matrix> lu(A);
    lu.setThreshold(1e-9);
    if (lu.rank() >= k) break;  // affinely independent: weights are unique

    // Move along a kernel direction to either endpoint of the feasible
    // segment; the value is linear along it, so one endpoint is weakly
    // better and has strictly smaller support.
    const Vector d = lu.kernel().col(0);
    double t_plus = std::numeric_limits<double>::infinity();
    double t_minus = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) {
      if (d[i] < -kWeightFloor) t_plus = std::min(t_plus, -weight[i] / d[i]);
      if (d[i] > kWeightFloor) t_minus = std::min(t_minus, weight[i] / d[i]);
    }
    if (!std::isfinite(t_plus) || !std::isfinite(t_minus))
      throw internal_error("make_basic: unbounded weight segment");

    auto value_at = [&](double t) {
      double v = 0.0;
      for (int i = 0; i < k; ++i)
        v += (weight[i] + t * d[i]) * pool[support[i]].sender_value;
      return v;
    };
    const double t = value_at(t_plus) >= value_at(-t_minus) ? t_plus : -t_minus;

    std::vector<int> next_support;
    std::vector<double> next_weight;
    for (int i = 0; i < k; ++i) {
      const double w = weight[i] + t * d[i];
      if (w > kWeightFloor) {
        next_support.push_back(support[i]);
        next_weight.push_back(w);
      }
    }
    if (next_support.size() >= support.size())
      throw internal_error("make_basic: support failed to shrink");
    support = std::move(next_support);
    weight = std::move(next_weight);
  }

  SignalPolicy out;
  for (size_t i = 0; i < support.size(); ++i)
    out.supports.push_back({weight[i], pool[support[i]].belief});
  return out;
}

}  // namespace persuasion
