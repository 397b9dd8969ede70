#include <doctest.h>

#include "oracles.hpp"
#include "persuasion/fixtures.hpp"
#include "persuasion/solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

using namespace persuasion;
using oracles::belief2;

namespace {

// weight found for a posterior with the given second-state probability
double weight_at(const SignalPolicy& policy, double p) {
  for (const auto& s : policy.supports)
    if (std::abs(s.posterior[1] - p) < 1e-7) return s.weight;
  return -1.0;
}

InstancePtr example2_lowered_a2(double drop) {
  const auto base = example2();
  Matrix u = base->receiver_u();
  u(1, 0) -= drop;
  u(1, 1) -= drop;
  Vector prior(2);
  prior << 0.9, 0.1;
  return PersuasionInstance::create(base->state_labels(),
                                    base->action_labels(),
                                    Belief::checked(prior), u,
                                    base->sender_v());
}

}  // namespace

TEST_CASE("extreme point pools of the fixtures") {
  const auto pool2 = extreme_point_pool(reference_type(example2()));
  std::map<int, double> values;
  for (const auto& sp : pool2)
    values[static_cast<int>(std::lround(sp.belief[1] * 100))] = sp.sender_value;
  CHECK(values == std::map<int, double>{
                      {0, 0.0}, {25, 1.0}, {75, 0.5}, {100, 0.5}});

  const auto pool1 = extreme_point_pool(reference_type(example1()));
  std::map<int, double> values1;
  for (const auto& sp : pool1)
    values1[static_cast<int>(std::lround(sp.belief[1] * 100))] = sp.sender_value;
  CHECK(values1 == std::map<int, double>{{0, 0.0}, {50, 1.0}, {100, 1.0}});

  // one action: the pool is the simplex corners
  Matrix u(1, 3), v(1, 3);
  u << 0.1, 0.2, 0.3;
  v << 1.0, 0.0, 0.5;
  Vector prior(3);
  prior << 0.3, 0.3, 0.4;
  const auto solo = PersuasionInstance::create({"s0", "s1", "s2"}, {"a0"},
                                               Belief::checked(prior), u, v);
  CHECK(extreme_point_pool(reference_type(solo)).size() == 3);
}

TEST_CASE("optimal policies of the fixtures") {
  const SolveResult r1 = solve_optimal(reference_type(example1()));
  CHECK(r1.value == doctest::Approx(0.6).epsilon(1e-9));
  CHECK(weight_at(r1.policy, 0.0) == doctest::Approx(0.4).epsilon(1e-9));
  CHECK(weight_at(r1.policy, 0.5) == doctest::Approx(0.6).epsilon(1e-9));
  CHECK(r1.all_basic_optima.size() == 1);

  const SolveResult r2 = solve_optimal(reference_type(example2()));
  CHECK(r2.value == doctest::Approx(0.4).epsilon(1e-9));
  CHECK(weight_at(r2.policy, 0.0) == doctest::Approx(0.6).epsilon(1e-9));
  CHECK(weight_at(r2.policy, 0.25) == doctest::Approx(0.4).epsilon(1e-9));

  // with the spike weakened the optimum splits to the far threshold
  const SolveResult r3 =
      solve_optimal(reference_type(example2_lowered_a2(0.05)));
  CHECK(r3.value == doctest::Approx(1.0 / 15.0).epsilon(1e-9));
  CHECK(weight_at(r3.policy, 0.0) == doctest::Approx(13.0 / 15.0).epsilon(1e-9));
  CHECK(weight_at(r3.policy, 0.75) == doctest::Approx(2.0 / 15.0).epsilon(1e-9));
}

TEST_CASE("value ties produce every basic optimum in canonical order") {
  // both actions worth 1 to the sender: two distinct optimal splits
  Matrix u(2, 2), v(2, 2);
  u << 1.0, 0.0, 0.0, 1.0;
  v << 1.0, 1.0, 1.0, 1.0;
  Vector prior(2);
  prior << 0.7, 0.3;
  const auto inst = PersuasionInstance::create({"s0", "s1"}, {"a0", "a1"},
                                               Belief::checked(prior), u, v);
  const SolveResult res = solve_optimal(reference_type(inst));
  CHECK(res.value == doctest::Approx(1.0).epsilon(1e-9));
  REQUIRE(res.all_basic_optima.size() == 2);
  // lexicographic support order: the {p=1, p=0} split enumerates before the
  // {p=0.5, p=0} one
  CHECK(weight_at(res.all_basic_optima[0], 1.0) ==
        doctest::Approx(0.3).epsilon(1e-9));
  CHECK(weight_at(res.all_basic_optima[1], 0.5) ==
        doctest::Approx(0.6).epsilon(1e-9));
  CHECK(res.policy.supports.size() == 2);
}

TEST_CASE("optimum dominates no-information and full-information") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    const auto inst = sample_uniform_instance(2 + trial % 3, 1 + trial % 5, rng);
    const ReceiverType ref = reference_type(inst);
    const SolveResult res = solve_optimal(ref);

    const double no_info = indirect_sender_value(ref, inst->prior()).value;
    double full_info = 0.0;
    for (int j = 0; j < inst->num_states(); ++j)
      full_info += inst->prior()[j] *
                   indirect_sender_value(
                       ref, Belief::point_mass(inst->num_states(), j))
                       .value;
    CHECK(res.value >= no_info - 1e-9);
    CHECK(res.value >= full_info - 1e-9);
  }
}

TEST_CASE("every returned optimum is basic") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const auto inst = sample_uniform_instance(2 + trial % 3, 2 + trial % 4, rng);
    const SolveResult res = solve_optimal(reference_type(inst));
    for (const auto& policy : res.all_basic_optima) {
      const int k = static_cast<int>(policy.supports.size());
      CHECK(k <= inst->num_states());
      Matrix A(inst->num_states(), k);
      for (int i = 0; i < k; ++i) A.col(i) = policy.supports[i].posterior.probs();
      Eigen::ColPivHouseholderQR<Matrix> qr(A);
      qr.setThreshold(1e-9);
      CHECK(qr.rank() == k);  // affinely independent posteriors
      CHECK(validate_policy(policy, inst->prior(), inst->tol()).ok);
      CHECK(policy_value(reference_type(inst), policy) ==
            doctest::Approx(res.value).epsilon(1e-9));
    }
  }
}

TEST_CASE("two-state optimum matches the grid concave envelope") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = sample_uniform_instance(2, 1 + trial % 6, rng);
    const ReceiverType ref = reference_type(inst);
    const double expected =
        oracles::envelope_at_2state(ref, inst->prior()[1], 10001);
    CHECK(solve_optimal(ref).value == doctest::Approx(expected).epsilon(1e-3));
  }
}

TEST_CASE("make_basic") {
  // prior 0.4 on the second state so three extreme points carry weight
  const auto base = example2();
  Vector prior(2);
  prior << 0.6, 0.4;
  const auto inst = PersuasionInstance::create(
      base->state_labels(), base->action_labels(), Belief::checked(prior),
      base->receiver_u(), base->sender_v());
  const ReceiverType ref = reference_type(inst);

  SignalPolicy wide;
  wide.supports = {{0.3, belief2(0.0)}, {0.4, belief2(0.25)},
                   {0.3, belief2(1.0)}};
  const double before = policy_value(ref, wide);
  const SignalPolicy basic = make_basic(wide, ref);
  CHECK(basic.supports.size() == 2);
  CHECK(weight_at(basic, 0.25) == doctest::Approx(0.8).epsilon(1e-9));
  CHECK(weight_at(basic, 1.0) == doctest::Approx(0.2).epsilon(1e-9));
  const double after = policy_value(ref, basic);
  CHECK(after >= before - 1e-12);
  CHECK(after == doctest::Approx(0.9).epsilon(1e-9));

  // idempotent on basic inputs
  const SignalPolicy again = make_basic(basic, ref);
  REQUIRE(again.supports.size() == basic.supports.size());
  for (size_t i = 0; i < again.supports.size(); ++i)
    CHECK(again.supports[i].weight ==
          doctest::Approx(basic.supports[i].weight).epsilon(1e-12));

  // duplicated posteriors merge first
  SignalPolicy doubled;
  doubled.supports = {{0.2, belief2(0.25)}, {0.2, belief2(0.25)},
                      {0.3, belief2(0.0)}, {0.3, belief2(1.0)}};
  const SignalPolicy merged = make_basic(doubled, ref);
  CHECK(merged.supports.size() <= 3);
  CHECK(validate_policy(merged, inst->prior()).ok);

  // non-extreme support is rejected
  SignalPolicy off;
  off.supports = {{0.5, belief2(0.3)}, {0.5, belief2(0.5)}};
  CHECK_THROWS_AS(make_basic(off, ref), std::domain_error);
}

TEST_CASE("reference optimum nearly dominates nearby box types") {
  // a small version of the shrinking-box upper-semicontinuity sweep
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = sample_uniform_instance(2 + trial % 2, 2 + trial % 3, rng);
    const double base = solve_optimal(reference_type(inst)).value;
    double prev = std::numeric_limits<double>::infinity();
    for (const double delta : {0.1, 0.01, 0.001}) {
      const UtilityBox box = UtilityBox::uniform_delta(inst, delta);
      double overshoot = 0.0;
      std::mt19937_64 type_rng(1000 + trial);
      for (int k = 0; k < 30; ++k) {
        const ReceiverType theta = box.sample(type_rng);
        overshoot =
            std::max(overshoot, solve_optimal(theta).value - base);
      }
      CHECK(overshoot <= prev + 1e-12);
      prev = overshoot;
    }
    CHECK(prev < 0.01);
  }
}
