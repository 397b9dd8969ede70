#include <doctest.h>

#include "oracles.hpp"
#include "persuasion/core.hpp"
#include "persuasion/fixtures.hpp"
#include "persuasion/geometry.hpp"
#include "persuasion/robustness.hpp"

#include <random>

using namespace persuasion;
using oracles::belief2;

namespace {
const double kTol = 1e-9;
}

TEST_CASE("expected receiver utility") {
  const auto ex2 = example2();
  const ReceiverType ref2 = reference_type(ex2);
  // action a2 (index 1) at belief 0.25 on the second state
  CHECK(expected_receiver_utility(ref2, 1, belief2(0.25)) ==
        doctest::Approx(0.75).epsilon(kTol));

  // point masses recover matrix entries
  for (int a = 0; a < ex2->num_actions(); ++a)
    for (int j = 0; j < 2; ++j)
      CHECK(expected_receiver_utility(ref2, a, Belief::point_mass(2, j)) ==
            doctest::Approx(ex2->receiver_u()(a, j)));

  const auto ex1 = example1();
  CHECK(expected_receiver_utility(reference_type(ex1), 1, belief2(0.5)) ==
        doctest::Approx(0.5).epsilon(kTol));

  // dimension mismatch
  Vector bad(3);
  bad << 0.2, 0.3, 0.5;
  CHECK_THROWS_AS(
      expected_receiver_utility(ref2, 0, Belief::checked(bad)),
      std::invalid_argument);
  CHECK_THROWS_AS(expected_receiver_utility(ref2, 7, belief2(0.5)),
                  std::invalid_argument);
}

TEST_CASE("best replies") {
  const auto ex2 = example2();
  const ReceiverType ref = reference_type(ex2);
  CHECK(best_replies(ref, belief2(0.25), 1e-9) ==
        std::vector<int>{0, 1, 2});  // the three-way indifference point
  CHECK(best_replies(ref, belief2(0.0), 1e-9) == std::vector<int>{0});
  CHECK(best_replies(ref, belief2(1.0), 1e-9) == std::vector<int>{3});
  CHECK_THROWS_AS(best_replies(ref, belief2(0.5), -1.0),
                  std::invalid_argument);
}

TEST_CASE("best replies nonempty and chosen action is one of them") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const auto inst = sample_uniform_instance(2 + trial % 3, 1 + trial % 5, rng);
    const ReceiverType ref = reference_type(inst);
    for (int b = 0; b < 10; ++b) {
      const Belief mu = oracles::random_belief(inst->num_states(), rng);
      const auto replies = best_replies(ref, mu, inst->tol().tie);
      REQUIRE(!replies.empty());
      const IndirectValue iv = indirect_sender_value(ref, mu);
      CHECK(std::find(replies.begin(), replies.end(), iv.chosen) !=
            replies.end());
    }
  }
}

TEST_CASE("indirect sender value") {
  const auto ex2 = example2();
  const ReceiverType ref = reference_type(ex2);

  const IndirectValue spike = indirect_sender_value(ref, belief2(0.25));
  CHECK(spike.value == doctest::Approx(1.0).epsilon(kTol));
  CHECK(spike.chosen == 1);  // a2

  const IndirectValue mid = indirect_sender_value(ref, belief2(0.5));
  CHECK(mid.value == doctest::Approx(0.0).epsilon(kTol));
  CHECK(mid.chosen == 2);  // a3 uniquely best there

  // single-action instance: no alternatives
  Matrix u(1, 2), v(1, 2);
  u << 0.4, 0.6;
  v << 0.3, 0.9;
  Vector prior(2);
  prior << 0.5, 0.5;
  const auto solo = PersuasionInstance::create({"s0", "s1"}, {"a0"},
                                               Belief::checked(prior), u, v);
  const IndirectValue only = indirect_sender_value(reference_type(solo),
                                                   belief2(0.25));
  CHECK(only.chosen == 0);
  CHECK(only.value == doctest::Approx(0.3 * 0.75 + 0.9 * 0.25));
}

TEST_CASE("policy value") {
  const auto ex1 = example1();
  const ReceiverType ref1 = reference_type(ex1);
  SignalPolicy split1;
  split1.supports = {{0.4, belief2(0.0)}, {0.6, belief2(0.5)}};
  CHECK(policy_value(ref1, split1) == doctest::Approx(0.6).epsilon(kTol));

  const auto ex2 = example2();
  const ReceiverType ref2 = reference_type(ex2);
  SignalPolicy split2;
  split2.supports = {{0.6, belief2(0.0)}, {0.4, belief2(0.25)}};
  CHECK(policy_value(ref2, split2) == doctest::Approx(0.4).epsilon(kTol));

  SignalPolicy no_info;
  no_info.supports = {{1.0, ex2->prior()}};
  CHECK(policy_value(ref2, no_info) ==
        doctest::Approx(indirect_sender_value(ref2, ex2->prior()).value));

  SignalPolicy bad;
  bad.supports = {{0.5, belief2(0.0)}, {0.5, belief2(0.4)}};
  CHECK_THROWS_AS(policy_value(ref1, bad), std::invalid_argument);
}

TEST_CASE("policy value is affine in the weights") {
  std::mt19937_64 rng(23);
  const auto inst = sample_uniform_instance(3, 4, rng);
  const ReceiverType ref = reference_type(inst);
  for (int trial = 0; trial < 20; ++trial) {
    const SignalPolicy a = oracles::random_policy(inst->prior(), 3, rng);
    const SignalPolicy c = oracles::random_policy(inst->prior(), 3, rng);
    const double t = 0.3;
    SignalPolicy mix;
    for (const auto& s : a.supports) mix.supports.push_back({(1 - t) * s.weight, s.posterior});
    for (const auto& s : c.supports) mix.supports.push_back({t * s.weight, s.posterior});
    CHECK(policy_value(ref, mix) ==
          doctest::Approx((1 - t) * policy_value(ref, a) +
                          t * policy_value(ref, c))
              .epsilon(1e-10));
  }
}

TEST_CASE("validate policy") {
  SignalPolicy split;
  split.supports = {{0.4, belief2(0.0)}, {0.6, belief2(0.5)}};
  CHECK(validate_policy(split, belief2(0.3)).ok);

  SignalPolicy no_info;
  no_info.supports = {{1.0, belief2(0.3)}};
  CHECK(validate_policy(no_info, belief2(0.3)).ok);

  SignalPolicy off;
  off.supports = {{0.5, belief2(0.0)}, {0.5, belief2(0.4)}};
  const PolicyCheck check = validate_policy(off, belief2(0.3));
  CHECK(!check.ok);
  CHECK(check.violation.find("barycenter") != std::string::npos);
  CHECK(check.residual == doctest::Approx(0.1).epsilon(1e-9));

  SignalPolicy negative;
  negative.supports = {{-0.1, belief2(0.0)}, {1.1, belief2(0.3)}};
  CHECK(!validate_policy(negative, belief2(0.3)).ok);

  SignalPolicy short_sum;
  short_sum.supports = {{0.5, belief2(0.3)}};
  CHECK(!validate_policy(short_sum, belief2(0.3)).ok);
}

TEST_CASE("validate policy agrees with direct barycenter arithmetic") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 200; ++trial) {
    const Belief prior = oracles::random_belief(3, rng);
    SignalPolicy policy = oracles::random_policy(prior, 2 + trial % 3, rng);
    // randomly nudge one posterior to create borderline violations
    if (trial % 2 == 0) {
      Vector p = policy.supports[0].posterior.probs();
      const double eps = (trial % 4 == 0) ? 5e-10 : 5e-8;
      p[0] += eps;
      p[1] -= eps;
      policy.supports[0].posterior = Belief::clamped(p);
    }
    Vector bary = Vector::Zero(3);
    for (const auto& s : policy.supports) bary += s.weight * s.posterior.probs();
    const bool expect =
        (bary - prior.probs()).cwiseAbs().maxCoeff() <= 1e-9;
    CHECK(validate_policy(policy, prior).ok == expect);
  }
}

TEST_CASE("corner types") {
  const auto ex1 = example1();
  const UtilityBox box = example1_box(ex1, 0.1);

  const ReceiverType lo_corner = corner_type(box, 1, CornerMode::inf);
  CHECK(lo_corner.u()(1, 1) == doctest::Approx(0.9));
  CHECK(lo_corner.u()(0, 0) == doctest::Approx(1.0));  // rival at its bounds
  CHECK(lo_corner.u()(0, 1) == doctest::Approx(0.0));

  // this interval convention is deliberately unclipped
  const ReceiverType hi_corner = corner_type(box, 1, CornerMode::sup);
  CHECK(hi_corner.u()(1, 1) == doctest::Approx(1.1));

  // the uniform-width constructor clips to [0,1]
  const UtilityBox clipped = UtilityBox::uniform_delta(ex1, 0.2);
  CHECK(clipped.was_clipped());
  CHECK(corner_type(clipped, 1, CornerMode::sup).u()(1, 1) ==
        doctest::Approx(1.0));
  CHECK(corner_type(clipped, 1, CornerMode::inf).u()(1, 1) ==
        doctest::Approx(0.9));

  // zero width: both corners are the reference
  const UtilityBox degenerate = UtilityBox::uniform_delta(ex1, 0.0);
  CHECK((corner_type(degenerate, 0, CornerMode::inf).u() -
         ex1->receiver_u()).norm() == doctest::Approx(0.0));
  CHECK((corner_type(degenerate, 0, CornerMode::sup).u() -
         ex1->receiver_u()).norm() == doctest::Approx(0.0));
}

TEST_CASE("construction guards") {
  const auto ex1 = example1();

  // reference must sit inside explicit bounds
  Matrix lo = ex1->receiver_u().array() + 0.1;
  CHECK_THROWS_AS(UtilityBox::from_bounds(ex1, lo, ex1->receiver_u()),
                  std::invalid_argument);
  CHECK_THROWS_AS(UtilityBox::uniform_delta(ex1, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(corner_type(example1_box(ex1, 0.1), 5, CornerMode::inf),
                  std::invalid_argument);

  // instances reject out-of-range utilities and degenerate priors
  Matrix u(2, 2), v(2, 2);
  u << 0.5, 1.5, 0.0, 0.2;
  v << 0.5, 0.5, 0.5, 0.5;
  Vector prior(2);
  prior << 0.5, 0.5;
  CHECK_THROWS_AS(PersuasionInstance::create({"s0", "s1"}, {"a0", "a1"},
                                             Belief::checked(prior), u, v),
                  std::invalid_argument);
  u(0, 1) = 0.5;
  Vector dead(2);
  dead << 1.0, 0.0;
  CHECK_THROWS_AS(PersuasionInstance::create({"s0", "s1"}, {"a0", "a1"},
                                             Belief::checked(dead), u, v),
                  std::invalid_argument);
  CHECK_THROWS_AS(PersuasionInstance::create({"s0"}, {"a0"},
                                             Belief::checked(prior), u, v),
                  std::invalid_argument);

  // a box minted for one game rejects an unrelated instance
  const auto ex2 = example2();
  CHECK_THROWS_AS(witness_type_set(ex2, example1_box(ex1, 0.1), 0, 1),
                  std::invalid_argument);
}

TEST_CASE("corner regions nest around every box type") {
  std::mt19937_64 rng(101);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = sample_uniform_instance(2 + trial % 2, 2 + trial % 3, rng);
    const UtilityBox box = UtilityBox::uniform_delta(inst, 0.05);
    const ReceiverType theta = box.sample(rng);
    for (int a = 0; a < inst->num_actions(); ++a) {
      const RegionPolytope inner =
          best_reply_region(corner_type(box, a, CornerMode::inf), a);
      const RegionPolytope mid = best_reply_region(theta, a);
      const RegionPolytope outer =
          best_reply_region(corner_type(box, a, CornerMode::sup), a);
      for (const auto& v : inner.vertices()) {
        CHECK(region_contains(mid, v, inst->tol().mem));
        ++checked;
      }
      for (const auto& v : mid.vertices()) {
        CHECK(region_contains(outer, v, inst->tol().mem));
        ++checked;
      }
    }
  }
  CHECK(checked > 100);  // the sweep actually exercised vertices
}
