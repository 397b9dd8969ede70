#include <doctest.h>

#include "oracles.hpp"
#include "persuasion/fixtures.hpp"
#include "persuasion/io.hpp"
#include "persuasion/robustness.hpp"

#include <cmath>

using namespace persuasion;

TEST_CASE("built-in examples round-trip through the instance format") {
  for (const char* name : {"example1", "example2"}) {
    const InstancePtr inst = builtin_example(name);
    const UtilityBox box = builtin_box(inst, name, 0.1);
    const std::string text = serialize_instance(inst, box);

    const LoadedInstance loaded = parse_instance_text(text, name);
    REQUIRE(loaded.box.has_value());
    CHECK((loaded.instance->receiver_u() - inst->receiver_u()).norm() == 0.0);
    CHECK((loaded.instance->sender_v() - inst->sender_v()).norm() == 0.0);
    CHECK((loaded.instance->prior().probs() - inst->prior().probs()).norm() ==
          0.0);
    CHECK((loaded.box->lo() - box.lo()).norm() == 0.0);
    CHECK((loaded.box->hi() - box.hi()).norm() == 0.0);

    // identical solve and classification after the round trip
    CHECK(solve_optimal(reference_type(loaded.instance)).value ==
          solve_optimal(reference_type(inst)).value);
    CHECK(classify_verdict(loaded.instance) == classify_verdict(inst));
  }
}

TEST_CASE("parser reports line-precise errors") {
  const std::string missing_prior =
      "states s0 s1\n"
      "actions a0\n"
      "receiver_u\n"
      "0.5 0.5\n"
      "sender_v\n"
      "1 1\n";
  CHECK_THROWS_WITH_AS(parse_instance_text(missing_prior, "f"),
                       doctest::Contains("missing 'prior'"),
                       std::invalid_argument);

  const std::string bad_number =
      "states s0 s1\n"
      "actions a0\n"
      "prior 0.5 oops\n"
      "receiver_u\n"
      "0.5 0.5\n"
      "sender_v\n"
      "1 1\n";
  CHECK_THROWS_WITH_AS(parse_instance_text(bad_number, "f"),
                       doctest::Contains("f:3:"), std::invalid_argument);

  const std::string short_row =
      "states s0 s1\n"
      "actions a0 a1\n"
      "prior 0.5 0.5\n"
      "receiver_u\n"
      "0.5 0.5\n"
      "0.5\n"
      "sender_v\n"
      "1 1\n"
      "0 0\n";
  CHECK_THROWS_WITH_AS(parse_instance_text(short_row, "f"),
                       doctest::Contains("f:6:"), std::invalid_argument);

  const std::string degenerate_prior =
      "states s0 s1\n"
      "actions a0\n"
      "prior 1 0\n"
      "receiver_u\n"
      "0.5 0.5\n"
      "sender_v\n"
      "1 1\n";
  CHECK_THROWS_AS(parse_instance_text(degenerate_prior, "f"),
                  std::invalid_argument);

  const std::string both_boxes =
      "states s0 s1\n"
      "actions a0\n"
      "prior 0.5 0.5\n"
      "receiver_u\n"
      "0.5 0.5\n"
      "sender_v\n"
      "1 1\n"
      "box delta 0.1\n"
      "box lo\n"
      "0.4 0.4\n"
      "box hi\n"
      "0.6 0.6\n";
  CHECK_THROWS_WITH_AS(parse_instance_text(both_boxes, "f"),
                       doctest::Contains("either"), std::invalid_argument);
}

TEST_CASE("box forms parse") {
  const std::string with_delta =
      "states s0 s1\n"
      "actions a0\n"
      "prior 0.5 0.5\n"
      "receiver_u\n"
      "0.5 0.5\n"
      "sender_v\n"
      "1 1\n"
      "box delta 0.2\n";
  const LoadedInstance loaded = parse_instance_text(with_delta, "f");
  REQUIRE(loaded.box.has_value());
  CHECK(loaded.box->lo()(0, 0) == doctest::Approx(0.4));
  CHECK(loaded.box->hi()(0, 0) == doctest::Approx(0.6));
  CHECK(loaded.box->strictly_wraps());
}

TEST_CASE("indirect utility curves") {
  const auto ex2 = example2();
  const auto rows = emit_indirect_utility_curve(ex2, 5);

  // breakpoints appear exactly once
  int at_quarter = 0, at_three_quarters = 0;
  for (const auto& row : rows) {
    if (std::abs(row.p - 0.25) < 1e-9) {
      ++at_quarter;
      CHECK(row.value == doctest::Approx(1.0));
      CHECK(row.chosen == 1);
    }
    if (std::abs(row.p - 0.75) < 1e-9) {
      ++at_three_quarters;
      CHECK(row.value == doctest::Approx(0.5));
      CHECK(row.chosen == 3);
    }
    if (row.p < 0.25 - 1e-9) CHECK(row.value == doctest::Approx(0.0));
    if (row.p > 0.25 + 1e-9 && row.p < 0.75 - 1e-9)
      CHECK(row.value == doctest::Approx(0.0));
    if (row.p > 0.75 + 1e-9) CHECK(row.value == doctest::Approx(0.5));
  }
  CHECK(at_quarter == 1);
  CHECK(at_three_quarters == 1);

  // two-action fixture: single step at one half
  const auto ex1 = example1();
  for (const auto& row : emit_indirect_utility_curve(ex1, 11)) {
    if (row.p >= 0.5 - 1e-9)
      CHECK(row.value == doctest::Approx(1.0));
    else
      CHECK(row.value == doctest::Approx(0.0));
  }

  // one action: a constant curve
  Matrix u(1, 2), v(1, 2);
  u << 0.5, 0.5;
  v << 0.25, 0.75;
  Vector prior(2);
  prior << 0.5, 0.5;
  const auto solo = PersuasionInstance::create({"s0", "s1"}, {"a0"},
                                               Belief::checked(prior), u, v);
  const auto flat = emit_indirect_utility_curve(solo, 4);
  for (const auto& row : flat)
    CHECK(row.value == doctest::Approx(0.25 + 0.5 * row.p));

  // guards
  CHECK_THROWS_AS(emit_indirect_utility_curve(ex1, 1), std::invalid_argument);
  Vector prior3(3);
  prior3 << 0.3, 0.3, 0.4;
  Matrix u3(1, 3), v3(1, 3);
  u3 << 0.1, 0.2, 0.3;
  v3 << 0.1, 0.2, 0.3;
  const auto three = PersuasionInstance::create({"s0", "s1", "s2"}, {"a0"},
                                                Belief::checked(prior3), u3, v3);
  CHECK_THROWS_AS(emit_indirect_utility_curve(three, 10), std::domain_error);
}

TEST_CASE("tolerance overrides travel with the instance") {
  Tolerances loose;
  loose.tie = 1e-3;
  const InstancePtr inst = example2(loose);
  CHECK(inst->tol().tie == 1e-3);
  // with a sloppy tie tolerance the near-indifferent actions merge
  const auto replies = best_replies(reference_type(inst),
                                    oracles::belief2(0.2505), inst->tol().tie);
  CHECK(replies.size() >= 2);
}
