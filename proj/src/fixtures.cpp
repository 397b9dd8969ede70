#include "persuasion/fixtures.hpp"

#include <stdexcept>

namespace persuasion {

InstancePtr example1(Tolerances tol) {
  Matrix receiver_u(2, 2);
  receiver_u << 1.0, 0.0,  //
      0.0, 1.0;
  Matrix sender_v(2, 2);
  sender_v << 0.0, 0.0,  //
      1.0, 1.0;
  Vector prior(2);
  prior << 0.7, 0.3;
  return PersuasionInstance::create({"s0", "s1"}, {"a0", "a1"},
                                    Belief::checked(prior),
                                    std::move(receiver_u),
                                    std::move(sender_v), tol);
}

InstancePtr example2(Tolerances tol) {
  Matrix receiver_u(4, 2);
  receiver_u << 1.0, 0.0,  //
      0.9, 0.3,            //
      0.8, 0.6,            //
      0.5, 0.7;
  Matrix sender_v(4, 2);
  sender_v << 0.0, 0.0,  //
      1.0, 1.0,          //
      0.0, 0.0,          //
      0.5, 0.5;
  Vector prior(2);
  prior << 0.9, 0.1;
  return PersuasionInstance::create({"s0", "s1"}, {"a1", "a2", "a3", "a4"},
                                    Belief::checked(prior),
                                    std::move(receiver_u),
                                    std::move(sender_v), tol);
}

UtilityBox example1_box(const InstancePtr& instance, double delta) {
  Matrix lo = instance->receiver_u();
  Matrix hi = instance->receiver_u();
  lo(1, 1) -= delta;
  hi(1, 1) += delta;
  return UtilityBox::from_bounds(instance, std::move(lo), std::move(hi));
}

UtilityBox example2_box(const InstancePtr& instance, double delta) {
  return UtilityBox::uniform_delta(instance, delta, /*clip=*/true);
}

bool is_builtin_example(std::string_view name) {
  return name == "example1" || name == "example2";
}

InstancePtr builtin_example(std::string_view name, Tolerances tol) {
  if (name == "example1") return example1(tol);
  if (name == "example2") return example2(tol);
  throw std::invalid_argument("unknown built-in example: " + std::string(name));
}

UtilityBox builtin_box(const InstancePtr& instance, std::string_view name,
                       double delta) {
  if (name == "example1") return example1_box(instance, delta);
  if (name == "example2") return example2_box(instance, delta);
  throw std::invalid_argument("unknown built-in example: " + std::string(name));
}

}  // namespace persuasion
