#pragma once

#include "persuasion/types.hpp"

#include <string_view>

namespace persuasion {

/// Two states with prior 0.3 on the second; the receiver takes the sender's
/// preferred action a1 only when convinced the second state is likely.
InstancePtr example1(Tolerances tol = {});

/// Two states with prior 0.1 on the second; four actions, the sender's
/// favourite (a2) being a best reply only at the single belief 0.25.
InstancePtr example2(Tolerances tol = {});

/// Interval convention of the first fixture: only u(a1, s1) is uncertain,
/// inside [1-delta, 1+delta]. Deliberately unclipped — the upper end sits
/// above the normalized range and is a legitimate receiver type.
UtilityBox example1_box(const InstancePtr& instance, double delta);

/// Uniform width-delta box over every entry, clipped to [0,1].
UtilityBox example2_box(const InstancePtr& instance, double delta);

bool is_builtin_example(std::string_view name);
InstancePtr builtin_example(std::string_view name, Tolerances tol = {});
UtilityBox builtin_box(const InstancePtr& instance, std::string_view name,
                       double delta);

}  // namespace persuasion
