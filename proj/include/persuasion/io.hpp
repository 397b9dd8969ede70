#pragma once

#include "persuasion/types.hpp"

#include <optional>

namespace persuasion {

struct LoadedInstance {
  InstancePtr instance;
  std::optional<UtilityBox> box;
};

/// Parses the instance text format (see README). Errors carry the source name
/// and 1-based line number.
LoadedInstance parse_instance_text(const std::string& text,
                                   const std::string& source_name,
                                   Tolerances tol = {});

LoadedInstance load_instance_file(const std::string& path, Tolerances tol = {});

/// Emits the text format; numbers are written with enough digits to
/// round-trip exactly.
std::string serialize_instance(const InstancePtr& instance,
                               const std::optional<UtilityBox>& box = {});

struct CurveRow {
  double p = 0.0;      // probability of the second state
  double value = 0.0;  // sender's indirect utility
  int chosen = -1;
};

/// The sender's indirect-utility step function for two-state instances:
/// a uniform grid of `resolution` points merged with every region breakpoint
/// (each listed exactly once). Throws std::domain_error unless N == 2.
std::vector<CurveRow> emit_indirect_utility_curve(const InstancePtr& instance,
                                                  int resolution);

}  // namespace persuasion
