// Command-line front end: load or synthesize instances, solve them, audit
// robustness, evaluate regret, and reproduce the built-in examples.

#include <CLI11.hpp>
#include <json.hpp>

#include "persuasion/fixtures.hpp"
#include "persuasion/genericity.hpp"
#include "persuasion/io.hpp"
#include "persuasion/robustness.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using json = nlohmann::ordered_json;
using namespace persuasion;

struct Options {
  std::string instance_arg;
  std::string output = "text";
  std::string out_file;
  double delta = 0.02;
  int samples = 32;
  uint64_t seed = 0;
  double tol_tie = -1.0;
  int resolution = 101;
  int action = -1;
  // generic
  int states = 2;
  int actions = 4;
  int trials = 1000;
};

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

Tolerances make_tolerances(const Options& opt) {
  Tolerances tol;
  if (opt.tol_tie >= 0.0) tol.tie = opt.tol_tie;
  return tol;
}

struct Resolved {
  InstancePtr instance;
  UtilityBox box;
  std::string name;
};

Resolved resolve_instance(const Options& opt) {
  const Tolerances tol = make_tolerances(opt);
  if (is_builtin_example(opt.instance_arg)) {
    InstancePtr inst = builtin_example(opt.instance_arg, tol);
    UtilityBox box = builtin_box(inst, opt.instance_arg, opt.delta);
    return {inst, std::move(box), opt.instance_arg};
  }
  LoadedInstance loaded = load_instance_file(opt.instance_arg, tol);
  UtilityBox box = loaded.box
                       ? *loaded.box
                       : UtilityBox::uniform_delta(loaded.instance, opt.delta);
  return {loaded.instance, std::move(box), opt.instance_arg};
}

void emit(const Options& opt, const std::string& text) {
  if (opt.out_file.empty()) {
    std::cout << text;
    return;
  }
  std::filesystem::path path(opt.out_file);
  if (path.is_relative()) {
    if (const char* dir = std::getenv("PERSUADE_OUTPUT_DIR"))
      path = std::filesystem::path(dir) / path;
  }
  std::ofstream f(path);
  if (!f) throw std::invalid_argument("cannot write " + path.string());
  f << text;
}

json belief_json(const Belief& b) {
  std::vector<double> v(b.probs().data(), b.probs().data() + b.size());
  return json(v);
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    std::vector<double> row(m.cols());
    for (int c = 0; c < m.cols(); ++c) row[c] = m(r, c);
    rows.push_back(row);
  }
  return rows;
}

json policy_json(const SignalPolicy& policy) {
  json supports = json::array();
  for (const auto& s : policy.supports)
    supports.push_back(
        {{"weight", s.weight}, {"posterior", belief_json(s.posterior)}});
  return supports;
}

std::string policy_text(const SignalPolicy& policy) {
  std::string out;
  for (const auto& s : policy.supports) {
    out += "  weight " + fmt(s.weight) + " on (";
    for (int j = 0; j < s.posterior.size(); ++j)
      out += (j ? ", " : "") + fmt(s.posterior[j]);
    out += ")\n";
  }
  return out;
}

int run_solve(const Options& opt) {
  const Resolved r = resolve_instance(opt);
  const auto t0 = std::chrono::steady_clock::now();
  const SolveResult res = solve_optimal(reference_type(r.instance));
  const double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();

  if (opt.output == "machine") {
    json j;
    j["version"] = 1;
    j["command"] = "solve";
    j["instance"] = r.name;
    j["value"] = res.value;
    j["policy"] = policy_json(res.policy);
    json optima = json::array();
    for (const auto& p : res.all_basic_optima) optima.push_back(policy_json(p));
    j["all_basic_optima"] = optima;
    emit(opt, j.dump(2) + "\n");
  } else if (opt.output == "csv") {
    std::string out = "weight";
    for (const auto& s : r.instance->state_labels()) out += ",p_" + s;
    out += "\n";
    for (const auto& s : res.policy.supports) {
      out += fmt(s.weight);
      for (int j = 0; j < s.posterior.size(); ++j)
        out += "," + fmt(s.posterior[j]);
      out += "\n";
    }
    emit(opt, out);
  } else {
    std::string out = "instance: " + r.name + "\n";
    out += "optimal sender value: " + fmt(res.value) + "\n";
    out += "optimal policy:\n" + policy_text(res.policy);
    out += "basic optima: " + std::to_string(res.all_basic_optima.size()) +
           "\nsolve time: " + fmt(ms) + " ms\n";
    emit(opt, out);
  }
  return 0;
}

int run_classify(const Options& opt) {
  const Resolved r = resolve_instance(opt);
  const RobustnessReport report = classify(r.instance, r.box);
  const bool robust = report.verdict == Verdict::ROBUST;

  if (opt.output == "machine") {
    json j;
    j["version"] = 1;
    j["command"] = "classify";
    j["instance"] = r.name;
    j["verdict"] = robust ? "ROBUST" : "FRAGILE";
    j["gap_constant"] = report.gap_constant;
    j["witness_policy"] = policy_json(report.witness_policy);
    json frag = json::array();
    for (const auto& f : report.fragile_posteriors)
      frag.push_back(
          {{"posterior", belief_json(f.posterior)},
           {"inferior_action",
            r.instance->action_labels()[f.inferior_action]}});
    j["fragile_posteriors"] = frag;
    j["witness_type"] =
        report.witness_type ? matrix_json(report.witness_type->u()) : json();
    j["box_lo"] = matrix_json(r.box.lo());
    j["box_hi"] = matrix_json(r.box.hi());
    j["box_clipped"] = r.box.was_clipped();
    j["basic_policies_only"] = true;
    emit(opt, j.dump(2) + "\n");
  } else {
    std::string out = "instance: " + r.name + "\n";
    out += std::string("verdict: ") + (robust ? "ROBUST" : "FRAGILE") + "\n";
    out += (robust ? "certifying optimal policy:\n"
                   : "baseline optimal policy:\n") +
           policy_text(report.witness_policy);
    if (!robust) {
      out += "gap constant: " + fmt(report.gap_constant) + "\n";
      for (const auto& f : report.fragile_posteriors) {
        out += "fragile posterior (";
        for (int j = 0; j < f.posterior.size(); ++j)
          out += (j ? ", " : "") + fmt(f.posterior[j]);
        out += ") with inferior best reply " +
               r.instance->action_labels()[f.inferior_action] + "\n";
      }
      if (report.witness_type) {
        out += "witness receiver type:\n";
        const Matrix& u = report.witness_type->u();
        for (int a = 0; a < u.rows(); ++a) {
          out += "  " + r.instance->action_labels()[a] + ":";
          for (int j = 0; j < u.cols(); ++j) out += " " + fmt(u(a, j));
          out += "\n";
        }
      }
    }
    if (r.box.was_clipped())
      out += "box bounds were clipped to [0,1]\n";
    out += "note: the audit quantifies over basic optimal policies only\n";
    emit(opt, out);
  }
  return 0;
}

int run_regret(const Options& opt) {
  const Resolved r = resolve_instance(opt);
  const SearchResult minreg = search_robust_policy(
      r.instance, r.box, RobustCriterion::minregret, opt.samples, opt.seed);
  const SearchResult maxmin = search_robust_policy(
      r.instance, r.box, RobustCriterion::maxmin, opt.samples, opt.seed);
  const auto types = witness_type_set(r.instance, r.box, opt.samples, opt.seed);
  const TypeEvaluation eval =
      evaluate_policy_over_types(r.instance, minreg.policy, types);

  if (opt.output == "machine") {
    json j;
    j["version"] = 1;
    j["command"] = "regret";
    j["instance"] = r.name;
    j["delta"] = opt.delta;
    j["samples"] = opt.samples;
    j["seed"] = opt.seed;
    j["box_clipped"] = r.box.was_clipped();
    j["minregret"] = {{"score", minreg.score},
                      {"policy", policy_json(minreg.policy)}};
    j["maxmin"] = {{"score", maxmin.score},
                   {"policy", policy_json(maxmin.policy)}};
    json per_type = json::array();
    for (const auto& entry : eval.per_type)
      per_type.push_back({{"opt_value", entry.opt_value},
                          {"policy_value", entry.policy_value}});
    j["evaluation"] = {{"regret", eval.regret},
                       {"min_utility", eval.min_utility},
                       {"per_type", per_type}};
    emit(opt, j.dump(2) + "\n");
  } else if (opt.output == "csv") {
    std::string out = "type,opt_value,policy_value,regret\n";
    for (size_t t = 0; t < eval.per_type.size(); ++t) {
      const auto& entry = eval.per_type[t];
      out += std::to_string(t) + "," + fmt(entry.opt_value) + "," +
             fmt(entry.policy_value) + "," +
             fmt(entry.opt_value - entry.policy_value) + "\n";
    }
    emit(opt, out);
    std::cerr << "minregret " << fmt(minreg.score) << ", maxmin "
              << fmt(maxmin.score) << "\n";
  } else {
    std::string out = "instance: " + r.name + "\n";
    out += "min-regret candidate (regret " + fmt(minreg.score) + "):\n" +
           policy_text(minreg.policy);
    out += "max-min candidate (min utility " + fmt(maxmin.score) + "):\n" +
           policy_text(maxmin.policy);
    out += "min-regret candidate over " + std::to_string(types.size()) +
           " witness types: regret " + fmt(eval.regret) + ", min utility " +
           fmt(eval.min_utility) + "\n";
    out +=
        "scores bound the attainable min-regret from above and the "
        "attainable max-min value from below over the box\n";
    emit(opt, out);
  }
  return 0;
}

int run_adjust(const Options& opt) {
  const Resolved r = resolve_instance(opt);
  const ReceiverType ref = reference_type(r.instance);
  const SolveResult base = solve_optimal(ref);

  // The constructive candidate: move every posterior of the reference
  // optimum into the inf-corner region of its induced action.
  std::vector<Belief> moved;
  for (const auto& s : base.policy.supports) {
    const int induced = indirect_sender_value(ref, s.posterior).chosen;
    const RegionPolytope target = best_reply_region(
        corner_type(r.box, induced, CornerMode::inf), induced);
    if (target.empty())
      throw std::domain_error(
          "no adjustment exists: inf-corner region for induced action " +
          r.instance->action_labels()[induced] + " is empty");
    moved.push_back(nearest_point_in_region(target, s.posterior));
  }
  const AdjustmentResult adj =
      build_adjustment(base.policy, moved, r.instance->prior());
  const double bound = loss_bound(adj.gamma, r.instance->prior());
  const auto types = witness_type_set(r.instance, r.box, opt.samples, opt.seed);
  const TypeEvaluation eval =
      evaluate_policy_over_types(r.instance, adj.policy, types);

  if (opt.output == "machine") {
    json j;
    j["version"] = 1;
    j["command"] = "adjust";
    j["instance"] = r.name;
    j["delta"] = opt.delta;
    j["policy"] = policy_json(adj.policy);
    j["gamma"] = adj.gamma;
    j["shift_norm"] = adj.shift_norm;
    j["correction_weight"] = adj.correction_weight;
    j["correction_posterior"] = belief_json(adj.correction_posterior);
    j["loss_bound"] = bound;
    j["regret_bound"] = 2.0 * bound;
    j["regret"] = eval.regret;
    j["min_utility"] = eval.min_utility;
    emit(opt, j.dump(2) + "\n");
  } else {
    std::string out = "instance: " + r.name + "\n";
    out += "adjusted policy:\n" + policy_text(adj.policy);
    out += "gamma (max displacement): " + fmt(adj.gamma) + "\n";
    out += "barycenter shift ||r||: " + fmt(adj.shift_norm) + "\n";
    out += "correction weight: " + fmt(adj.correction_weight) + "\n";
    out += "value-loss bound D(gamma): " + fmt(bound) + "\n";
    out += "regret bound 2 D(gamma): " + fmt(2.0 * bound) + "\n";
    out += "measured over witness types: regret " + fmt(eval.regret) +
           ", min utility " + fmt(eval.min_utility) + "\n";
    emit(opt, out);
  }
  return 0;
}

int run_generic(const Options& opt) {
  const GenericityOutcome out =
      genericity_trial(opt.states, opt.actions, opt.trials, opt.seed);
  const auto frac = [&](int k) {
    return std::to_string(k) + "/" + std::to_string(out.trials);
  };
  std::string summary =
      "generic N=" + std::to_string(opt.states) +
      " M=" + std::to_string(opt.actions) + " seed=" + std::to_string(opt.seed) +
      ": stability " + frac(out.pass_stability) + ", unique-optimum " +
      frac(out.pass_lrs) + ", robust " + frac(out.pass_classifier) +
      " (utilities i.i.d. uniform, prior uniform with floor 0.05)\n";

  if (opt.output == "machine") {
    json j;
    j["version"] = 1;
    j["command"] = "generic";
    j["states"] = opt.states;
    j["actions"] = opt.actions;
    j["trials"] = out.trials;
    j["seed"] = out.seed;
    j["pass_stability"] = out.pass_stability;
    j["pass_lrs"] = out.pass_lrs;
    j["pass_classifier"] = out.pass_classifier;
    j["prior_sampling"] = "uniform entries normalized, floor 0.05";
    emit(opt, j.dump(2) + "\n");
  } else if (opt.output == "csv") {
    std::string csv = "trial,stability,unique_optimum,robust,failing_action\n";
    for (const auto& rec : out.records) {
      csv += std::to_string(rec.index) + "," + (rec.stability ? "1" : "0") +
             "," + (rec.lrs ? "1" : "0") + "," + (rec.robust ? "1" : "0") +
             "," +
             (rec.failing_action >= 0 ? std::to_string(rec.failing_action)
                                      : "") +
             "\n";
    }
    emit(opt, csv);
    std::cerr << summary;
  } else {
    emit(opt, summary);
  }
  return 0;
}

int run_inspect(const Options& opt) {
  const Resolved r = resolve_instance(opt);
  const ReceiverType ref = reference_type(r.instance);

  if (opt.output == "csv") {
    if (r.instance->num_states() != 2)
      throw std::domain_error("csv inspection emits the two-state curve only");
    const auto rows = emit_indirect_utility_curve(r.instance, opt.resolution);
    std::string out = "p,value,chosen\n";
    for (const auto& row : rows)
      out += fmt(row.p) + "," + fmt(row.value) + "," +
             r.instance->action_labels()[row.chosen] + "\n";
    emit(opt, out);
    return 0;
  }

  if (opt.action >= r.instance->num_actions())
    throw std::invalid_argument("--action index out of range");
  std::string out = "instance: " + r.name + "\n";
  for (int a = 0; a < r.instance->num_actions(); ++a) {
    if (opt.action >= 0 && a != opt.action) continue;
    out += debug_dump(best_reply_region(ref, a), r.instance->state_labels(),
                      r.instance->action_labels());
  }
  if (r.instance->num_states() == 2) {
    const auto rows = emit_indirect_utility_curve(r.instance, opt.resolution);
    out += "indirect utility curve (p = probability of " +
           r.instance->state_labels()[1] + "):\n";
    for (const auto& row : rows)
      out += "  p " + fmt(row.p) + " value " + fmt(row.value) + " action " +
             r.instance->action_labels()[row.chosen] + "\n";
  }
  emit(opt, out);
  return 0;
}

int run_example(const Options& opt) {
  const Tolerances tol = make_tolerances(opt);
  const InstancePtr inst = builtin_example(opt.instance_arg, tol);
  const UtilityBox box = builtin_box(inst, opt.instance_arg, opt.delta);
  emit(opt, serialize_instance(inst, box));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"persuade: concavification solver and robustness auditor for "
               "finite persuasion instances"};
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&](CLI::App* cmd, bool with_instance) {
    if (with_instance)
      cmd->add_option("instance", opt.instance_arg,
                      "instance file, or built-in name example1|example2")
          ->required();
    cmd->add_option("--output", opt.output, "text | machine | csv")
        ->check(CLI::IsMember({"text", "machine", "csv"}));
    cmd->add_option("--out", opt.out_file,
                    "write the report to this file (PERSUADE_OUTPUT_DIR "
                    "prefixes relative paths)");
    cmd->add_option("--delta", opt.delta, "box width for commands that need one");
    cmd->add_option("--samples", opt.samples, "sampled box types");
    cmd->add_option("--seed", opt.seed, "RNG seed");
    cmd->add_option("--tol-tie", opt.tol_tie, "override the tie tolerance");
  };

  CLI::App* solve = app.add_subcommand("solve", "optimal value and policy");
  add_common(solve, true);
  CLI::App* classify_cmd =
      app.add_subcommand("classify", "continuity/robustness audit");
  add_common(classify_cmd, true);
  CLI::App* regret =
      app.add_subcommand("regret", "min-regret and max-min candidates");
  add_common(regret, true);
  CLI::App* adjust =
      app.add_subcommand("adjust", "inf-corner adjustment of the optimum");
  add_common(adjust, true);
  CLI::App* generic =
      app.add_subcommand("generic", "random-instance stability rates");
  add_common(generic, false);
  generic->add_option("--states", opt.states, "state count")->check(CLI::Range(2, 8));
  generic->add_option("--actions", opt.actions, "action count")
      ->check(CLI::Range(1, 16));
  generic->add_option("--trials", opt.trials, "trial count")
      ->check(CLI::PositiveNumber);
  CLI::App* inspect =
      app.add_subcommand("inspect", "region dump and indirect-utility curve");
  add_common(inspect, true);
  inspect->add_option("--action", opt.action, "restrict to one action index");
  inspect->add_option("--resolution", opt.resolution, "curve grid points")
      ->check(CLI::Range(2, 1000000));
  CLI::App* example =
      app.add_subcommand("example", "print a built-in instance file");
  add_common(example, true);

  try {
    app.parse(argc, argv);
    if (solve->parsed()) return run_solve(opt);
    if (classify_cmd->parsed()) return run_classify(opt);
    if (regret->parsed()) return run_regret(opt);
    if (adjust->parsed()) return run_adjust(opt);
    if (generic->parsed()) return run_generic(opt);
    if (inspect->parsed()) return run_inspect(opt);
    if (example->parsed()) return run_example(opt);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const persuasion::internal_error& e) {
    std::cerr << "internal consistency error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
