#include "vpen/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "vpen/errors.hpp"
#include "vpen/instance_io.hpp"
#include "vpen/trace_io.hpp"

namespace vpen {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Config reader: JSON-pointer paths in errors, unknown keys rejected.
class Node {
 public:
  Node(const json& node, std::string path) : node_(node), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  bool is_object() const { return node_.is_object(); }
  bool is_array() const { return node_.is_array(); }
  bool is_string() const { return node_.is_string(); }
  bool is_number() const { return node_.is_number(); }

  void expect_object(std::initializer_list<const char*> allowed) const {
    if (!node_.is_object()) fail("expected an object");
    for (const auto& [key, value] : node_.items()) {
      const bool known = std::any_of(allowed.begin(), allowed.end(),
                                     [&](const char* a) { return key == a; });
      if (!known) throw ParseError(path_ + "/" + key, "unknown field");
    }
  }

  bool has(const char* key) const { return node_.contains(key); }
  Node at(const char* key) const { return Node(node_.at(key), path_ + "/" + key); }
  Node at(std::size_t i) const { return Node(node_.at(i), path_ + "/" + std::to_string(i)); }

  std::size_t size() const {
    if (!node_.is_array()) fail("expected an array");
    return node_.size();
  }

  double number() const {
    if (!node_.is_number()) fail("expected a number");
    return node_.get<double>();
  }

  long long integer() const {
    if (!node_.is_number_integer()) fail("expected an integer");
    return node_.get<long long>();
  }

  std::string string() const {
    if (!node_.is_string()) fail("expected a string");
    return node_.get<std::string>();
  }

  Eigen::VectorXd vector() const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(size()));
    for (std::size_t i = 0; i < node_.size(); ++i) v[static_cast<Eigen::Index>(i)] = at(i).number();
    return v;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(path_, what); }

 private:
  const json& node_;
  std::string path_;
};

const std::vector<std::string> kStrategies = {"geometric", "adaptive", "combined",
                                              "periodic_combined"};

MethodSpec parse_method(const Node& n, MethodSpec m) {
  if (n.is_string()) {
    m.strategy = n.string();
    if (std::find(kStrategies.begin(), kStrategies.end(), m.strategy) == kStrategies.end()) {
      n.fail("unknown strategy '" + m.strategy + "'");
    }
    return m;
  }
  n.expect_object({"strategy", "theta", "delta", "period", "scaling", "gamma", "tau1", "eps_feas",
                   "eps_phi", "max_iters"});
  if (n.has("strategy")) {
    const Node s = n.at("strategy");
    m.strategy = s.string();
    if (std::find(kStrategies.begin(), kStrategies.end(), m.strategy) == kStrategies.end()) {
      s.fail("unknown strategy '" + m.strategy +
             "' (expected geometric, adaptive, combined or periodic_combined)");
    }
  }
  if (n.has("theta")) m.theta = n.at("theta").number();
  if (n.has("delta")) m.delta = n.at("delta").number();
  if (n.has("period")) m.period = static_cast<int>(n.at("period").integer());
  if (n.has("scaling")) {
    const Node s = n.at("scaling");
    m.scaling = s.string();
    if (m.scaling != "unit" && m.scaling != "inverse_violation") {
      s.fail("unknown scaling '" + m.scaling + "' (expected unit or inverse_violation)");
    }
  }
  if (n.has("gamma")) m.gamma = n.at("gamma").number();
  if (n.has("tau1")) {
    const Node t = n.at("tau1");
    if (t.is_number()) {
      m.tau1.reset();
      m.tau1_scale = t.number();
    } else {
      m.tau1 = t.vector();
    }
  }
  if (n.has("eps_feas")) m.eps_feas = n.at("eps_feas").number();
  if (n.has("eps_phi")) m.eps_phi = n.at("eps_phi").number();
  if (n.has("max_iters")) m.max_iters = static_cast<int>(n.at("max_iters").integer());
  return m;
}

SubsolverConfig parse_subsolver(const Node& n) {
  n.expect_object({"grid_points_per_dim", "multistart_count", "local_iters", "local_tol", "seed"});
  SubsolverConfig s;
  if (n.has("grid_points_per_dim")) {
    s.grid_points_per_dim = static_cast<int>(n.at("grid_points_per_dim").integer());
  }
  if (n.has("multistart_count")) {
    s.multistart_count = static_cast<int>(n.at("multistart_count").integer());
  }
  if (n.has("local_iters")) s.local_iters = static_cast<int>(n.at("local_iters").integer());
  if (n.has("local_tol")) s.local_tol = n.at("local_tol").number();
  if (n.has("seed")) s.rng_seed = static_cast<std::uint64_t>(n.at("seed").integer());
  return s;
}

DiagnosticsSpec parse_diagnostics(const Node& n) {
  n.expect_object({"checks", "tau", "c_star", "radius", "samples", "seed"});
  DiagnosticsSpec d;
  if (n.has("checks")) {
    const Node list = n.at("checks");
    for (std::size_t i = 0; i < list.size(); ++i) d.checks.push_back(list.at(i).string());
  }
  if (n.has("tau")) {
    const Node t = n.at("tau");
    if (t.is_number()) {
      d.tau_scale = t.number();
    } else {
      d.tau = t.vector();
    }
  }
  if (n.has("c_star")) d.c_star = n.at("c_star").number();
  if (n.has("radius")) d.radius = n.at("radius").number();
  if (n.has("samples")) d.samples = static_cast<int>(n.at("samples").integer());
  if (n.has("seed")) d.seed = static_cast<std::uint64_t>(n.at("seed").integer());
  return d;
}

void write_atomically(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out) throw Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

PenaltyParameter parameter_from(const ProblemInstance& inst, const std::optional<Eigen::VectorXd>& coords,
                                double scale, const std::string& where) {
  if (coords) {
    if (coords->size() != inst.cone.dim()) {
      throw PreconditionError(where + ": expected " + std::to_string(inst.cone.dim()) +
                              " coordinates for " + inst.cone.describe() + ", got " +
                              std::to_string(coords->size()));
    }
    return PenaltyParameter(inst.cone, *coords);
  }
  return scale * unit_parameter(inst.cone);
}

PenaltyParameter diagnostics_tau(const ExperimentConfig& cfg, const ProblemInstance& inst) {
  const DiagnosticsSpec& d = cfg.diagnostics;
  if (d.tau || d.tau_scale) return parameter_from(inst, d.tau, d.tau_scale.value_or(1.0), "diagnostics.tau");
  if (inst.exact_tau) return parameter_from(inst, inst.exact_tau, 1.0, "exact_tau");
  throw PreconditionError("diagnostics.tau: instance '" + inst.name +
                          "' records no exact_tau, so a tau must be given");
}

const ReferenceOptimum& reference_for(const ProblemInstance& inst, const std::string& check) {
  if (!inst.reference) {
    throw PreconditionError("diagnostics.checks: '" + check + "' needs a reference optimum and '" +
                            inst.name + "' has none");
  }
  return *inst.reference;
}

CheckResult error_bound_check(const ProblemInstance& inst, const PenaltyParameter& tau,
                              const DiagnosticsSpec& d) {
  const ReferenceOptimum& ref = reference_for(inst, "error_bound");
  const LocalExactnessEstimate est =
      estimate_error_bound(inst, ref.x, d.radius, d.samples, std::nullopt, d.seed);
  CheckResult r{"error_bound", CheckStatus::Pass, 0.0, est.samples, ""};
  if (est.vacuous) {
    r.notes = "no infeasible sample in the ball: bound holds vacuously";
    return r;
  }
  r.slack = p_k(tau) - est.c_required;
  // The threshold is only sufficient, so falling short of it proves nothing.
  if (r.slack < 0.0) r.status = CheckStatus::Inconclusive;
  r.notes = "alpha = " + fmt(est.alpha) + ", eta = " + fmt(est.eta) + ", L = " +
            fmt(est.lipschitz) + ", c_required = " + fmt(est.c_required) + ", p_K(tau) = " +
            fmt(p_k(tau));
  return r;
}

}  // namespace

ExperimentConfig parse_config(const json& doc, const fs::path& base_dir) {
  const Node root(doc, "");
  root.expect_object({"instance", "method", "methods", "subsolver", "diagnostics", "output"});
  if (!root.has("instance")) throw ParseError("/instance", "missing field");
  ExperimentConfig cfg;
  cfg.base_dir = base_dir;
  cfg.instance = root.at("instance").string();
  if (root.has("method")) cfg.method = parse_method(root.at("method"), MethodSpec{});
  if (root.has("methods")) {
    const Node list = root.at("methods");
    for (std::size_t i = 0; i < list.size(); ++i) {
      cfg.methods.push_back(parse_method(list.at(i), cfg.method));
    }
  }
  if (root.has("subsolver")) cfg.subsolver = parse_subsolver(root.at("subsolver"));
  if (root.has("diagnostics")) cfg.diagnostics = parse_diagnostics(root.at("diagnostics"));
  if (root.has("output")) {
    const Node out = root.at("output");
    out.expect_object({"dir"});
    if (out.has("dir")) cfg.out_dir = out.at("dir").string();
  }
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), "cannot open config file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string(), e.what());
  }
  return parse_config(doc, path.has_parent_path() ? path.parent_path() : fs::path("."));
}

ProblemInstance resolve_instance(const std::string& ref, const fs::path& base_dir) {
  const auto names = bundled_names();
  if (std::find(names.begin(), names.end(), ref) != names.end()) {
    return build_instance(bundled_spec(ref));
  }
  fs::path p(ref);
  if (p.is_relative() && !fs::exists(p)) p = base_dir / p;
  if (!fs::exists(p)) {
    std::string known;
    for (const auto& n : names) known += (known.empty() ? "" : ", ") + n;
    throw PreconditionError("instance: '" + ref + "' is neither a bundled instance (" + known +
                            ") nor a readable file");
  }
  return build_instance(load_instance_file(p));
}

MethodConfig make_method(const MethodSpec& spec, const ProblemInstance& inst,
                         const std::string& where) {
  Strategy strategy;
  if (spec.strategy == "geometric") {
    strategy = Geometric{spec.theta};
  } else if (spec.strategy == "adaptive") {
    strategy = Adaptive{};
  } else if (spec.strategy == "combined") {
    strategy = Combined{spec.delta};
  } else if (spec.strategy == "periodic_combined") {
    strategy = PeriodicCombined{spec.delta, spec.period};
  } else {
    throw PreconditionError(where + ".strategy: unknown strategy '" + spec.strategy + "'");
  }
  const Scaling scaling =
      spec.scaling == "unit" ? Scaling{UnitScaling{}} : Scaling{InverseViolation{spec.gamma}};
  MethodConfig m{strategy, scaling, parameter_from(inst, spec.tau1, spec.tau1_scale, where + ".tau1"),
                 spec.eps_feas, spec.eps_phi, spec.max_iters};
  try {
    m.validate();
  } catch (const PreconditionError& e) {
    std::string msg = e.what();
    if (where != "method" && msg.rfind("method.", 0) == 0) msg = where + msg.substr(6);
    throw PreconditionError(msg);
  }
  return m;
}

int cmd_run(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.subsolver.validate();
  const ProblemInstance inst = resolve_instance(cfg.instance, cfg.base_dir);
  const MethodConfig method = make_method(cfg.method, inst);
  const RunTrace trace = run_method(inst, method, cfg.subsolver);

  write_atomically(cfg.out_dir / "trace.csv", trace_to_csv(trace));
  write_atomically(cfg.out_dir / "summary.json", trace_summary(trace, inst.name).dump(2) + "\n");
  log << inst.name << " " << strategy_name(trace.strategy) << ": " << to_string(trace.outcome)
      << " after " << trace.records.size() << " iterations, f = " << fmt(trace.last().f_value)
      << ", infeas = " << fmt(trace.last().infeas) << "\n";
  return trace.outcome == Outcome::MaxItersReached ? 2 : 0;
}

int cmd_compare(const ExperimentConfig& cfg, std::ostream& log) {
  if (cfg.methods.size() < 2) {
    throw PreconditionError("methods: compare needs at least 2 strategies, got " +
                            std::to_string(cfg.methods.size()));
  }
  cfg.subsolver.validate();
  const ProblemInstance inst = resolve_instance(cfg.instance, cfg.base_dir);
  std::vector<MethodConfig> configs;
  for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
    configs.push_back(make_method(cfg.methods[i], inst, "methods[" + std::to_string(i) + "]"));
  }

  std::ostringstream csv;
  csv << "strategy,scaling,outcome,iterations,total_evaluations,final_infeas,f_gap,final_p_k_tau,"
         "final_dual_norm_tau,notes\n";
  json rows = json::array();
  bool any_max_iters = false;
  for (const MethodConfig& m : configs) {
    const RunTrace trace = run_method(inst, m, cfg.subsolver);
    const IterateRecord& last = trace.last();
    std::string notes;
    if (std::holds_alternative<Adaptive>(m.strategy) && inst.cone.kind() != ConeKind::Orthant) {
      notes = "heuristic (non-orthant Theorem 4)";
    }
    const std::string gap =
        inst.reference ? format_double(std::abs(last.f_value - inst.reference->f)) : "";
    any_max_iters = any_max_iters || trace.outcome == Outcome::MaxItersReached;
    csv << strategy_name(m.strategy) << ',' << scaling_name(m.scaling) << ','
        << to_string(trace.outcome) << ',' << trace.records.size() << ','
        << trace.total_evaluations() << ',' << format_double(last.infeas) << ',' << gap << ','
        << format_double(p_k(last.tau)) << ',' << format_double(dual_norm(last.tau)) << ','
        << notes << '\n';
    json row{{"strategy", strategy_name(m.strategy)},
             {"scaling", scaling_name(m.scaling)},
             {"outcome", to_string(trace.outcome)},
             {"iterations", trace.records.size()},
             {"total_evaluations", trace.total_evaluations()},
             {"final_infeas", last.infeas},
             {"final_f", last.f_value},
             {"final_p_k_tau", p_k(last.tau)},
             {"final_dual_norm_tau", dual_norm(last.tau)},
             {"notes", notes}};
    row["f_gap"] = inst.reference ? json(std::abs(last.f_value - inst.reference->f)) : json();
    rows.push_back(std::move(row));
    log << strategy_name(m.strategy) << ": " << to_string(trace.outcome) << " in "
        << trace.records.size() << " iterations\n";
  }
  write_atomically(cfg.out_dir / "comparison.csv", csv.str());
  write_atomically(cfg.out_dir / "comparison.json",
                   json{{"instance", inst.name}, {"rows", std::move(rows)}}.dump(2) + "\n");
  return any_max_iters ? 2 : 0;
}

DiagnosticsReport run_diagnostics(const ExperimentConfig& cfg) {
  cfg.subsolver.validate();
  const ProblemInstance inst = resolve_instance(cfg.instance, cfg.base_dir);
  const DiagnosticsSpec& d = cfg.diagnostics;
  const auto valid = check_names();
  std::vector<std::string> checks = d.checks.empty() ? valid : d.checks;
  for (const auto& c : checks) {
    if (std::find(valid.begin(), valid.end(), c) == valid.end()) {
      std::string known;
      for (const auto& v : valid) known += (known.empty() ? "" : ", ") + v;
      throw PreconditionError("diagnostics.checks: unknown check '" + c + "' (valid: " + known +
                              ")");
    }
  }
  const bool wants_theorem4 =
      std::find(checks.begin(), checks.end(), "theorem4_limit") != checks.end();
  if (wants_theorem4 && inst.cone.kind() != ConeKind::Orthant) {
    if (d.checks.empty()) {
      checks.erase(std::find(checks.begin(), checks.end(), "theorem4_limit"));
    } else {
      throw PreconditionError("diagnostics.checks: theorem4_limit applies to orthant cones only, '" +
                              inst.name + "' uses " + inst.cone.describe());
    }
  }
  if (!(d.radius > 0.0)) throw PreconditionError("diagnostics.radius: must be > 0");
  if (d.samples < 1) throw PreconditionError("diagnostics.samples: must be >= 1");
  const PenaltyParameter tau = diagnostics_tau(cfg, inst);
  make_method(cfg.method, inst);

  DiagnosticsReport report;
  for (const auto& name : checks) {
    if (name == "lemma2") {
      MethodSpec m = cfg.method;
      m.strategy = "geometric";
      report.checks.push_back(
          check_lemma2(run_method(inst, make_method(m, inst), cfg.subsolver)));
    } else if (name == "exactness_by_value") {
      report.checks.push_back(check_exactness_by_value(inst, tau, cfg.subsolver));
    } else if (name == "error_bound") {
      report.checks.push_back(error_bound_check(inst, tau, d));
    } else if (name == "local_exactness") {
      const ReferenceOptimum& ref = reference_for(inst, name);
      report.checks.push_back(
          check_local_exactness(inst, tau, ref.x, d.radius, d.samples, d.seed + 4));
    } else if (name == "sublevel_empty") {
      report.checks.push_back(check_sublevel_empty(inst, tau, cfg.subsolver));
    } else if (name == "comparison_principle") {
      report.checks.push_back(
          check_comparison_principle(inst, tau, cfg.subsolver, d.c_star, 1000, d.seed + 6));
    } else if (name == "theorem4_limit") {
      MethodSpec m = cfg.method;
      m.strategy = "adaptive";
      const RunTrace trace = run_method(inst, make_method(m, inst), cfg.subsolver);
      report.checks.push_back(check_theorem4_limit(trace, inst, cfg.subsolver));
    }
  }
  return report;
}

int cmd_diagnose(const ExperimentConfig& cfg, std::ostream& log) {
  const DiagnosticsReport report = run_diagnostics(cfg);
  const std::string table = report.render_table();
  write_atomically(cfg.out_dir / "diagnostics.json", report.to_json().dump(2) + "\n");
  write_atomically(cfg.out_dir / "diagnostics.txt", table);
  log << table;
  for (const auto& c : report.checks) {
    if (c.status == CheckStatus::Fail) log << "FAILED: " << c.name << "\n";
  }
  return report.all_passed() ? 0 : 1;
}

void cmd_list_instances(std::ostream& out, const std::optional<fs::path>& write_dir) {
  for (const auto& name : bundled_names()) {
    const InstanceSpec spec = bundled_spec(name);
    const ProblemInstance inst = build_instance(spec);
    out << name << "  family=" << inst.family << "  dim=" << inst.dim()
        << "  cone=" << inst.cone.describe();
    if (inst.reference) out << "  f*=" << format_double(inst.reference->f);
    out << "\n";
    if (write_dir) {
      write_atomically(*write_dir / (name + ".json"), serialize_instance(spec).dump(2) + "\n");
    }
  }
}

void cmd_list_checks(std::ostream& out) {
  for (const auto& name : check_names()) out << name << "\n";
}

int run_verb(const std::string& verb, const std::optional<fs::path>& config,
             const std::optional<fs::path>& out_dir, const std::optional<std::uint64_t>& seed,
             std::ostream& out, std::ostream& err) {
  try {
    if (verb == "list-instances") {
      cmd_list_instances(out, out_dir);
      return 0;
    }
    if (verb == "list-checks") {
      cmd_list_checks(out);
      return 0;
    }
    if (verb != "run" && verb != "compare" && verb != "diagnose") {
      throw PreconditionError("unknown command '" + verb + "'");
    }
    if (!config) throw PreconditionError("--config is required for '" + verb + "'");
    ExperimentConfig cfg = load_config(*config);
    if (out_dir) cfg.out_dir = *out_dir;
    if (seed) {
      cfg.subsolver.rng_seed = *seed;
      cfg.diagnostics.seed = *seed;
    }
    if (verb == "run") return cmd_run(cfg, out);
    if (verb == "compare") return cmd_compare(cfg, out);
    return cmd_diagnose(cfg, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace vpen
