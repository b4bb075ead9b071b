#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "vpen/errors.hpp"
#include "vpen/experiment.hpp"

using namespace vpen;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "vpen_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const nlohmann::json& doc) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << doc.dump(2);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

struct Outcome {
  int code;
  std::string out, err;
};

Outcome verb(const std::string& name, const fs::path& config, const fs::path& out_dir,
             std::optional<std::uint64_t> seed = std::nullopt) {
  std::ostringstream out, err;
  const int code = run_verb(name, config, out_dir, seed, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("config defaults") {
  const ExperimentConfig c = parse_config(nlohmann::json{{"instance", "nlp_circle"}});
  CHECK(c.instance == "nlp_circle");
  CHECK(c.method.strategy == "geometric");
  CHECK(c.method.theta == 10.0);
  CHECK(c.method.scaling == "inverse_violation");
  CHECK(c.method.max_iters == 100);
  CHECK(c.methods.empty());
  CHECK(c.diagnostics.checks.empty());
  CHECK(c.diagnostics.radius == 0.3);
  CHECK(c.diagnostics.samples == 200);
  CHECK(c.out_dir == "out");
}

TEST_CASE("config errors name the field") {
  auto where = [](const nlohmann::json& doc) {
    try {
      parse_config(doc);
    } catch (const ParseError& e) {
      return e.where();
    }
    return std::string("<no error>");
  };
  CHECK(where(nlohmann::json::object()) == "/instance");
  CHECK(where({{"instance", "nlp_circle"}, {"method", {{"thta", 3}}}}) == "/method/thta");
  CHECK(where({{"instance", "nlp_circle"}, {"method", {{"theta", "big"}}}}) == "/method/theta");
  CHECK(where({{"instance", "nlp_circle"}, {"bogus", 1}}) == "/bogus");
  CHECK(where({{"instance", "nlp_circle"}, {"methods", {{{"delta", 0.2}, {"oops", 1}}}}}) == "/methods/0/oops");
}

TEST_CASE("methods entries override the base method") {
  const ExperimentConfig c = parse_config(
      {{"instance", "nlp_mixed"}, {"method", {{"max_iters", 7}}}, {"methods", {"adaptive", {{"strategy", "combined"}, {"delta", 0.3}}}}});
  REQUIRE(c.methods.size() == 2);
  CHECK(c.methods[0].strategy == "adaptive");
  CHECK(c.methods[0].max_iters == 7);
  CHECK(c.methods[1].strategy == "combined");
  CHECK(c.methods[1].delta == 0.3);
}

TEST_CASE("run with a minimal config") {
  const fs::path dir = scratch("minimal");
  const auto r = verb("run", write_config(dir, {{"instance", "nlp_circle"}}), dir / "out");
  CHECK(r.code == 0);
  CHECK(r.err.empty());
  const auto csv = lines(slurp(dir / "out" / "trace.csv"));
  REQUIRE(csv.size() >= 2);
  CHECK(csv.size() <= 9);
  CHECK(csv[0] == "n,phi_value,f_value,infeas,p_k_tau,dual_norm_tau,s_n,evals");
  const auto summary = nlohmann::json::parse(slurp(dir / "out" / "summary.json"));
  CHECK(summary["outcome"] == "converged_feasible");
  CHECK(std::abs(summary["final_f"].get<double>() + std::sqrt(2.0)) <= 1e-3);
  CHECK_FALSE(fs::exists(dir / "out" / "trace.csv.tmp"));
}

TEST_CASE("invalid theta exits 1 and names the constraint") {
  const fs::path dir = scratch("theta");
  const auto r = verb("run", write_config(dir, {{"instance", "nlp_circle"}, {"method", {{"theta", 0.5}}}}), dir / "out");
  CHECK(r.code == 1);
  CHECK(r.err.find("method.theta: require θ > 1") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "out" / "trace.csv"));
}

TEST_CASE("hitting max_iters exits 2") {
  const fs::path dir = scratch("maxiters");
  const auto r = verb("run",
                      write_config(dir, {{"instance", "nlp_circle"},
                                         {"method", {{"max_iters", 1}, {"tau1", 0.01}}}}),
                      dir / "out");
  CHECK(r.code == 2);
  CHECK(nlohmann::json::parse(slurp(dir / "out" / "summary.json"))["outcome"] == "max_iters_reached");
}

TEST_CASE("compare three strategies on the mixed instance") {
  const fs::path dir = scratch("compare");
  const auto r = verb("compare",
                      write_config(dir, {{"instance", "nlp_mixed"}, {"methods", {"geometric", "adaptive", "combined"}}}),
                      dir / "out");
  CHECK(r.code == 0);
  const auto csv = lines(slurp(dir / "out" / "comparison.csv"));
  REQUIRE(csv.size() == 4);
  CHECK(csv[0] ==
        "strategy,scaling,outcome,iterations,total_evaluations,final_infeas,f_gap,final_p_k_tau,final_dual_norm_tau,notes");
  const auto doc = nlohmann::json::parse(slurp(dir / "out" / "comparison.json"));
  REQUIRE(doc["rows"].size() == 3);
  for (const auto& row : doc["rows"]) {
    CHECK(row["outcome"] == "converged_feasible");
    CHECK(row["f_gap"].get<double>() <= 1e-3);
  }
  CHECK(doc["rows"][1]["strategy"] == "adaptive");
  CHECK(doc["rows"][1]["notes"] == "");
}

TEST_CASE("compare needs two strategies") {
  const fs::path dir = scratch("compare_one");
  const auto r = verb("compare", write_config(dir, {{"instance", "nlp_mixed"}, {"methods", {"geometric"}}}), dir / "out");
  CHECK(r.code == 1);
  CHECK(r.err.find("at least 2") != std::string::npos);
}

TEST_CASE("adaptive on a PSD instance is tagged heuristic") {
  const fs::path dir = scratch("compare_sdp");
  const auto r = verb("compare", write_config(dir, {{"instance", "sdp_active"}, {"methods", {"geometric", "adaptive"}}}),
                      dir / "out");
  CHECK(r.code == 0);
  const auto doc = nlohmann::json::parse(slurp(dir / "out" / "comparison.json"));
  CHECK(doc["rows"][0]["notes"] == "");
  CHECK(doc["rows"][1]["notes"] == "heuristic (non-orthant Theorem 4)");
}

TEST_CASE("diagnose") {
  SUBCASE("circle at tau = 10 passes") {
    const fs::path dir = scratch("diag_ok");
    const auto r = verb("diagnose",
                        write_config(dir, {{"instance", "nlp_circle"},
                                           {"diagnostics", {{"tau", 10}, {"checks", {"exactness_by_value", "sublevel_empty", "lemma2"}}}}}),
                        dir / "out");
    CHECK(r.code == 0);
    const auto doc = nlohmann::json::parse(slurp(dir / "out" / "diagnostics.json"));
    CHECK(doc["all_passed"] == true);
    CHECK(doc["checks"].size() == 3);
    CHECK(fs::exists(dir / "out" / "diagnostics.txt"));
  }
  SUBCASE("negative control fixture fails") {
    const auto r = verb("diagnose", fs::path(VPEN_FIXTURES) / "negative_control.json", scratch("diag_neg"));
    CHECK(r.code == 1);
    CHECK(r.out.find("FAILED: exactness_by_value") != std::string::npos);
    CHECK(r.out.find("FAILED: sublevel_empty") != std::string::npos);
  }
  SUBCASE("theorem4 on a PSD instance is refused") {
    const fs::path dir = scratch("diag_sdp");
    const auto r = verb("diagnose",
                        write_config(dir, {{"instance", "sdp_active"}, {"diagnostics", {{"checks", {"theorem4_limit"}}}}}),
                        dir / "out");
    CHECK(r.code == 1);
    CHECK(r.err.find("orthant") != std::string::npos);
  }
  SUBCASE("unknown check lists the valid names") {
    const fs::path dir = scratch("diag_unknown");
    const auto r = verb("diagnose",
                        write_config(dir, {{"instance", "nlp_circle"}, {"diagnostics", {{"checks", {"lemma3"}}}}}),
                        dir / "out");
    CHECK(r.code == 1);
    CHECK(r.err.find("'lemma3'") != std::string::npos);
    CHECK(r.err.find("comparison_principle") != std::string::npos);
  }
}

TEST_CASE("instance files written by list-instances load by path") {
  const fs::path dir = scratch("files");
  std::ostringstream out, err;
  CHECK(run_verb("list-instances", std::nullopt, dir / "instances", std::nullopt, out, err) == 0);
  CHECK(lines(out.str()).size() == 6);
  CHECK(out.str().find("control_active  family=control  dim=20") != std::string::npos);
  REQUIRE(fs::exists(dir / "instances" / "nlp_mixed.json"));
  const auto r = verb("run", write_config(dir, {{"instance", "instances/nlp_mixed.json"}}), dir / "out");
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(slurp(dir / "out" / "summary.json"))["instance"] == "nlp_mixed");

  const auto missing = verb("run", write_config(dir, {{"instance", "instances/none.json"}}), dir / "out2");
  CHECK(missing.code == 1);
}

TEST_CASE("reruns are byte identical and the seed override is honored") {
  const fs::path dir = scratch("determinism");
  const fs::path cfg = write_config(dir, {{"instance", "nlp_mixed"}, {"method", {{"strategy", "adaptive"}, {"tau1", 0.05}}}});
  CHECK(verb("run", cfg, dir / "a").code == 0);
  CHECK(verb("run", cfg, dir / "b").code == 0);
  CHECK(slurp(dir / "a" / "trace.csv") == slurp(dir / "b" / "trace.csv"));
  CHECK(slurp(dir / "a" / "summary.json") == slurp(dir / "b" / "summary.json"));

  CHECK(verb("run", cfg, dir / "c", 12345).code == 0);
  CHECK(verb("run", cfg, dir / "d", 12345).code == 0);
  CHECK(slurp(dir / "c" / "trace.csv") == slurp(dir / "d" / "trace.csv"));
}

TEST_CASE("verbs without a config") {
  std::ostringstream out, err;
  CHECK(run_verb("run", std::nullopt, std::nullopt, std::nullopt, out, err) == 1);
  CHECK(err.str().find("--config") != std::string::npos);
  std::ostringstream out2, err2;
  CHECK(run_verb("list-checks", std::nullopt, std::nullopt, std::nullopt, out2, err2) == 0);
  CHECK(lines(out2.str()).size() == 7);
}
