#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "fairness/report.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int status = fairness::cli::run(args, out, err);
  return {status, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("fairscope_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string value_of(const std::string& doc, const std::string& key) {
  return fairness::Document::parse(doc).get(key).value_or("");
}

}  // namespace

TEST_CASE("list names every experiment") {
  const auto r = run({"list"});
  CHECK(r.status == 0);
  for (const char* id : {"recommender", "equal-rates", "judge", "appendix", "impossibility"})
    CHECK(r.out.find(id) != std::string::npos);
}

TEST_CASE("unknown experiments and overrides fail with a listing") {
  const auto r = run({"simulate", "nosuch"});
  CHECK(r.status == 1);
  CHECK(r.err.find("recommender, equal-rates, judge, appendix, impossibility") !=
        std::string::npos);
  const auto bad_key = run({"simulate", "equal-rates", "p_kids=0.2"});
  CHECK(bad_key.status == 1);
  CHECK(bad_key.err.find("p_men") != std::string::npos);
  CHECK(run({"simulate", "equal-rates", "p_men=abc"}).status == 1);
  CHECK(run({"simulate", "equal-rates", "p_men"}).status == 1);
  CHECK(run({"simulate", "equal-rates", "p_men=0.7"}).err.find("not below 1/2") !=
        std::string::npos);
  CHECK(run({"simulate", "judge"}).err.find("--convention") != std::string::npos);
  CHECK(run({"--format", "yaml", "list"}).status == 2);
  CHECK(run({}).status == 2);
  CHECK(run({"--help"}).status == 0);
}

TEST_CASE("simulate writes the report and plot series") {
  const auto dir = scratch("recommender");
  const auto r = run({"simulate", "recommender", "--out", dir.string(), "--format", "doc",
                      "--grid", "256", "--samples", "100000"});
  REQUIRE(r.status == 0);
  const auto doc = slurp(dir / "report.doc");
  CHECK(doc == r.out);
  CHECK(std::abs(std::stod(value_of(doc, "metric.women.eu")) - 0.25) <= 1e-4);
  CHECK(value_of(doc, "parameter.men_map") == "shift:0.2");
  CHECK(slurp(dir / "utility_act.csv").rfind("x,y\n0,-1\n", 0) == 0);
  CHECK(fs::exists(dir / "men_map.csv"));

  const auto again = run({"simulate", "recommender", "--out", dir.string(), "--format", "doc",
                          "--grid", "256", "--samples", "100000"});
  CHECK(again.out == r.out);

  const auto text = run({"simulate", "equal-rates", "p_women=0.3", "--format", "text"});
  CHECK(text.out.find("metric.disparity: 0.04\n") != std::string::npos);
}

TEST_CASE("simulate appendix reports both conditions") {
  const auto r = run({"simulate", "appendix", "reshapes=10", "--format", "doc"});
  REQUIRE(r.status == 0);
  CHECK(std::stod(value_of(r.out, "metric.a.eq_star_gap")) <= 1e-6);
  CHECK(std::stod(value_of(r.out, "metric.b.eq_star_gap")) <= 1e-6);
  CHECK(std::stod(value_of(r.out, "metric.x_gap")) > 0.01);
  CHECK(fairness::inconsistent_verdicts(fairness::Document::parse(r.out)).empty());
}

TEST_CASE("audit of a small file echoes exact rates") {
  const auto dir = scratch("audit");
  std::ofstream(dir / "four.csv") << "group,score,outcome,decision\n"
                                     "a,0.9,1,1\na,0.8,0,1\na,0.3,1,0\na,0.1,0,0\n"
                                     "b,0.7,1,1\nb,0.6,0,0\nb,0.4,1,0\nb,0.2,0,0\n";
  const auto r = run({"audit", "--input", (dir / "four.csv").string(), "--format", "doc"});
  REQUIRE(r.status == 0);
  CHECK(value_of(r.out, "metric.group.a.fpr") == "0.5");
  CHECK(value_of(r.out, "metric.group.b.fpr") == "0");
  CHECK(value_of(r.out, "metric.separation.fpr_gap") == "0.5");
  CHECK(value_of(r.out, "verdict.separation.holds") == "false");

  std::ofstream(dir / "bad.csv") << "group,score,outcome,decision\na,0.5,1,1\nb,1.2,0,0\n";
  const auto bad = run({"audit", "--input", (dir / "bad.csv").string()});
  CHECK(bad.status == 1);
  CHECK(bad.err.find("row 3") != std::string::npos);

  std::ofstream(dir / "one.csv") << "group,score,outcome,decision\na,0.5,1,1\na,0.2,0,0\n";
  const auto one = run({"audit", "--input", (dir / "one.csv").string()});
  CHECK(one.status == 1);
  CHECK(one.err.find("two groups") != std::string::npos);
  CHECK(run({"audit"}).status == 1);
}

TEST_CASE("judge sample audits back to the analytic rates") {
  const auto dir = scratch("judge");
  const auto sim = run({"simulate", "judge", "--convention", "per-outcome", "--emit-sample",
                        "1000000", "--out", dir.string(), "--format", "doc"});
  REQUIRE(sim.status == 0);
  const auto audit = run({"audit", "--input", (dir / "sample.csv").string(), "--format", "doc"});
  REQUIRE(audit.status == 0);
  CHECK(std::stod(value_of(audit.out, "metric.separation.max_gap")) < 0.01);
  CHECK(std::stod(value_of(audit.out, "metric.sufficiency.max_gap")) > 0.02);
  for (const char* key : {"men.fpr", "men.fnr", "women.fpr", "women.fnr"}) {
    const double analytic = std::stod(value_of(sim.out, std::string("metric.") + key));
    const double empirical = std::stod(value_of(audit.out, std::string("metric.group.") + key));
    CHECK(std::abs(analytic - empirical) < 0.01);
  }
  // Byte-identical sample for the same configuration.
  const auto first = slurp(dir / "sample.csv");
  run({"simulate", "judge", "--convention", "per-outcome", "--emit-sample", "1000000", "--out",
       dir.string(), "--format", "doc"});
  CHECK(slurp(dir / "sample.csv") == first);
}
