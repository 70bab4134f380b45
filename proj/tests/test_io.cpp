#include <doctest.h>

#include <sstream>

#include "fairness/audit_dataset.hpp"
#include "fairness/errors.hpp"
#include "fairness/format.hpp"
#include "fairness/report.hpp"

using namespace fairness;

namespace {

std::string parse_error_of(const std::string& csv) {
  std::istringstream in(csv);
  try {
    AuditDataset::read_csv(in);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("CSV round trip keeps every bit") {
  AuditDataset data;
  data.add("men", 0.1 + 0.2, 1, 0);
  data.add("women", 1.0 / 3.0, 0);
  data.add("men", 1.0, 1, 1);
  std::ostringstream out;
  data.write_csv(out);
  std::istringstream in(out.str());
  const auto back = AuditDataset::read_csv(in);
  REQUIRE(back.size() == 3);
  CHECK(back.labels() == data.labels());
  CHECK(back.records()[0].score == 0.1 + 0.2);
  CHECK(back.records()[1].score == 1.0 / 3.0);
  CHECK_FALSE(back.records()[1].decision.has_value());
  CHECK(*back.records()[2].decision == 1);
  CHECK_FALSE(back.has_decisions());
  std::ostringstream again;
  back.write_csv(again);
  CHECK(again.str() == out.str());
}

TEST_CASE("CSV errors name the row") {
  const std::string header = "group,score,outcome,decision\n";
  CHECK(parse_error_of(header + "a,1.2,0,1\n").find("row 2") != std::string::npos);
  CHECK(parse_error_of(header + "a,0.5,1,1\nb,0.5,2,1\n").find("row 3") != std::string::npos);
  CHECK(parse_error_of(header + "a,abc,0,1\n").find("row 2") != std::string::npos);
  CHECK(parse_error_of(header + "a,0.5,0\n").find("row 2") != std::string::npos);
  CHECK(parse_error_of(header + "a,0.5,0,7\n").find("row 2") != std::string::npos);
  CHECK_FALSE(parse_error_of("g,s,y,d\n").empty());
  CHECK(parse_error_of(header + "a,0.5,0,\nb,0.25,1,1\n").empty());
}

TEST_CASE("dataset validation") {
  AuditDataset data;
  CHECK_THROWS_AS(data.add("a", -0.1, 0), InvalidArgument);
  CHECK_THROWS_AS(data.add("a", 0.5, 3), InvalidArgument);
  CHECK_THROWS_AS(data.push_back(AuditRecord{5, 0.5, 0, std::nullopt}), InvalidArgument);
  CHECK_THROWS_AS(data.index_of("nobody"), UnknownGroupError);
  CHECK(data.intern("x") == 0);
  CHECK(data.intern("y") == 1);
  CHECK(data.intern("x") == 0);
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.25) == "0.25");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(std::optional<double>{}) == "undefined");
  CHECK(format_exact(0.1 + 0.2) == "0.30000000000000004");
  CHECK(std::strtod(format_exact(1.0 / 7.0).c_str(), nullptr) == 1.0 / 7.0);
}

TEST_CASE("documents render and parse") {
  Document d;
  d.set("b.x", 0.5);
  d.set("a", "text");
  d.set("b.x", 0.75);
  d.set("flag", true);
  d.set("missing", std::optional<double>{});
  d.set_count("n", 12);
  CHECK(d.render(OutputFormat::kDocument) ==
        "b.x = 0.75\na = text\nflag = true\nmissing = undefined\nn = 12\n");
  CHECK(d.render(OutputFormat::kText).rfind("b.x: 0.75\n", 0) == 0);
  const auto back = Document::parse(d.render(OutputFormat::kDocument));
  CHECK(back.entries() == d.entries());
  CHECK_THROWS_AS(Document::parse("novalue\n"), ParseError);
  CHECK_THROWS_AS(parse_output_format("json"), InvalidArgument);
}

TEST_CASE("report verdicts can be re-derived from the rendered document") {
  ExperimentReport r;
  r.id = "demo";
  r.add_metric("gap", 0.002);
  r.add_metric("other", std::nullopt);
  CHECK_FALSE(r.add_verdict("small", "gap", Comparison::kAtMost, 1e-3).holds);
  CHECK(r.add_verdict("large", "gap", Comparison::kAbove, 1e-3).holds);
  CHECK_THROWS_AS(r.add_verdict("bad", "other", Comparison::kAbove, 0.0), InvalidArgument);
  CHECK_THROWS_AS(r.metric("nope"), InvalidArgument);
  r.series.push_back({"curve", {{0.0, 1.0}, {0.5, 0.25}}});
  CHECK(r.series[0].to_csv() == "x,y\n0,1\n0.5,0.25\n");

  const auto doc = Document::parse(r.to_document().render(OutputFormat::kDocument));
  CHECK(inconsistent_verdicts(doc).empty());
  CHECK(*doc.get("series.curve.points") == "2");
  CHECK(*doc.get("verdict.small.comparison") == "at-most");

  auto tampered = doc;
  tampered.set("verdict.small.holds", true);
  CHECK(inconsistent_verdicts(tampered) == std::vector<std::string>{"small"});
}

TEST_CASE("metric structures serialize with stable keys") {
  const auto c = to_document(ConfusionCounts{1, 2, 3, 4});
  CHECK(*c.get("fn") == "3");
  const auto r = to_document(RatePair{0.5, std::nullopt});
  CHECK(*r.get("fnr") == "undefined");
  CaseBreakdown b;
  b.cases[1] = {0.5, 0.25};
  const auto bd = to_document(b);
  CHECK(*bd.get("case2.loss") == "0.25");
  CHECK(*bd.get("total_loss") == "0.25");
}
