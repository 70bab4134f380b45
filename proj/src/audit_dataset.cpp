#include "fairness/audit_dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "fairness/errors.hpp"
#include "fairness/format.hpp"

namespace fairness {

namespace {

void check_record(const AuditRecord& r, std::size_t n_labels) {
  if (r.group >= n_labels) throw InvalidArgument("record refers to an unregistered group");
  if (!(r.score >= 0.0 && r.score <= 1.0)) {
    throw InvalidArgument("score " + format_number(r.score) + " outside [0,1]");
  }
  if (r.outcome > 1) throw InvalidArgument("outcome must be 0 or 1");
  if (r.decision && *r.decision > 1) throw InvalidArgument("decision must be 0 or 1");
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

AuditDataset::AuditDataset(std::vector<std::string> labels) {
  for (const auto& l : labels) intern(l);
}

std::uint32_t AuditDataset::intern(const std::string& label) {
  if (auto idx = find(label)) return *idx;
  if (label.empty()) throw InvalidArgument("group label must not be empty");
  labels_.push_back(label);
  return static_cast<std::uint32_t>(labels_.size() - 1);
}

std::optional<std::uint32_t> AuditDataset::find(const std::string& label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::uint32_t>(it - labels_.begin());
}

std::uint32_t AuditDataset::index_of(const std::string& label) const {
  if (auto idx = find(label)) return *idx;
  throw UnknownGroupError(label);
}

void AuditDataset::add(const std::string& label, double score, int outcome,
                       std::optional<int> decision) {
  if (outcome != 0 && outcome != 1) throw InvalidArgument("outcome must be 0 or 1");
  if (decision && *decision != 0 && *decision != 1) {
    throw InvalidArgument("decision must be 0 or 1");
  }
  if (!(score >= 0.0 && score <= 1.0)) throw InvalidArgument("score must lie in [0,1]");
  AuditRecord r;
  r.group = intern(label);
  r.score = score;
  r.outcome = static_cast<std::uint8_t>(outcome);
  if (decision) r.decision = static_cast<std::uint8_t>(*decision);
  push_back(r);
}

void AuditDataset::push_back(const AuditRecord& record) {
  check_record(record, labels_.size());
  records_.push_back(record);
}

void AuditDataset::append(const std::vector<AuditRecord>& records) {
  for (const auto& r : records) check_record(r, labels_.size());
  records_.insert(records_.end(), records.begin(), records.end());
}

bool AuditDataset::has_decisions() const {
  return !records_.empty() &&
         std::all_of(records_.begin(), records_.end(), [](const auto& r) { return r.decision.has_value(); });
}

void AuditDataset::write_csv(std::ostream& out) const {
  std::string buf = "group,score,outcome,decision\n";
  for (const auto& r : records_) {
    buf += labels_[r.group];
    buf += ',';
    buf += format_exact(r.score);
    buf += r.outcome ? ",1," : ",0,";
    if (r.decision) buf += *r.decision ? '1' : '0';
    buf += '\n';
    if (buf.size() > (1u << 20)) {
      out << buf;
      buf.clear();
    }
  }
  out << buf;
}

AuditDataset AuditDataset::read_csv(std::istream& in) {
  AuditDataset data;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty input: missing header");
  const auto header = split(line);
  if (header.size() != 4 || header[0] != "group" || header[1] != "score" ||
      header[2] != "outcome" || header[3] != "decision") {
    throw ParseError("row 1: header must be group,score,outcome,decision");
  }
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto fail = [&](const std::string& why) {
      throw ParseError("row " + std::to_string(row) + ": " + why);
    };
    const auto cols = split(line);
    if (cols.size() != 4) fail("expected 4 columns, got " + std::to_string(cols.size()));
    if (cols[0].empty()) fail("empty group label");

    double score = 0.0;
    const auto res = std::from_chars(cols[1].data(), cols[1].data() + cols[1].size(), score);
    if (res.ec != std::errc() || res.ptr != cols[1].data() + cols[1].size()) {
      fail("cannot parse score '" + std::string(cols[1]) + "'");
    }
    if (!(score >= 0.0 && score <= 1.0)) {
      fail("score " + std::string(cols[1]) + " outside [0,1]");
    }
    auto binary = [&](std::string_view v, const char* what) -> int {
      if (v == "0") return 0;
      if (v == "1") return 1;
      fail(std::string(what) + " must be 0 or 1, got '" + std::string(v) + "'");
      return 0;
    };
    AuditRecord r;
    r.group = data.intern(std::string(cols[0]));
    r.score = score;
    r.outcome = static_cast<std::uint8_t>(binary(cols[2], "outcome"));
    if (!cols[3].empty()) r.decision = static_cast<std::uint8_t>(binary(cols[3], "decision"));
    data.records_.push_back(r);
  }
  return data;
}

void AuditDataset::save_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_csv(out);
  if (!out) throw Error("failed writing '" + path + "'");
}

AuditDataset AuditDataset::load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_csv(in);
}

}  // namespace fairness
