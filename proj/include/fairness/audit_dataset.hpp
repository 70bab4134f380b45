#pragma once

// Finite (group, score, outcome, decision) records, the empirical counterpart
// of a PopulationModel.
//
// CSV layout: header `group,score,outcome,decision`; score in [0,1] with a
// `.` decimal point; outcome 0/1; decision empty or 0/1.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fairness {

struct AuditRecord {
  std::uint32_t group = 0;  // index into AuditDataset::labels()
  double score = 0.0;
  std::uint8_t outcome = 0;
  std::optional<std::uint8_t> decision;
};

class AuditDataset {
 public:
  AuditDataset() = default;
  explicit AuditDataset(std::vector<std::string> labels);

  // Registers a label if new and returns its index.
  std::uint32_t intern(const std::string& label);
  std::optional<std::uint32_t> find(const std::string& label) const;
  // Throws UnknownGroupError.
  std::uint32_t index_of(const std::string& label) const;

  void add(const std::string& label, double score, int outcome,
           std::optional<int> decision = std::nullopt);
  // Validates and appends a record whose group index is already interned.
  void push_back(const AuditRecord& record);
  void append(const std::vector<AuditRecord>& records);
  void reserve(std::size_t n) { records_.reserve(n); }

  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<AuditRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool has_decisions() const;

  void write_csv(std::ostream& out) const;
  static AuditDataset read_csv(std::istream& in);
  void save_csv(const std::string& path) const;
  static AuditDataset load_csv(const std::string& path);

 private:
  std::vector<std::string> labels_;
  std::vector<AuditRecord> records_;
};

}  // namespace fairness
