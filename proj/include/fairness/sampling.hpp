#pragma once

#include <cstddef>
#include <cstdint>

#include "fairness/audit_dataset.hpp"
#include "fairness/decision_rules.hpp"
#include "fairness/score_model.hpp"

namespace fairness {

// n i.i.d. records; groups are drawn in proportion to their weights.
// Deterministic given the seed, independent of the thread count.
AuditDataset sample(const PopulationModel& pop, std::size_t n, std::uint64_t seed);

// As above, with each record's decision drawn from decide(rule, group, score).
AuditDataset sample(const PopulationModel& pop, std::size_t n, std::uint64_t seed,
                    const DecisionRule& rule);

}  // namespace fairness
