#pragma once

// Data-parallel kernels behind sampling, empirical tallies and Monte Carlo
// utility estimates.
//
// Work is cut into fixed chunks of kChunkSize items. Each chunk owns a
// generator seeded from (seed, chunk index) and produces a partial result;
// partials are combined in chunk order. The OpenMP and serial variants
// therefore return bit-identical results for any thread count. The serial
// variants are kept as the reference the parallel ones are tested against.

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "fairness/audit_dataset.hpp"
#include "fairness/decision_rules.hpp"
#include "fairness/score_model.hpp"
#include "fairness/utility_analysis.hpp"

namespace fairness::kernels {

inline constexpr std::size_t kChunkSize = std::size_t{1} << 16;

std::mt19937_64 chunk_engine(std::uint64_t seed, std::size_t chunk);

// Uniform double in [0,1) with 53 random bits.
inline double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// `rule` may be null, in which case records carry no decision.
AuditDataset sample_serial(const PopulationModel& pop, std::size_t n, std::uint64_t seed,
                           const DecisionRule* rule);
AuditDataset sample_parallel(const PopulationModel& pop, std::size_t n, std::uint64_t seed,
                             const DecisionRule* rule);

struct BinTally {
  std::uint64_t count = 0;
  std::uint64_t positives = 0;
  double score_sum = 0.0;
};

struct GroupTally {
  std::vector<BinTally> bins;
  // Indexed [decision][outcome] over records that carry a decision.
  std::uint64_t decided[2][2] = {{0, 0}, {0, 0}};
  std::uint64_t undecided = 0;
};

struct Tally {
  std::vector<GroupTally> groups;

  std::uint64_t total() const;
};

// Equal-width score bins; a score of exactly 1 falls into the last bin.
std::size_t bin_of(double score, std::size_t bins);

Tally tally_serial(const AuditDataset& data, std::size_t bins);
Tally tally_parallel(const AuditDataset& data, std::size_t bins);

MonteCarloEstimate utility_serial(const ScoreDensity& true_density, const ScoreMap& displayed,
                                  const PayoffMatrix& payoff, double threshold,
                                  std::size_t samples, std::uint64_t seed);
MonteCarloEstimate utility_parallel(const ScoreDensity& true_density, const ScoreMap& displayed,
                                    const PayoffMatrix& payoff, double threshold,
                                    std::size_t samples, std::uint64_t seed);

}  // namespace fairness::kernels
