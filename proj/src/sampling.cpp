#include "fairness/sampling.hpp"

#include "fairness/kernels.hpp"

namespace fairness {

AuditDataset sample(const PopulationModel& pop, std::size_t n, std::uint64_t seed) {
  return kernels::sample_parallel(pop, n, seed, nullptr);
}

AuditDataset sample(const PopulationModel& pop, std::size_t n, std::uint64_t seed,
                    const DecisionRule& rule) {
  return kernels::sample_parallel(pop, n, seed, &rule);
}

}  // namespace fairness
