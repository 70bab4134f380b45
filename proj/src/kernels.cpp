#include "fairness/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "fairness/errors.hpp"

namespace fairness::kernels {

namespace {

std::size_t chunk_count(std::size_t n) { return (n + kChunkSize - 1) / kChunkSize; }

std::size_t chunk_begin(std::size_t chunk) { return chunk * kChunkSize; }

std::size_t chunk_end(std::size_t chunk, std::size_t n) {
  return std::min(n, (chunk + 1) * kChunkSize);
}

// Runs body(chunk) for every chunk, serially or across OpenMP threads.
template <class Body>
void for_each_chunk(std::size_t chunks, bool parallel, Body body) {
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) {
      body(static_cast<std::size_t>(c));
    }
  } else {
    for (std::size_t c = 0; c < chunks; ++c) body(c);
  }
}

// Unnormalized cumulative cell masses.
std::vector<double> cumulative(const ScoreDensity& d) {
  std::vector<double> cdf(d.grid_size());
  double acc = 0.0;
  for (std::size_t i = 0; i < cdf.size(); ++i) {
    acc += d.weight(i);
    cdf[i] = acc;
  }
  return cdf;
}

std::size_t draw_cell(const std::vector<double>& cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u * cdf.back());
  return std::min(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

struct GroupPlan {
  double base_rate = 0.0;
  std::vector<double> cdf0;
  std::vector<double> cdf1;
  const GroupPolicy* policy = nullptr;
};

struct SamplingPlan {
  std::vector<double> group_cdf;
  std::vector<GroupPlan> groups;
  double cell_width = 0.0;
};

SamplingPlan make_plan(const PopulationModel& pop, const DecisionRule* rule) {
  SamplingPlan plan;
  plan.cell_width = 1.0 / static_cast<double>(pop.grid_size());
  double acc = 0.0;
  for (std::size_t g = 0; g < pop.size(); ++g) {
    acc += pop.share(g);
    plan.group_cdf.push_back(acc);
    const auto& group = pop.groups()[g];
    GroupPlan gp;
    gp.base_rate = group.density.base_rate();
    gp.cdf0 = cumulative(group.density.f0());
    gp.cdf1 = cumulative(group.density.f1());
    if (rule) gp.policy = &rule->policy(group.label);
    plan.groups.push_back(std::move(gp));
  }
  plan.group_cdf.back() = 1.0;
  return plan;
}

AuditDataset sample_impl(const PopulationModel& pop, std::size_t n, std::uint64_t seed,
                         const DecisionRule* rule, bool parallel) {
  if (n == 0) throw InvalidArgument("sample size must be at least 1");
  const SamplingPlan plan = make_plan(pop, rule);
  std::vector<AuditRecord> records(n);

  for_each_chunk(chunk_count(n), parallel, [&](std::size_t chunk) {
    auto rng = chunk_engine(seed, chunk);
    for (std::size_t i = chunk_begin(chunk); i < chunk_end(chunk, n); ++i) {
      const double ug = unit(rng);
      std::size_t g = static_cast<std::size_t>(
          std::upper_bound(plan.group_cdf.begin(), plan.group_cdf.end(), ug) -
          plan.group_cdf.begin());
      g = std::min(g, plan.groups.size() - 1);
      const GroupPlan& gp = plan.groups[g];
      const bool y = unit(rng) < gp.base_rate;
      const std::size_t cell = draw_cell(y ? gp.cdf1 : gp.cdf0, unit(rng));
      const double score =
          std::min(1.0, (static_cast<double>(cell) + unit(rng)) * plan.cell_width);

      AuditRecord& r = records[i];
      r.group = static_cast<std::uint32_t>(g);
      r.score = score;
      r.outcome = y ? 1 : 0;
      if (gp.policy) r.decision = unit(rng) < decide(*gp.policy, score) ? 1 : 0;
    }
  });

  AuditDataset data(pop.labels());
  data.append(records);
  return data;
}

void merge(Tally& into, const Tally& part) {
  for (std::size_t g = 0; g < into.groups.size(); ++g) {
    auto& a = into.groups[g];
    const auto& b = part.groups[g];
    for (std::size_t k = 0; k < a.bins.size(); ++k) {
      a.bins[k].count += b.bins[k].count;
      a.bins[k].positives += b.bins[k].positives;
      a.bins[k].score_sum += b.bins[k].score_sum;
    }
    for (int d = 0; d < 2; ++d) {
      for (int y = 0; y < 2; ++y) a.decided[d][y] += b.decided[d][y];
    }
    a.undecided += b.undecided;
  }
}

Tally empty_tally(std::size_t groups, std::size_t bins) {
  Tally t;
  t.groups.resize(groups);
  for (auto& g : t.groups) g.bins.resize(bins);
  return t;
}

Tally tally_impl(const AuditDataset& data, std::size_t bins, bool parallel) {
  if (bins == 0) throw InvalidArgument("bin count must be at least 1");
  const auto& records = data.records();
  const std::size_t n = records.size();
  const std::size_t chunks = chunk_count(n);
  std::vector<Tally> partials(chunks, empty_tally(data.labels().size(), bins));

  for_each_chunk(chunks, parallel, [&](std::size_t chunk) {
    Tally& t = partials[chunk];
    for (std::size_t i = chunk_begin(chunk); i < chunk_end(chunk, n); ++i) {
      const AuditRecord& r = records[i];
      GroupTally& g = t.groups[r.group];
      BinTally& b = g.bins[bin_of(r.score, bins)];
      ++b.count;
      b.positives += r.outcome;
      b.score_sum += r.score;
      if (r.decision) {
        ++g.decided[*r.decision][r.outcome];
      } else {
        ++g.undecided;
      }
    }
  });

  Tally total = empty_tally(data.labels().size(), bins);
  for (const auto& p : partials) merge(total, p);
  return total;
}

struct UtilityPartial {
  double sum = 0.0;
  double sum_sq = 0.0;
};

MonteCarloEstimate utility_impl(const ScoreDensity& true_density, const ScoreMap& displayed,
                                const PayoffMatrix& payoff, double threshold,
                                std::size_t samples, std::uint64_t seed, bool parallel) {
  if (samples == 0) throw InvalidArgument("sample size must be at least 1");
  if (true_density.grid_size() != displayed.grid_size()) {
    throw InvalidArgument("score map and density grids differ");
  }
  if (!(true_density.mass() > 0.0)) throw InvalidArgument("true density has no mass");
  const auto cdf = cumulative(true_density);
  const double h = true_density.cell_width();
  const std::size_t chunks = chunk_count(samples);
  std::vector<UtilityPartial> partials(chunks);

  for_each_chunk(chunks, parallel, [&](std::size_t chunk) {
    auto rng = chunk_engine(seed, chunk);
    UtilityPartial acc;
    for (std::size_t i = chunk_begin(chunk); i < chunk_end(chunk, samples); ++i) {
      const std::size_t cell = draw_cell(cdf, unit(rng));
      const double p = (static_cast<double>(cell) + unit(rng)) * h;
      const bool y = unit(rng) < p;
      const bool d = displayed.at(cell) > threshold;
      const double u = payoff.realized(d, y);
      acc.sum += u;
      acc.sum_sq += u * u;
    }
    partials[chunk] = acc;
  });

  UtilityPartial total;
  for (const auto& p : partials) {
    total.sum += p.sum;
    total.sum_sq += p.sum_sq;
  }
  const double n = static_cast<double>(samples);
  MonteCarloEstimate est;
  est.samples = samples;
  est.mean = total.sum / n;
  const double var = std::max(0.0, total.sum_sq / n - est.mean * est.mean);
  est.standard_error = samples > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
  return est;
}

}  // namespace

std::mt19937_64 chunk_engine(std::uint64_t seed, std::size_t chunk) {
  const auto c = static_cast<std::uint64_t>(chunk);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
  return std::mt19937_64(seq);
}

AuditDataset sample_serial(const PopulationModel& pop, std::size_t n, std::uint64_t seed,
                           const DecisionRule* rule) {
  return sample_impl(pop, n, seed, rule, false);
}

AuditDataset sample_parallel(const PopulationModel& pop, std::size_t n, std::uint64_t seed,
                             const DecisionRule* rule) {
  return sample_impl(pop, n, seed, rule, true);
}

std::uint64_t Tally::total() const {
  std::uint64_t n = 0;
  for (const auto& g : groups) {
    for (const auto& b : g.bins) n += b.count;
  }
  return n;
}

std::size_t bin_of(double score, std::size_t bins) {
  if (!(score > 0.0)) return 0;
  const auto k = static_cast<std::size_t>(score * static_cast<double>(bins));
  return std::min(k, bins - 1);
}

Tally tally_serial(const AuditDataset& data, std::size_t bins) {
  return tally_impl(data, bins, false);
}

Tally tally_parallel(const AuditDataset& data, std::size_t bins) {
  return tally_impl(data, bins, true);
}

MonteCarloEstimate utility_serial(const ScoreDensity& true_density, const ScoreMap& displayed,
                                  const PayoffMatrix& payoff, double threshold,
                                  std::size_t samples, std::uint64_t seed) {
  return utility_impl(true_density, displayed, payoff, threshold, samples, seed, false);
}

MonteCarloEstimate utility_parallel(const ScoreDensity& true_density, const ScoreMap& displayed,
                                    const PayoffMatrix& payoff, double threshold,
                                    std::size_t samples, std::uint64_t seed) {
  return utility_impl(true_density, displayed, payoff, threshold, samples, seed, true);
}

}  // namespace fairness::kernels
