#pragma once

#include "dyntomo/null_chain.hpp"
#include "dyntomo/observability.hpp"

#include <cstdint>
#include <vector>

namespace dyntomo {

// One Monte-Carlo trial of the optimal-reduction study.
struct TrialOutcome {
  std::uint64_t seed = 0;
  std::optional<Index> k_star;
  bool optimal = false;
  bool all_transverse = false;
};

// How often randomly drawn dynamics reach the lower bound ceil(n/m). The
// claim under test is genericity: the fraction should be 1 up to
// measure-zero bad luck that finite sampling never hits.
struct GenericityReport {
  Index n = 0;
  Index m = 0;
  Index trials = 0;
  std::uint64_t seed = 0;
  bool time_varying = false;
  Index count_optimal = 0;
  Index count_all_transverse = 0;
  Index count_below_lower_bound = 0;  // lower-bound law violations (expected 0)
  double fraction_optimal = 0.0;
  std::vector<std::uint64_t> failing_seeds;
  std::vector<TrialOutcome> outcomes;
};

// Trial t uses seed + t, so any single trial replays in isolation. P is the
// first m rows of the identity unless randomize_P asks for a fresh Gaussian
// projection per trial (drawn from a stream decorrelated from the dynamics
// stream by a fixed xor).
inline GenericityReport genericity_experiment(Index n, Index m, Index trials,
                                              std::uint64_t seed, bool time_varying,
                                              bool randomize_P = false) {
  if (n < 1 || m < 1 || m > n)
    throw std::invalid_argument("genericity_experiment: need 1 <= m <= n");
  if (trials < 1) throw std::invalid_argument("genericity_experiment: trials must be positive");

  GenericityReport rep;
  rep.n = n;
  rep.m = m;
  rep.trials = trials;
  rep.seed = seed;
  rep.time_varying = time_varying;
  const Index lb = (n + m - 1) / m;

  for (Index t = 0; t < trials; ++t) {
    const std::uint64_t trial_seed = seed + static_cast<std::uint64_t>(t);

    Matrixd P;
    if (randomize_P) {
      NormalSampler sampler(trial_seed ^ 0x9e3779b97f4a7c15ull);
      P.resize(m, n);
      do {
        for (Index r = 0; r < m; ++r)
          for (Index c = 0; c < n; ++c) P(r, c) = sampler.next();
      } while (numerical_rank(P) != m);
    } else {
      P = Matrixd::Identity(n, n).topRows(m);
    }

    SystemModeld system =
        time_varying
            ? make_system(random_dynamics_tuple(n, trial_seed, lb), std::move(P))
            : make_system(random_dynamics(n, trial_seed), std::move(P));

    const NullChaind chain = compute_chain(system, lb + 1);
    const ReductionReport rr = reduction_report(chain);

    TrialOutcome out;
    out.seed = trial_seed;
    out.k_star = chain.k_star;
    out.optimal = rr.optimal == OptimalStatus::Yes;
    out.all_transverse = true;
    for (bool f : rr.transverse_profile) out.all_transverse = out.all_transverse && f;
    if (rr.transverse_profile.empty() && !chain.k_star) out.all_transverse = false;

    if (out.optimal) ++rep.count_optimal;
    if (out.all_transverse) ++rep.count_all_transverse;
    if (chain.k_star && *chain.k_star < lb) ++rep.count_below_lower_bound;
    if (!out.optimal) rep.failing_seeds.push_back(trial_seed);
    rep.outcomes.push_back(out);
  }
  rep.fraction_optimal =
      static_cast<double>(rep.count_optimal) / static_cast<double>(trials);
  return rep;
}

struct ConditionRow {
  Index T = 0;
  Index rank = 0;
  double condition = 0.0;
};

struct ConditionStudy {
  std::vector<ConditionRow> rows;
};

// Rank and condition of the extended matrix as the horizon grows; running
// the dynamics longer both completes the rank and tames the conditioning.
inline ConditionStudy condition_study(const SystemModeld& system, Index T_min,
                                      Index T_max) {
  if (T_min < 1 || T_max < T_min)
    throw std::invalid_argument("condition_study: need 1 <= T_min <= T_max");
  ConditionStudy study;
  study.rows.reserve(static_cast<std::size_t>(T_max - T_min + 1));
  for (Index T = T_min; T <= T_max; ++T) {
    const ExtendedMatrixd ext = build_extended(system, T);
    study.rows.push_back({T, ext.rank, ext.condition});
  }
  return study;
}

}  // namespace dyntomo
