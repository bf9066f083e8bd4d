#include "jau/learner.hpp"

#include "jau/atom_update.hpp"
#include "jau/errors.hpp"
#include "jau/omp.hpp"
#include "jau/random.hpp"
#include "jau/sweep.hpp"

#include <chrono>
#include <numeric>
#include <string>

namespace jau {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

RunTrace learn(const SignalSet& signals, const Dictionary& initial, const LearnerConfig& cfg) {
  if (initial.dim() != signals.dim()) throw ConfigError("dictionary and signals differ in dimension");
  cfg.validate(signals.dim(), initial.size());

  const Index n = initial.size();
  const Index group_size = cfg.resolved_group_size(n);
  RunTrace trace{{}, {}, {}, initial, SparseCode::zeros(n, signals.count())};
  trace.rmse.reserve(static_cast<std::size_t>(cfg.iterations));
  if (cfg.iterations == 0) return trace;

  Dictionary dictionary = initial;
  SparseCode previous;
  if (cfg.algorithm == Algorithm::kNsgk) {
    previous = omp_encode_set(dictionary, signals, cfg.sparsity, cfg.threads);
  }

  for (Index it = 0; it < cfg.iterations; ++it) {
    const auto coding_start = Clock::now();
    SparseCode code = omp_encode_set(dictionary, signals, cfg.sparsity, cfg.threads);
    const double coding_seconds = seconds_since(coding_start);

    const auto update_start = Clock::now();
    IterationEvents events;
    SparseCode evaluated;
    switch (cfg.algorithm) {
      case Algorithm::kMod: {
        ModResult mod = mod_update(signals, code, dictionary);
        dictionary = std::move(mod.dictionary);
        events.regularized = mod.regularized;
        events.dead_atoms = mod.dead_atoms;
        evaluated = std::move(code);
        break;
      }
      case Algorithm::kNsgk: {
        const Matrix z = nsgk_signal_matrix(signals, dictionary, previous, code);
        SweepResult result = sweep(dictionary, z, previous, UpdateRule::kNsgk, group_size, cfg.threads);
        dictionary = std::move(result.dictionary);
        events.dead_atoms = result.stats.dead_atoms;
        events.degenerate_updates = result.stats.degenerate_updates;
        previous = code;
        evaluated = std::move(code);
        break;
      }
      case Algorithm::kSgk:
      case Algorithm::kAksvd: {
        const UpdateRule rule = cfg.algorithm == Algorithm::kSgk ? UpdateRule::kSgk : UpdateRule::kAksvd;
        SweepResult result = sweep(dictionary, signals.data(), code, rule, group_size, cfg.threads);
        dictionary = std::move(result.dictionary);
        events.dead_atoms = result.stats.dead_atoms;
        events.degenerate_updates = result.stats.degenerate_updates;
        evaluated = std::move(result.code);
        break;
      }
    }
    const double update_seconds = seconds_since(update_start);

    trace.rmse.push_back(rmse(signals, dictionary, evaluated));
    trace.timing.push_back({coding_seconds, update_seconds});
    trace.events.push_back(events);
    trace.final_code = std::move(evaluated);
  }
  trace.final_dictionary = std::move(dictionary);
  return trace;
}

Dictionary init_dictionary_from_data(const SignalSet& signals, Index atoms, std::uint64_t seed) {
  const Index m = signals.count();
  if (atoms < 1) throw ConfigError("atom count must be positive");
  if (m < atoms) {
    throw ConfigError("need at least " + std::to_string(atoms) + " signals, got " + std::to_string(m));
  }
  Rng rng(seed);
  std::vector<Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Index{0});
  Matrix chosen(signals.dim(), atoms);
  Index taken = 0;
  // Partial Fisher-Yates: position k receives a uniform pick from the rest.
  for (Index k = 0; k < m && taken < atoms; ++k) {
    const auto pick = k + static_cast<Index>(rng.below(static_cast<std::uint64_t>(m - k)));
    std::swap(order[k], order[pick]);
    const auto column = signals.data().col(order[k]);
    const double norm = column.norm();
    if (norm < 1e-12) continue;
    chosen.col(taken++) = column / norm;
  }
  if (taken < atoms) {
    throw ConfigError("only " + std::to_string(taken) + " usable signals for " +
                      std::to_string(atoms) + " atoms");
  }
  return Dictionary(std::move(chosen));
}

Dictionary init_dictionary_random(Index dim, Index atoms, std::uint64_t seed) {
  if (dim < 1 || atoms < 1) throw ConfigError("dictionary dimensions must be positive");
  Rng rng(seed);
  Matrix d(dim, atoms);
  for (Index j = 0; j < atoms; ++j) {
    for (Index i = 0; i < dim; ++i) d(i, j) = rng.normal();
  }
  return Dictionary::normalized(std::move(d));
}

}  // namespace jau
