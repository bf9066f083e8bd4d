#pragma once

#include "jau/model.hpp"

#include <cstdint>

namespace jau {

/// Runs cfg.iterations alternations of OMP coding and dictionary update.
///
/// The trace records, after each update stage, the RMSE of Y against the
/// new dictionary and the newest coefficients (AK-SVD's refreshed ones,
/// the fresh OMP code otherwise). NSGK seeds its previous-iteration code
/// with one extra OMP pass on `initial` before the first iteration.
RunTrace learn(const SignalSet& signals, const Dictionary& initial, const LearnerConfig& cfg);

/// n distinct signals picked uniformly at random and normalized. Signals
/// with norm below 1e-12 are skipped; throws ConfigError when fewer than n
/// usable signals exist.
Dictionary init_dictionary_from_data(const SignalSet& signals, Index atoms, std::uint64_t seed);

/// i.i.d. standard normal atoms, normalized.
Dictionary init_dictionary_random(Index dim, Index atoms, std::uint64_t seed);

}  // namespace jau
