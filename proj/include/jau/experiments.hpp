#pragma once

// Experiment harnesses: synthetic dictionary recovery and sweeps over
// image-patch learning problems.

#include "jau/io.hpp"
#include "jau/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace jau {

/// An algorithm plus its update schedule. `parallel` means one group of all
/// n atoms; otherwise atoms are updated one at a time. MOD ignores it.
struct AlgorithmSpec {
  Algorithm algorithm = Algorithm::kSgk;
  bool parallel = false;

  /// "sgk", "p-sgk", "aksvd", "p-aksvd" (or "pak-svd"), "nsgk", "p-nsgk", "mod".
  static AlgorithmSpec parse(std::string_view name);
  std::string label() const;
  LearnerConfig learner_config(Index sparsity, Index iterations, std::size_t threads) const;

  friend bool operator==(const AlgorithmSpec&, const AlgorithmSpec&) = default;
};

/// Comma separated list of AlgorithmSpec names.
std::vector<AlgorithmSpec> parse_algorithm_list(std::string_view list);

struct RecoveryConfig {
  Index dim = 20;
  Index atoms = 50;
  Index signals = 1500;
  Index sparsity = 3;
  double snr_db = std::numeric_limits<double>::infinity();
  Index runs = 50;
  /// Learning iterations; 9 s^2 when unset.
  std::optional<Index> iterations;
  std::uint64_t seed = 0;
  /// Runs execute concurrently on up to this many workers.
  std::size_t threads = 1;

  Index resolved_iterations() const { return iterations.value_or(9 * sparsity * sparsity); }
  void validate() const;
};

struct RecoveryInstance {
  Dictionary truth;
  SparseCode code;  // generating coefficients: clean = truth * code
  SignalSet clean;
  SignalSet signals;
};

/// Random normalized dictionary; each signal combines `sparsity` distinct
/// atoms with standard normal coefficients; noise per add_noise.
RecoveryInstance generate_recovery_instance(const RecoveryConfig& cfg, std::uint64_t seed);

/// Adds white Gaussian noise scaled so that the realized
/// 10 log10(‖Y‖²_F / ‖N‖²_F) equals `snr_db` exactly. Infinite SNR returns Y.
/// Throws ConfigError for a zero-energy Y with finite SNR.
SignalSet add_noise(const SignalSet& signals, double snr_db, std::uint64_t seed);

/// Threshold on |dᵀ d̂| for an original atom to count as recovered.
inline constexpr double kRecoveryThreshold = 0.99;

/// Percentage of `truth` atoms matched by a learned atom with |dᵀ d̂| > 0.99.
/// Pairs are matched greedily, highest correlation first, each learned atom
/// used at most once.
double recovery_score(const Dictionary& truth, const Dictionary& learned);

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single value
};

Summary summarize(std::span<const double> values);

struct RecoveryRow {
  AlgorithmSpec algorithm;
  Index sparsity = 0;
  double snr_db = 0.0;
  Summary recovery;
  Index runs = 0;
};

/// Each run draws a fresh instance and initial dictionary (from data
/// vectors), shared by every algorithm, learns with the fixed sparsity
/// and scores the result.
std::vector<RecoveryRow> run_recovery_experiment(const RecoveryConfig& cfg,
                                                 std::span<const AlgorithmSpec> algorithms);

enum class SweepAxis { kSparsity, kDictionarySize, kSignalCount };

std::string_view to_string(SweepAxis axis) noexcept;
/// "s", "n" or "m".
SweepAxis parse_sweep_axis(std::string_view name);
/// "a:b:step" -> a, a+step, ... <= b. Throws ConfigError on a malformed or empty range.
std::vector<Index> parse_value_range(std::string_view text);

struct SweepConfig {
  SweepAxis axis = SweepAxis::kDictionarySize;
  std::vector<Index> values;
  Index sparsity = 8;
  Index atoms = 256;
  Index signals = 8192;
  Index iterations = 200;
  Index runs = 10;
  std::vector<AlgorithmSpec> algorithms;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  /// Patch source; the built-in texture set when empty.
  std::vector<GrayImage> images;
  PatchOptions patches;

  void validate() const;
};

struct SweepRow {
  SweepAxis axis = SweepAxis::kDictionarySize;
  Index value = 0;
  AlgorithmSpec algorithm;
  Summary final_rmse;
  /// Total coding / update stage time of a run, averaged over runs.
  double mean_coding_seconds = 0.0;
  double mean_update_seconds = 0.0;
};

/// For every axis value and run: fresh patches and a random initial
/// dictionary shared by all algorithms; learn; record the final RMSE.
std::vector<SweepRow> run_sweep(const SweepConfig& cfg);

/// Writers for the result tables; `timings` false writes time columns as 0.
void write_recovery_csv(std::ostream& out, std::span<const RecoveryRow> rows);
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows, bool timings = true);

}  // namespace jau
