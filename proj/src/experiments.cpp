#include "jau/experiments.hpp"

#include "jau/errors.hpp"
#include "jau/learner.hpp"
#include "jau/omp.hpp"
#include "jau/parallel.hpp"
#include "jau/random.hpp"
#include "jau/textures.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numeric>
#include <ostream>

namespace jau {

namespace {

std::string lowercase(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

Index parse_index(std::string_view text, std::string_view what) {
  text = trim(text);
  Index value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("invalid " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

AlgorithmSpec AlgorithmSpec::parse(std::string_view name) {
  std::string key = lowercase(trim(name));
  if (key == "pak-svd" || key == "paksvd") return {Algorithm::kAksvd, true};
  if (key == "mod") return {Algorithm::kMod, false};
  bool parallel = false;
  if (key.starts_with("p-")) {
    parallel = true;
    key.erase(0, 2);
  }
  const Algorithm algorithm = parse_algorithm(key);
  if (algorithm == Algorithm::kMod) throw ConfigError("MOD has no parallel variant");
  return {algorithm, parallel};
}

std::string AlgorithmSpec::label() const {
  const std::string base(to_string(algorithm));
  return parallel && algorithm != Algorithm::kMod ? "p-" + base : base;
}

LearnerConfig AlgorithmSpec::learner_config(Index sparsity, Index iterations, std::size_t threads) const {
  LearnerConfig cfg;
  cfg.algorithm = algorithm;
  if (!parallel) cfg.group_size = 1;
  cfg.sparsity = sparsity;
  cfg.iterations = iterations;
  cfg.threads = threads;
  return cfg;
}

std::vector<AlgorithmSpec> parse_algorithm_list(std::string_view list) {
  std::vector<AlgorithmSpec> out;
  while (!list.empty()) {
    const auto comma = list.find(',');
    const auto item = trim(list.substr(0, comma));
    if (!item.empty()) out.push_back(AlgorithmSpec::parse(item));
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  if (out.empty()) throw ConfigError("empty algorithm list");
  return out;
}

void RecoveryConfig::validate() const {
  if (dim < 1 || atoms < 1 || signals < 1) throw ConfigError("recovery dimensions must be positive");
  if (sparsity < 1 || sparsity > dim || sparsity > atoms) throw ConfigError("invalid sparsity");
  if (runs < 1) throw ConfigError("run count must be positive");
  if (resolved_iterations() < 0) throw ConfigError("iteration count must be nonnegative");
  if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity()) {
    throw ConfigError("SNR must be a real number of dB or +inf");
  }
}

RecoveryInstance generate_recovery_instance(const RecoveryConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Dictionary truth = init_dictionary_random(cfg.dim, cfg.atoms, derive_seed(seed, Stream::kInstanceDictionary));

  Rng rng(derive_seed(seed, Stream::kInstanceCodes));
  std::vector<SparseColumn> columns(static_cast<std::size_t>(cfg.signals));
  std::vector<Index> pool(static_cast<std::size_t>(cfg.atoms));
  for (auto& column : columns) {
    std::iota(pool.begin(), pool.end(), Index{0});
    for (Index k = 0; k < cfg.sparsity; ++k) {
      const auto pick = k + static_cast<Index>(rng.below(static_cast<std::uint64_t>(cfg.atoms - k)));
      std::swap(pool[k], pool[pick]);
      column.push_back({pool[k], rng.normal()});
    }
  }
  SparseCode code(cfg.atoms, std::move(columns));
  SignalSet clean(reconstruct(truth, code));
  SignalSet noisy = add_noise(clean, cfg.snr_db, derive_seed(seed, Stream::kNoise));
  return RecoveryInstance{std::move(truth), std::move(code), std::move(clean), std::move(noisy)};
}

SignalSet add_noise(const SignalSet& signals, double snr_db, std::uint64_t seed) {
  if (std::isnan(snr_db)) throw ConfigError("SNR is NaN");
  if (snr_db == std::numeric_limits<double>::infinity()) return signals;
  const double signal_norm = signals.data().norm();
  if (!(signal_norm > 0.0)) throw ConfigError("cannot set a finite SNR on a zero-energy signal set");
  Rng rng(seed);
  Matrix noise(signals.dim(), signals.count());
  for (Index c = 0; c < noise.cols(); ++c) {
    for (Index r = 0; r < noise.rows(); ++r) noise(r, c) = rng.normal();
  }
  const double scale = signal_norm / (noise.norm() * std::pow(10.0, snr_db / 20.0));
  return SignalSet(signals.data() + scale * noise);
}

double recovery_score(const Dictionary& truth, const Dictionary& learned) {
  if (truth.dim() != learned.dim()) throw ConfigError("recovery_score: atom dimensions differ");
  const Matrix corr = (truth.atoms().transpose() * learned.atoms()).cwiseAbs();
  struct Pair {
    double value;
    Index original, candidate;
  };
  std::vector<Pair> pairs;
  for (Index j = 0; j < corr.cols(); ++j) {
    for (Index i = 0; i < corr.rows(); ++i) {
      if (corr(i, j) > kRecoveryThreshold) pairs.push_back({corr(i, j), i, j});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.original != b.original) return a.original < b.original;
    return a.candidate < b.candidate;
  });
  std::vector<char> original_taken(static_cast<std::size_t>(truth.size()), 0);
  std::vector<char> candidate_taken(static_cast<std::size_t>(learned.size()), 0);
  Index recovered = 0;
  for (const auto& pair : pairs) {
    if (original_taken[pair.original] || candidate_taken[pair.candidate]) continue;
    original_taken[pair.original] = candidate_taken[pair.candidate] = 1;
    ++recovered;
  }
  return 100.0 * static_cast<double>(recovered) / static_cast<double>(truth.size());
}

Summary summarize(std::span<const double> values) {
  Summary out;
  if (values.empty()) return out;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double count = static_cast<double>(sorted.size());
  out.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / count;
  if (sorted.size() > 1) {
    double ss = 0.0;
    for (double v : sorted) ss += (v - out.mean) * (v - out.mean);
    out.stddev = std::sqrt(ss / (count - 1.0));
  }
  return out;
}

std::vector<RecoveryRow> run_recovery_experiment(const RecoveryConfig& cfg,
                                                 std::span<const AlgorithmSpec> algorithms) {
  cfg.validate();
  const auto algos = static_cast<Index>(algorithms.size());
  std::vector<double> scores(static_cast<std::size_t>(cfg.runs * algos));
  const Index iterations = cfg.resolved_iterations();

  parallel_for(cfg.threads, cfg.runs, [&](Index first, Index last, std::size_t) {
    for (Index run = first; run < last; ++run) {
      const std::uint64_t run_seed = derive_seed(cfg.seed, Stream::kRun, {static_cast<std::uint64_t>(run)});
      const RecoveryInstance instance = generate_recovery_instance(cfg, run_seed);
      const Dictionary initial =
          init_dictionary_from_data(instance.signals, cfg.atoms, derive_seed(run_seed, Stream::kInitDictionary));
      for (Index a = 0; a < algos; ++a) {
        const LearnerConfig lc = algorithms[a].learner_config(cfg.sparsity, iterations, 1);
        const RunTrace trace = learn(instance.signals, initial, lc);
        scores[run * algos + a] = recovery_score(instance.truth, trace.final_dictionary);
      }
    }
  });

  std::vector<RecoveryRow> rows;
  for (Index a = 0; a < algos; ++a) {
    std::vector<double> per_run;
    for (Index run = 0; run < cfg.runs; ++run) per_run.push_back(scores[run * algos + a]);
    rows.push_back({algorithms[a], cfg.sparsity, cfg.snr_db, summarize(per_run), cfg.runs});
  }
  return rows;
}

std::string_view to_string(SweepAxis axis) noexcept {
  switch (axis) {
    case SweepAxis::kSparsity: return "s";
    case SweepAxis::kDictionarySize: return "n";
    case SweepAxis::kSignalCount: return "m";
  }
  return "?";
}

SweepAxis parse_sweep_axis(std::string_view name) {
  const std::string key = lowercase(trim(name));
  if (key == "s") return SweepAxis::kSparsity;
  if (key == "n") return SweepAxis::kDictionarySize;
  if (key == "m") return SweepAxis::kSignalCount;
  throw ConfigError("unknown sweep axis '" + std::string(name) + "' (expected s, n or m)");
}

std::vector<Index> parse_value_range(std::string_view text) {
  const auto first = text.find(':');
  const auto second = first == std::string_view::npos ? first : text.find(':', first + 1);
  std::vector<Index> out;
  if (first == std::string_view::npos) {
    out.push_back(parse_index(text, "sweep value"));
    return out;
  }
  if (second == std::string_view::npos) throw ConfigError("sweep range must be a:b:step");
  const Index lo = parse_index(text.substr(0, first), "range start");
  const Index hi = parse_index(text.substr(first + 1, second - first - 1), "range end");
  const Index step = parse_index(text.substr(second + 1), "range step");
  if (step < 1) throw ConfigError("sweep step must be positive");
  for (Index v = lo; v <= hi; v += step) out.push_back(v);
  if (out.empty()) throw ConfigError("empty sweep range '" + std::string(text) + "'");
  return out;
}

void SweepConfig::validate() const {
  if (values.empty()) throw ConfigError("sweep has no axis values");
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] < 1) throw ConfigError("sweep values must be positive");
    if (k > 0 && values[k] <= values[k - 1]) throw ConfigError("sweep values must be strictly increasing");
  }
  if (algorithms.empty()) throw ConfigError("sweep needs at least one algorithm");
  if (runs < 1) throw ConfigError("run count must be positive");
  if (iterations < 0) throw ConfigError("iteration count must be nonnegative");
  if (threads < 1) throw ConfigError("thread count must be positive");
}

std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const std::vector<GrayImage> textures = cfg.images.empty() ? default_texture_set() : std::vector<GrayImage>{};
  const std::vector<GrayImage>& images = cfg.images.empty() ? textures : cfg.images;
  const Index dim = cfg.patches.patch_size * cfg.patches.patch_size;

  std::vector<SweepRow> rows;
  for (const Index value : cfg.values) {
    Index sparsity = cfg.sparsity, atoms = cfg.atoms, signals = cfg.signals;
    switch (cfg.axis) {
      case SweepAxis::kSparsity: sparsity = value; break;
      case SweepAxis::kDictionarySize: atoms = value; break;
      case SweepAxis::kSignalCount: signals = value; break;
    }
    const auto algos = cfg.algorithms.size();
    std::vector<std::vector<double>> final_rmse(algos);
    std::vector<double> coding(algos, 0.0), update(algos, 0.0);
    for (Index run = 0; run < cfg.runs; ++run) {
      const auto tags = {static_cast<std::uint64_t>(value), static_cast<std::uint64_t>(run)};
      const SignalSet patches = extract_patches(images, signals, derive_seed(cfg.seed, Stream::kPatches, tags), cfg.patches);
      const Dictionary initial = init_dictionary_random(dim, atoms, derive_seed(cfg.seed, Stream::kInitDictionary, tags));
      for (std::size_t a = 0; a < algos; ++a) {
        const RunTrace trace =
            learn(patches, initial, cfg.algorithms[a].learner_config(sparsity, cfg.iterations, cfg.threads));
        final_rmse[a].push_back(trace.rmse.empty() ? rmse(patches, initial, omp_encode_set(initial, patches, sparsity, cfg.threads))
                                                   : trace.rmse.back());
        for (const auto& t : trace.timing) {
          coding[a] += t.coding_seconds;
          update[a] += t.update_seconds;
        }
      }
    }
    for (std::size_t a = 0; a < algos; ++a) {
      const double runs = static_cast<double>(cfg.runs);
      rows.push_back({cfg.axis, value, cfg.algorithms[a], summarize(final_rmse[a]), coding[a] / runs,
                      update[a] / runs});
    }
  }
  return rows;
}

void write_recovery_csv(std::ostream& out, std::span<const RecoveryRow> rows) {
  out << "algo,s,snr_db,mean_recovery_pct,std_pct,runs\n";
  for (const auto& row : rows) {
    out << row.algorithm.label() << ',' << row.sparsity << ',' << format_double(row.snr_db) << ','
        << format_double(row.recovery.mean) << ',' << format_double(row.recovery.stddev) << ','
        << row.runs << '\n';
  }
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows, bool timings) {
  out << "axis,value,algo,mean_rmse,std_rmse,mean_code_s,mean_update_s\n";
  for (const auto& row : rows) {
    out << to_string(row.axis) << ',' << row.value << ',' << row.algorithm.label() << ','
        << format_double(row.final_rmse.mean) << ',' << format_double(row.final_rmse.stddev) << ','
        << format_double(timings ? row.mean_coding_seconds : 0.0) << ','
        << format_double(timings ? row.mean_update_seconds : 0.0) << '\n';
  }
}

}  // namespace jau
