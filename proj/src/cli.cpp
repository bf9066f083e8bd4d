#include "jau/cli.hpp"

#include "jau/errors.hpp"
#include "jau/experiments.hpp"
#include "jau/io.hpp"
#include "jau/learner.hpp"
#include "jau/omp.hpp"
#include "jau/random.hpp"
#include "jau/sweep.hpp"
#include "jau/textures.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

namespace jau {

namespace {

std::size_t default_threads() {
  if (const char* env = std::getenv("JAU_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

double parse_snr(const std::string& text) {
  std::string key;
  for (char c : text) key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (key == "inf" || key == "+inf" || key == "infinity") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !std::isfinite(v)) throw ConfigError("invalid SNR '" + text + "'");
  return v;
}

std::vector<GrayImage> load_images(const std::vector<std::string>& paths) {
  std::vector<GrayImage> out;
  out.reserve(paths.size());
  for (const auto& p : paths) out.push_back(load_pgm(p));
  return out;
}

// Writes to `path`, or to `fallback` when the path is empty.
void emit(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty()) {
    fallback << text;
  } else {
    write_file(path, text);
  }
}

struct TrainOptions {
  std::string algo;
  std::string group_size = "full";
  Index sparsity = 8;
  Index iterations = 50;
  Index atoms = 256;
  std::vector<std::string> images;
  std::string patches;
  Index signals = 16384;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::string init = "random";
  bool remove_mean = false;
  bool no_timings = false;
  std::string out_trace;
  std::string out_dict;
};

struct RecoverOptions {
  Index sparsity = 3;
  std::string snr = "inf";
  Index runs = 50;
  std::string algos = "nsgk,p-nsgk,sgk,p-sgk,aksvd";
  std::optional<Index> iterations;
  Index dim = 20, atoms = 50, signals = 1500;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::string out_csv;
};

struct SweepOptions {
  std::string axis;
  std::string values;
  Index sparsity = 8;
  Index atoms = 256;
  Index signals = 8192;
  Index iterations = 200;
  Index runs = 10;
  std::string algos = "aksvd,p-aksvd,sgk,p-sgk,nsgk,p-nsgk,mod";
  std::vector<std::string> images;
  bool remove_mean = false;
  bool no_timings = false;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::string out_csv;
};

struct BenchOptions {
  std::string algo = "sgk";
  Index sparsity = 8;
  Index atoms = 512;
  Index signals = 16384;
  Index iterations = 3;
  std::vector<std::string> images;
  std::uint64_t seed = 1;
  std::size_t threads = 8;
  std::string out_csv;
};

SignalSet training_signals(const std::vector<std::string>& image_paths, const std::string& patches_path,
                           Index signals, bool signals_given, std::uint64_t seed, bool remove_mean) {
  if (!patches_path.empty()) {
    if (!image_paths.empty()) throw ConfigError("--images and --patches are mutually exclusive");
    Matrix data = load_matrix(patches_path);
    if (signals_given) {
      if (signals > data.cols()) {
        throw ConfigError("--signals " + std::to_string(signals) + " exceeds the " +
                          std::to_string(data.cols()) + " patches in " + patches_path);
      }
      data.conservativeResize(Eigen::NoChange, signals);
    }
    return SignalSet(std::move(data));
  }
  const std::vector<GrayImage> images = image_paths.empty() ? default_texture_set() : load_images(image_paths);
  PatchOptions options;
  options.remove_mean = remove_mean;
  return extract_patches(images, signals, derive_seed(seed, Stream::kPatches), options);
}

int train(const TrainOptions& o, bool group_given, bool signals_given, std::ostream& out) {
  LearnerConfig cfg;
  cfg.algorithm = parse_algorithm(o.algo);
  if (cfg.algorithm == Algorithm::kMod && group_given) {
    throw ConfigError("--group-size does not apply to mod");
  }
  if (o.group_size != "full") {
    std::size_t used = 0;
    long long g = 0;
    try {
      g = std::stoll(o.group_size, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != o.group_size.size() || g < 1) {
      throw ConfigError("--group-size must be a positive integer or 'full'");
    }
    cfg.group_size = static_cast<Index>(g);
  }
  cfg.sparsity = o.sparsity;
  cfg.iterations = o.iterations;
  cfg.seed = o.seed;
  cfg.threads = o.threads;

  const SignalSet signals = training_signals(o.images, o.patches, o.signals, signals_given, o.seed, o.remove_mean);
  cfg.validate(signals.dim(), o.atoms);
  Dictionary initial = [&] {
    const auto seed = derive_seed(o.seed, Stream::kInitDictionary);
    if (o.init == "data") return init_dictionary_from_data(signals, o.atoms, seed);
    if (o.init == "random") return init_dictionary_random(signals.dim(), o.atoms, seed);
    throw ConfigError("--init must be 'random' or 'data'");
  }();

  const RunTrace trace = learn(signals, initial, cfg);
  if (!o.out_trace.empty()) save_run_trace(trace, o.out_trace, !o.no_timings);
  if (!o.out_dict.empty()) save_dictionary(trace.final_dictionary, o.out_dict);

  const double final_rmse = trace.rmse.empty()
                                ? rmse(signals, initial, omp_encode_set(initial, signals, cfg.sparsity, cfg.threads))
                                : trace.rmse.back();
  out << "rmse=" << format_double(final_rmse) << '\n';
  return kExitOk;
}

int recover(const RecoverOptions& o, std::ostream& out) {
  RecoveryConfig cfg;
  cfg.dim = o.dim;
  cfg.atoms = o.atoms;
  cfg.signals = o.signals;
  cfg.sparsity = o.sparsity;
  cfg.snr_db = parse_snr(o.snr);
  cfg.runs = o.runs;
  cfg.iterations = o.iterations;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  const auto algorithms = parse_algorithm_list(o.algos);
  const auto rows = run_recovery_experiment(cfg, algorithms);
  std::ostringstream csv;
  write_recovery_csv(csv, rows);
  emit(o.out_csv, csv.str(), out);
  return kExitOk;
}

int run_sweep_command(const SweepOptions& o, std::ostream& out) {
  SweepConfig cfg;
  cfg.axis = parse_sweep_axis(o.axis);
  cfg.values = parse_value_range(o.values);
  cfg.sparsity = o.sparsity;
  cfg.atoms = o.atoms;
  cfg.signals = o.signals;
  cfg.iterations = o.iterations;
  cfg.runs = o.runs;
  cfg.algorithms = parse_algorithm_list(o.algos);
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  cfg.images = load_images(o.images);
  cfg.patches.remove_mean = o.remove_mean;
  const auto rows = run_sweep(cfg);
  std::ostringstream csv;
  write_sweep_csv(csv, rows, !o.no_timings);
  emit(o.out_csv, csv.str(), out);
  return kExitOk;
}

// Update-stage time of the one-atom-at-a-time single-threaded sweep versus
// the all-atoms-in-one-group sweep on `threads` workers.
int bench(const BenchOptions& o, std::ostream& out) {
  const Algorithm algorithm = parse_algorithm(o.algo);
  if (algorithm == Algorithm::kMod) throw ConfigError("bench compares group sizes; mod has none");
  const SignalSet signals = training_signals(o.images, "", o.signals, true, o.seed, false);
  const Dictionary initial = init_dictionary_random(signals.dim(), o.atoms, derive_seed(o.seed, Stream::kInitDictionary));

  struct Setup {
    Index group_size;
    std::size_t threads;
  };
  const Setup setups[] = {{1, 1}, {o.atoms, o.threads}};
  std::ostringstream csv;
  csv << "algo,group_size,threads,iterations,mean_code_s,mean_update_s\n";
  double update_time[2] = {0.0, 0.0};
  for (int k = 0; k < 2; ++k) {
    LearnerConfig cfg;
    cfg.algorithm = algorithm;
    cfg.group_size = setups[k].group_size;
    cfg.sparsity = o.sparsity;
    cfg.iterations = o.iterations;
    cfg.threads = setups[k].threads;
    const RunTrace trace = learn(signals, initial, cfg);
    double code_s = 0.0, update_s = 0.0;
    for (const auto& t : trace.timing) {
      code_s += t.coding_seconds;
      update_s += t.update_seconds;
    }
    const double iters = std::max<double>(1.0, static_cast<double>(trace.timing.size()));
    update_time[k] = update_s / iters;
    csv << to_string(algorithm) << ',' << setups[k].group_size << ',' << setups[k].threads << ','
        << o.iterations << ',' << format_double(code_s / iters) << ',' << format_double(update_s / iters)
        << '\n';
  }
  emit(o.out_csv, csv.str(), out);
  if (update_time[1] > 0.0) out << "update_speedup=" << format_double(update_time[0] / update_time[1]) << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dictionary learning with Jacobi (group-parallel) atom updates", "jau_dl"};
  app.require_subcommand(1);
  const std::size_t threads = default_threads();

  TrainOptions train_opts;
  train_opts.threads = threads;
  auto* train_cmd = app.add_subcommand("train", "Learn a dictionary from image patches");
  train_cmd->add_option("--algo", train_opts.algo, "aksvd | sgk | nsgk | mod")->required();
  auto* group_opt = train_cmd->add_option("--group-size", train_opts.group_size,
                                          "Atoms per Jacobi group, or 'full' for all atoms")
                        ->capture_default_str();
  train_cmd->add_option("--sparsity", train_opts.sparsity, "Nonzeros per representation")->capture_default_str();
  train_cmd->add_option("--iters", train_opts.iterations, "Learning iterations")->capture_default_str();
  train_cmd->add_option("--dict-size", train_opts.atoms, "Number of atoms n")->capture_default_str();
  train_cmd->add_option("--images", train_opts.images, "PGM images (default: built-in textures)");
  train_cmd->add_option("--patches", train_opts.patches, "JAUD file holding a p x m signal matrix");
  auto* signals_opt =
      train_cmd->add_option("--signals", train_opts.signals, "Number of patches m")->capture_default_str();
  train_cmd->add_option("--seed", train_opts.seed, "Master seed")->capture_default_str();
  train_cmd->add_option("--threads", train_opts.threads, "Worker threads (env JAU_THREADS)")->capture_default_str();
  train_cmd->add_option("--init", train_opts.init, "Initial dictionary: random | data")->capture_default_str();
  train_cmd->add_flag("--remove-mean", train_opts.remove_mean, "Subtract each patch's mean");
  train_cmd->add_flag("--no-timings", train_opts.no_timings, "Write stage times as 0 in the trace");
  train_cmd->add_option("--out-trace", train_opts.out_trace, "Trace CSV path");
  train_cmd->add_option("--out-dict", train_opts.out_dict, "Dictionary (JAUD) path");

  RecoverOptions recover_opts;
  recover_opts.threads = threads;
  auto* recover_cmd = app.add_subcommand("recover", "Synthetic dictionary recovery experiment");
  recover_cmd->add_option("--sparsity", recover_opts.sparsity)->capture_default_str();
  recover_cmd->add_option("--snr", recover_opts.snr, "SNR in dB, or inf")->capture_default_str();
  recover_cmd->add_option("--runs", recover_opts.runs)->capture_default_str();
  recover_cmd->add_option("--algos", recover_opts.algos, "Comma separated, e.g. sgk,p-sgk")->capture_default_str();
  recover_cmd->add_option("--iters", recover_opts.iterations, "Iterations (default 9 s^2)");
  recover_cmd->add_option("--dim", recover_opts.dim, "Atom dimension p")->capture_default_str();
  recover_cmd->add_option("--dict-size", recover_opts.atoms, "Number of atoms n")->capture_default_str();
  recover_cmd->add_option("--signals", recover_opts.signals, "Number of signals m")->capture_default_str();
  recover_cmd->add_option("--seed", recover_opts.seed)->capture_default_str();
  recover_cmd->add_option("--threads", recover_opts.threads)->capture_default_str();
  recover_cmd->add_option("--out-csv", recover_opts.out_csv, "Output CSV (default stdout)");

  SweepOptions sweep_opts;
  sweep_opts.threads = threads;
  auto* sweep_cmd = app.add_subcommand("sweep", "Final error over a parameter range");
  sweep_cmd->add_option("--axis", sweep_opts.axis, "s | n | m")->required();
  sweep_cmd->add_option("--values", sweep_opts.values, "a:b:step")->required();
  sweep_cmd->add_option("--sparsity", sweep_opts.sparsity)->capture_default_str();
  sweep_cmd->add_option("--dict-size", sweep_opts.atoms)->capture_default_str();
  sweep_cmd->add_option("--signals", sweep_opts.signals)->capture_default_str();
  sweep_cmd->add_option("--iters", sweep_opts.iterations)->capture_default_str();
  sweep_cmd->add_option("--runs", sweep_opts.runs)->capture_default_str();
  sweep_cmd->add_option("--algos", sweep_opts.algos)->capture_default_str();
  sweep_cmd->add_option("--images", sweep_opts.images, "PGM images (default: built-in textures)");
  sweep_cmd->add_flag("--remove-mean", sweep_opts.remove_mean);
  sweep_cmd->add_flag("--no-timings", sweep_opts.no_timings, "Write stage times as 0");
  sweep_cmd->add_option("--seed", sweep_opts.seed)->capture_default_str();
  sweep_cmd->add_option("--threads", sweep_opts.threads)->capture_default_str();
  sweep_cmd->add_option("--out-csv", sweep_opts.out_csv, "Output CSV (default stdout)");

  BenchOptions bench_opts;
  auto* bench_cmd = app.add_subcommand("bench", "Update-stage time: sequential vs one parallel group");
  bench_cmd->add_option("--algo", bench_opts.algo)->capture_default_str();
  bench_cmd->add_option("--sparsity", bench_opts.sparsity)->capture_default_str();
  bench_cmd->add_option("--dict-size", bench_opts.atoms)->capture_default_str();
  bench_cmd->add_option("--signals", bench_opts.signals)->capture_default_str();
  bench_cmd->add_option("--iters", bench_opts.iterations)->capture_default_str();
  bench_cmd->add_option("--images", bench_opts.images);
  bench_cmd->add_option("--seed", bench_opts.seed)->capture_default_str();
  bench_cmd->add_option("--threads", bench_opts.threads)->capture_default_str();
  bench_cmd->add_option("--out-csv", bench_opts.out_csv);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  CLI::App* active = &app;
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    for (auto* sub : {train_cmd, recover_cmd, sweep_cmd, bench_cmd}) {
      if (sub->parsed()) active = sub;
    }
    if (train_cmd->parsed()) return train(train_opts, group_opt->count() > 0, signals_opt->count() > 0, out);
    if (recover_cmd->parsed()) return recover(recover_opts, out);
    if (sweep_cmd->parsed()) return run_sweep_command(sweep_opts, out);
    if (bench_cmd->parsed()) return bench(bench_opts, out);
    return kExitInternal;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n\n" << active->help();
    return kExitConfig;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace jau
