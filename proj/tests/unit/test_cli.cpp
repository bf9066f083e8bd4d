#include "jau/cli.hpp"
#include "jau/io.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <sstream>

using namespace jau;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "jau_dl");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("jau_cli_" + name)).string();
}

std::string patch_file() {
  const std::string path = temp_file("patches.jaud");
  save_matrix(oracle::gaussian(16, 300, 5), path);
  return path;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("help exits cleanly and a missing subcommand is a usage error") {
    CHECK(run({"--help"}).code == kExitOk);
    CHECK(run({}).code == kExitConfig);
    CHECK(run({"frobnicate"}).code == kExitConfig);
  }

  TEST_CASE("train on a patch file") {
    const std::string patches = patch_file();
    const std::string trace = temp_file("trace.csv");
    const std::string dict = temp_file("dict.jaud");
    const Result r = run({"train", "--algo", "sgk", "--patches", patches, "--dict-size", "24", "--sparsity", "3",
                          "--iters", "4", "--group-size", "5", "--threads", "2", "--out-trace", trace,
                          "--out-dict", dict, "--no-timings"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.rfind("rmse=", 0) == 0);
    const std::string csv = read_file(trace);
    CHECK(csv.rfind("iteration,rmse,coding_seconds,update_seconds\n1,", 0) == 0);
    CHECK(csv.find(",0,0\n4,") != std::string::npos);
    const Dictionary d = load_dictionary(dict);
    CHECK(d.size() == 24);
    CHECK(d.dim() == 16);
    std::filesystem::remove(trace);
    std::filesystem::remove(dict);
    std::filesystem::remove(patches);
  }

  TEST_CASE("train is reproducible and thread independent") {
    const std::string patches = patch_file();
    const auto args = [&](const char* threads) {
      return std::vector<std::string>{"train", "--algo", "nsgk", "--patches", patches, "--dict-size", "20",
                                      "--sparsity", "2", "--iters", "3", "--threads", threads, "--init", "data"};
    };
    const Result a = run(args("1")), b = run(args("4"));
    CHECK(a.code == kExitOk);
    CHECK(a.out == b.out);
    std::filesystem::remove(patches);
  }

  TEST_CASE("configuration errors exit with 2") {
    const std::string patches = patch_file();
    CHECK(run({"train", "--algo", "ksvd", "--patches", patches}).code == kExitConfig);
    CHECK(run({"train", "--patches", patches}).code == kExitConfig);
    CHECK(run({"train", "--algo", "mod", "--group-size", "4", "--patches", patches, "--dict-size", "20"}).code ==
          kExitConfig);
    CHECK(run({"train", "--algo", "sgk", "--group-size", "0", "--patches", patches, "--dict-size", "20"}).code ==
          kExitConfig);
    CHECK(run({"train", "--algo", "sgk", "--sparsity", "17", "--patches", patches, "--dict-size", "20"}).code ==
          kExitConfig);
    CHECK(run({"train", "--algo", "sgk", "--init", "zeros", "--patches", patches, "--dict-size", "20"}).code ==
          kExitConfig);
    CHECK(run({"train", "--algo", "sgk", "--signals", "301", "--patches", patches, "--dict-size", "20"}).code ==
          kExitConfig);
    CHECK(run({"sweep", "--axis", "n", "--values", "10:4:2"}).code == kExitConfig);
    CHECK(run({"sweep", "--axis", "q", "--values", "4:10:2"}).code == kExitConfig);
    CHECK(run({"recover", "--snr", "loud"}).code == kExitConfig);
    CHECK(run({"recover", "--algos", "p-mod"}).code == kExitConfig);
    const Result r = run({"recover", "--runs", "0"});
    CHECK(r.code == kExitConfig);
    CHECK(r.err.find("error:") != std::string::npos);
    std::filesystem::remove(patches);
  }

  TEST_CASE("I/O failures exit with 3") {
    CHECK(run({"train", "--algo", "sgk", "--images", temp_file("missing.pgm")}).code == kExitIo);
    CHECK(run({"train", "--algo", "sgk", "--patches", temp_file("missing.jaud")}).code == kExitIo);
    const std::string bad = temp_file("bad.pgm");
    write_file(bad, "P5 8 8 255\n\x01\x02");
    const Result r = run({"train", "--algo", "sgk", "--images", bad});
    CHECK(r.code == kExitIo);
    CHECK(r.err.find("byte") != std::string::npos);
    std::filesystem::remove(bad);
  }

  TEST_CASE("recover with one run has zero spread and accepts negative SNR") {
    const Result r = run({"recover", "--runs", "1", "--sparsity", "2", "--snr", "-5", "--algos", "sgk,p-sgk",
                          "--iters", "2", "--dim", "8", "--dict-size", "10", "--signals", "100"});
    REQUIRE(r.code == kExitOk);
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "algo,s,snr_db,mean_recovery_pct,std_pct,runs");
    int rows = 0;
    while (std::getline(lines, line)) {
      ++rows;
      CHECK(line.find(",2,-5,") != std::string::npos);
      CHECK(line.substr(line.size() - 4) == ",0,1");
    }
    CHECK(rows == 2);
  }

  TEST_CASE("sweep writes one row per value and algorithm") {
    const std::string img = temp_file("img.pgm");
    GrayImage g{32, 32, 255, {}};
    for (int k = 0; k < 32 * 32; ++k) g.pixels.push_back(static_cast<std::uint16_t>((k * 37) % 251));
    save_pgm(g, img);
    const std::string csv = temp_file("sweep.csv");
    const Result r = run({"sweep", "--axis", "s", "--values", "2:4:2", "--dict-size", "70", "--signals", "200",
                          "--iters", "1", "--runs", "2", "--algos", "sgk,mod", "--images", img, "--out-csv", csv,
                          "--no-timings"});
    REQUIRE(r.code == kExitOk);
    const std::string text = read_file(csv);
    CHECK(text.rfind("axis,value,algo,mean_rmse,std_rmse,mean_code_s,mean_update_s\ns,2,sgk,", 0) == 0);
    CHECK(text.find("\ns,4,mod,") != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 5);
    std::filesystem::remove(csv);
    std::filesystem::remove(img);
  }
}
