// End-to-end checks of the rejector binary: flag handling, config files,
// exit codes, and byte-stable outputs.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

const fs::path kScratch = fs::path("cli_scratch");

int run(const std::string& args) {
  const std::string command = std::string(REJECTOR_BIN) + " " + args;
  const int status = std::system(command.c_str());
  if (status == -1) return -1;
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct ScratchDir {
  ScratchDir() {
    fs::remove_all(kScratch);
    fs::create_directories(kScratch);
  }
};

std::string path(const char* name) { return (kScratch / name).string(); }

}  // namespace

TEST_CASE("cli end-to-end") {
  ScratchDir scratch;

  SUBCASE("gen is deterministic in the seed") {
    CHECK(run("gen --n-inputs 6 --n-labels 3 --seed 5 --out " +
              path("a.json") + " > /dev/null 2>&1") == 0);
    CHECK(run("gen --n-inputs 6 --n-labels 3 --seed 5 --out " +
              path("b.json") + " > /dev/null 2>&1") == 0);
    CHECK(run("gen --n-inputs 6 --n-labels 3 --seed 6 --out " +
              path("c.json") + " > /dev/null 2>&1") == 0);
    CHECK(slurp(path("a.json")) == slurp(path("b.json")));
    CHECK(slurp(path("a.json")) != slurp(path("c.json")));
  }

  SUBCASE("sweep emits stable CSV and mask records") {
    REQUIRE(run("gen --n-inputs 6 --n-labels 3 --seed 5 --out " +
                path("task.json") + " > /dev/null 2>&1") == 0);
    const std::string sweep_cmd =
        "sweep --task " + path("task.json") +
        " --loss modified-log --lambda 2 --rejector joint --out ";
    CHECK(run(sweep_cmd + path("s1.csv") + " --mask-out " + path("m1.json") +
              " > /dev/null 2>&1") == 0);
    CHECK(run(sweep_cmd + path("s2.csv") + " > /dev/null 2>&1") == 0);
    const std::string csv = slurp(path("s1.csv"));
    CHECK(csv == slurp(path("s2.csv")));
    CHECK(csv.rfind("# loss=modified-log lambda=2 rejector=joint", 0) == 0);
    CHECK(csv.find("tau,kappa,rejection_rate,selective_risk,n_rejected,"
                   "mask_hash") != std::string::npos);
    const std::string records = slurp(path("m1.json"));
    CHECK(records.find("\"kind\": \"joint\"") != std::string::npos);
    CHECK(records.find("\"Z\"") != std::string::npos);
    CHECK(records.find("\"mask\"") != std::string::npos);
  }

  SUBCASE("sweep rejects rejector families it cannot thread") {
    REQUIRE(run("gen --seed 5 --out " + path("task.json") +
                " > /dev/null 2>&1") == 0);
    CHECK(run("sweep --task " + path("task.json") +
              " --rejector chow > /dev/null 2>&1") == 2);
  }

  SUBCASE("compare and curve run clean") {
    REQUIRE(run("gen --n-inputs 6 --n-labels 3 --seed 5 --out " +
                path("task.json") + " > /dev/null 2>&1") == 0);
    CHECK(run("compare --task " + path("task.json") +
              " --loss modified-log --lambda 2 --out " + path("cmp.csv") +
              " > /dev/null 2>&1") == 0);
    const std::string cmp = slurp(path("cmp.csv"));
    CHECK(cmp.find("tau,tau_marginal,both,only_marginal,only_joint,neither") !=
          std::string::npos);
    CHECK(cmp.find("# ratio_containment_violations=0") != std::string::npos);
    CHECK(cmp.find("# divergence_containment_violations=0") !=
          std::string::npos);

    for (const std::string family :
         {"chow", "marginal", "joint", "kl", "bhatta"}) {
      CHECK(run("curve --task " + path("task.json") + " --loss log --lambda 2 "
                "--rejector " + family + " --out " + path("curve.csv") +
                " > /dev/null 2>&1") == 0);
      CHECK(slurp(path("curve.csv"))
                .find("threshold,coverage,selective_risk") !=
            std::string::npos);
    }
    CHECK(run("curve --task " + path("task.json") +
              " --lambda 0.5 --rejector bhatta > /dev/null 2>&1") == 2);
  }

  SUBCASE("config files feed flags, command line wins") {
    REQUIRE(run("gen --n-inputs 5 --n-labels 3 --seed 9 --out " +
                path("task.json") + " > /dev/null 2>&1") == 0);
    {
      std::ofstream config(kScratch / "sweep.ini");
      config << "[sweep]\n"
             << "task=" << path("task.json") << "\n"
             << "loss=log\n"
             << "lambda=4.0\n"
             << "rejector=marginal\n";
    }
    CHECK(run("--config " + path("sweep.ini") + " sweep --out " +
              path("cfg.csv") + " > /dev/null 2>&1") == 0);
    CHECK(slurp(path("cfg.csv")).find("lambda=4 ") != std::string::npos);
    CHECK(run("--config " + path("sweep.ini") + " sweep --lambda 2 --out " +
              path("cfg2.csv") + " > /dev/null 2>&1") == 0);
    CHECK(slurp(path("cfg2.csv")).find("lambda=2 ") != std::string::npos);
  }

  SUBCASE("verify exit codes and byte-identical reports") {
    CHECK(run("verify --seed 3 --trials 40 --out " + path("r1.json") +
              " > " + path("v1.txt") + " 2>&1") == 0);
    CHECK(run("verify --seed 3 --trials 40 --out " + path("r2.json") +
              " > " + path("v2.txt") + " 2>&1") == 0);
    CHECK(slurp(path("r1.json")) == slurp(path("r2.json")));
    CHECK(slurp(path("v1.txt")) == slurp(path("v2.txt")));
    CHECK(slurp(path("v1.txt")).find("suite: PASS") != std::string::npos);

    CHECK(run("verify --trials 0 > " + path("v0.txt") + " 2>&1") == 1);
    CHECK(slurp(path("v0.txt")).find("no trials") != std::string::npos);
  }

  SUBCASE("invalid input exits with 2") {
    CHECK(run("frobnicate > /dev/null 2>&1") == 2);
    CHECK(run("sweep --no-such-flag > /dev/null 2>&1") == 2);
    CHECK(run("sweep --task does_not_exist.json > /dev/null 2>&1") == 2);
    {
      std::ofstream bad(kScratch / "bad.json");
      bad << "{\"n_inputs\": 2}";
    }
    CHECK(run("sweep --task " + path("bad.json") + " > /dev/null 2>&1") == 2);
    CHECK(run("gen --n-labels 1 --out /dev/null > /dev/null 2>&1") == 2);
  }
}
