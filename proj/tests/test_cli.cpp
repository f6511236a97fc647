// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "virality_cli_test";

int run(const std::string& args) {
  const std::string cmd = "cd '" + kWork.string() + "' && '" VIRALITY_CLI "' " + args + " > last.log 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

int data_lines(const fs::path& csv) {
  std::ifstream f(csv);
  std::string line;
  std::getline(f, line);
  int n = 0;
  while (std::getline(f, line)) n += !line.empty();
  return n;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  return {std::istreambuf_iterator<char>(f), {}};
}

struct Workspace {
  Workspace() {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
  }
};

}  // namespace

TEST_CASE("cli end to end") {
  Workspace ws;

  SUBCASE("no arguments prints usage and fails") { CHECK(run("") == 1); }
  SUBCASE("unknown subcommand") { CHECK(run("bogus") == 1); }
  SUBCASE("unknown option") { CHECK(run("synth --frobnicate 3") == 1); }
  SUBCASE("missing data file") { CHECK(run("label --data nowhere.jsonl") == 2); }

  SUBCASE("malformed data file") {
    std::ofstream(kWork / "bad.jsonl") << "{not json\n";
    CHECK(run("label --data bad.jsonl --out badrun") == 2);
  }

  SUBCASE("synth, label, sweep and composed sweep") {
    REQUIRE(run("synth --n 500 --seed 7 --out d/") == 0);
    CHECK(fs::exists(kWork / "d/posts.jsonl"));
    CHECK(fs::exists(kWork / "d/planted.csv"));

    REQUIRE(run("validate --data d/posts.jsonl") == 0);

    REQUIRE(run("label --data d/posts.jsonl --label-trees 20") == 0);
    CHECK(fs::exists(kWork / "d/labeling.json"));
    CHECK(fs::exists(kWork / "d/labels.csv"));
    CHECK(fs::exists(kWork / "d/manifest.json"));
    CHECK(data_lines(kWork / "d/labels.csv") == 500);

    REQUIRE(run("sweep --data d/posts.jsonl --windows 30,120 --models gbt --no-cv --label-trees 20 --out s1") == 0);
    CHECK(data_lines(kWork / "s1/window_sweep.csv") == 2);

    REQUIRE(run("features --data d/posts.jsonl --windows 30,120 --label-trees 20 --out f") == 0);
    CHECK(fs::exists(kWork / "f/labeling.json"));
    REQUIRE(run("sweep --data d/posts.jsonl --from f --windows 30,120 --models gbt --no-cv --out s2") == 0);
    // durations differ run to run; compare metric columns only
    auto metrics = [](const fs::path& p) {
      std::ifstream f(p);
      std::string out, line;
      while (std::getline(f, line)) out += line.substr(0, line.rfind(',')) + "\n";
      return out;
    };
    CHECK(metrics(kWork / "s1/window_sweep.csv") == metrics(kWork / "s2/window_sweep.csv"));

    REQUIRE(run("train --data d/posts.jsonl --from f --window 120 --model logreg --out t") == 0);
    CHECK(fs::exists(kWork / "t/model.json"));
    REQUIRE(run("evaluate --data d/posts.jsonl --from t --labeling f/labeling.json --out e") == 0);
    CHECK(fs::exists(kWork / "e/metrics.json"));
  }

  SUBCASE("config file supplies subcommand options") {
    REQUIRE(run("synth --n 800 --seed 3 --out d") == 0);
    std::ofstream(kWork / "run.ini") << "[sweep]\nwindows=60\nmodels=logreg\nno-cv=true\nlabel-trees=10\n";
    REQUIRE(run("--config run.ini sweep --data d/posts.jsonl --out s") == 0);
    CHECK(data_lines(kWork / "s/window_sweep.csv") == 1);
  }

  SUBCASE("bad option value is a usage error") {
    REQUIRE(run("synth --n 100 --out d") == 0);
    CHECK(run("sweep --data d/posts.jsonl --models svm --out s") == 1);
  }
}
