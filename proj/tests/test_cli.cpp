#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <json.hpp>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

// Scratch directory removed on scope exit.
struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("topomap_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Runs the CLI inside `cwd`; stdout and stderr go to files there.
int run(const fs::path& cwd, const std::string& args) {
  const std::string cmd = "cd '" + cwd.string() + "' && '" + TOPOMAP_CLI_PATH + "' " + args +
                          " > stdout.txt 2> stderr.txt";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = slurp(e.path());
  }
  return out;
}

void make_world(const fs::path& dir, const std::string& kind, int seed) {
  REQUIRE(run(dir, "--out-dir in --seed " + std::to_string(seed) + " make-world --kind " + kind) == 0);
}

}  // namespace

TEST_CASE("help exits 0 on every subcommand") {
  TempDir t;
  CHECK(run(t.path, "--help") == 0);
  for (const char* sub : {"binarize", "skeletonize", "prune", "explore", "match", "distance", "pipeline", "make-world"}) {
    INFO(std::string(sub));
    CHECK(run(t.path, std::string(sub) + " --help") == 0);
    CHECK(slurp(t.path / "stdout.txt").find("--") != std::string::npos);
  }
}

TEST_CASE("usage errors exit 2") {
  TempDir t;
  make_world(t.path, "rooms", 1);
  CHECK(run(t.path, "pipeline --input in/world.pgm --no-such-flag") == 2);
  CHECK(slurp(t.path / "stderr.txt").find("Usage") != std::string::npos);
  CHECK(run(t.path, "") == 2);
  CHECK(run(t.path, "pipeline --input missing.pgm") == 2);
  CHECK(run(t.path, "pipeline --input in/world.pgm --tau -1") == 2);
  CHECK(run(t.path, "pipeline --input in/world.pgm --min-branch-area -3") == 2);
  CHECK(run(t.path, "make-world --kind volcano") == 2);
}

TEST_CASE("pipeline writes graph, skeleton and svg") {
  TempDir t;
  make_world(t.path, "cave", 2);
  REQUIRE(run(t.path, "--out-dir out --svg pipeline --input in/world.pgm") == 0);
  CHECK(slurp(t.path / "stdout.txt").empty());
  const fs::path out = t.path / "out";
  CHECK(fs::exists(out / "skeleton.pgm"));
  CHECK(fs::exists(out / "pipeline.svg"));
  CHECK(slurp(out / "pipeline.svg").find("<svg") != std::string::npos);
  const auto graph = nlohmann::json::parse(slurp(out / "graph.json"));
  CHECK(graph.at("nodes").size() > 0);
  CHECK(graph.at("edges").size() > 0);
  CHECK(slurp(out / "skeleton.pgm").substr(0, 2) == "P5");
}

TEST_CASE("match and distance of a graph with itself") {
  TempDir t;
  make_world(t.path, "corridors", 3);
  REQUIRE(run(t.path, "--out-dir out skeletonize --input in/world.pgm") == 0);
  REQUIRE(run(t.path, "--out-dir out match --graph-a out/graph.json --graph-b out/graph.json") == 0);
  REQUIRE(run(t.path, "--out-dir out distance --graph-a out/graph.json --graph-b out/graph.json "
                      "--corr out/correspondence.json") == 0);
  const auto d = nlohmann::json::parse(slurp(t.path / "out" / "distance.json"));
  CHECK(d.at("d").get<double>() == 0.0);
}

TEST_CASE("same seed gives a byte-identical out-dir") {
  TempDir t;
  make_world(t.path, "cave", 5);
  const std::string args = " --seed 7 --svg explore --world in/world.pgm --max-steps 6 --noise 0.05";
  REQUIRE(run(t.path, "--out-dir a" + args) == 0);
  REQUIRE(run(t.path, "--out-dir b" + args) == 0);
  const auto a = tree(t.path / "a"), b = tree(t.path / "b");
  CHECK(a.size() > 3);
  CHECK(a == b);
  REQUIRE(run(t.path, "--out-dir c --seed 8 --svg explore --world in/world.pgm --max-steps 6 --noise 0.05") == 0);
  CHECK(tree(t.path / "c") != a);
}

TEST_CASE("nothing is written outside the out-dir") {
  TempDir t;
  make_world(t.path, "rooms", 4);
  const auto before = tree(t.path / "in");
  const std::vector<std::string> commands = {
      "--out-dir o1 --svg pipeline --input in/world.pgm",
      "--out-dir o2 binarize --input in/world.pgm",
      "--out-dir o3 --svg explore --world in/world.pgm --max-steps 3",
      "--out-dir o4 make-world --kind cave",
  };
  std::set<std::string> expected = {"in", "stdout.txt", "stderr.txt"};
  for (std::size_t i = 0; i < commands.size(); ++i) {
    INFO(commands[i]);
    CHECK(run(t.path, commands[i]) == 0);
    CHECK(slurp(t.path / "stdout.txt").empty());
    expected.insert("o" + std::to_string(i + 1));
    std::set<std::string> present;
    for (const auto& e : fs::directory_iterator(t.path)) present.insert(e.path().filename().string());
    CHECK(present == expected);
  }
  CHECK(tree(t.path / "in") == before);
}

TEST_CASE("logs go to standard error") {
  TempDir t;
  make_world(t.path, "rooms", 2);
  REQUIRE(run(t.path, "--out-dir o --log-level debug explore --world in/world.pgm --max-steps 2") == 0);
  CHECK(slurp(t.path / "stdout.txt").empty());
  CHECK(!slurp(t.path / "stderr.txt").empty());
}
