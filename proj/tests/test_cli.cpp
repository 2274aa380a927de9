#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "mfiso/corpus.hpp"
#include "mfiso/io.hpp"

using namespace mfiso;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  std::string cmd = std::string(MFISO_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  std::array<char, 4096> buf;
  while (size_t k = fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), k);
  int st = pclose(p);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("mfiso_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    auto p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string write_g6(const std::string& name, const Graph& g) { return write(name, to_graph6(g) + "\n"); }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, IsoExitCodes) {
  Rng rng(1);
  Graph g = random_planar(12, rng);
  auto a = write_g6("a.g6", g);
  auto b = write_g6("b.g6", relabel(g, random_permutation(12, rng)));
  auto c = write_g6("c.g6", cycle_graph(12));
  auto r = run("iso " + a + " " + b + " --h 5 --emit-aut");
  EXPECT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  EXPECT_EQ(j["decision"], "isomorphic");
  EXPECT_TRUE(j.contains("aut"));
  EXPECT_EQ(run("iso " + a + " " + c + " --h 5").code, 1);
  auto k = write_g6("k.g6", complete_graph(7));
  int code = run("iso " + k + " " + k + " --h 3").code;
  EXPECT_TRUE(code == 2 || code == 0);
}

TEST_F(CliTest, Wl2PairsSumToNSquared) {
  auto c6 = write_g6("c6.g6", cycle_graph(6));
  auto r = run("wl2 " + c6);
  ASSERT_EQ(r.code, 0);
  int total = 0;
  auto j = json::parse(r.out);
  for (int s : j["class_sizes"]) total += s;
  EXPECT_EQ(total, 36);
}

TEST_F(CliTest, DecomposeGrid) {
  auto g = write_g6("grid5.g6", grid_graph(5, 5));
  auto r = run("decompose " + g + " --h 5");
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  EXPECT_LT(j["adhesion"].get<int>(), 5);
  EXPECT_FALSE(j["nodes"].empty());
  auto small = run("decompose " + g + " --h 5 --t 3");
  ASSERT_EQ(small.code, 0);
  EXPECT_LT(json::parse(small.out)["adhesion"].get<int>(), 5);
  auto dot = run("decompose " + g + " --format dot");
  EXPECT_EQ(dot.out.rfind("graph decomposition {", 0), 0u);
}

TEST_F(CliTest, RefineClosureInitialColor) {
  auto s = write_g6("star.g6", star_graph(5));
  auto r = json::parse(run("refine " + s).out);
  EXPECT_EQ(r["classes"].size(), 2u);
  auto cl = json::parse(run("closure " + s + " --x 0 --t 5").out);
  EXPECT_EQ(cl["d"].size(), 6u);
  auto cl2 = json::parse(run("closure " + s + " --x 0 --t 4").out);
  EXPECT_EQ(cl2["d"], json::array({0}));
  EXPECT_EQ(cl2["separators"].size(), 5u);
  auto ic = json::parse(run("initial-color " + s + " --h 5").out);
  EXPECT_FALSE(ic["minor"].get<bool>());
  EXPECT_FALSE(ic["x"].empty());
}

TEST_F(CliTest, AutAndWitness) {
  auto p = write_g6("p.g6", petersen_graph());
  auto r = run("aut " + p);
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out)["order"], "120");
  Rng rng(4);
  auto wi = random_witness_instance(3, 4, 81, 2, rng);
  auto w = write_g6("w.g6", wi.g);
  auto wr = run("witness " + w + " --v1 0,1,2 --h 3");
  ASSERT_EQ(wr.code, 0);
  auto j = json::parse(wr.out);
  EXPECT_EQ(j["branch"].size(), 3u);
  EXPECT_EQ(j["paths"].size(), 3u);
}

TEST_F(CliTest, EdgeListInputWithColors) {
  auto a = write("a.txt", "3 2\n0 1\n1 2\nc 0 1\n");
  auto b = write("b.txt", "3 2\n0 1\n1 2\nc 1 1\n");
  auto c = write("c.txt", "3 2\n0 1\n1 2\nc 2 1\n");
  EXPECT_EQ(run("iso " + a + " " + b).code, 1);
  EXPECT_EQ(run("iso " + a + " " + c).code, 0);
}

TEST_F(CliTest, GenCorpusDeterministic) {
  auto a = run("--seed 9 gen-corpus --kind ktree --n 15 --count 5 --k 3");
  auto b = run("gen-corpus --kind ktree --n 15 --count 5 --k 3 --seed 9");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  std::istringstream in(a.out);
  auto gs = read_graph6_lines(in);
  ASSERT_EQ(gs.size(), 5u);
  for (auto& g : gs) EXPECT_TRUE(is_connected(g));
}

TEST_F(CliTest, OutputIsByteIdentical) {
  auto g = write_g6("g.g6", grid_graph(4, 5));
  EXPECT_EQ(run("decompose " + g + " --t 3").out, run("decompose " + g + " --t 3").out);
  EXPECT_EQ(run("aut " + g).out, run("aut " + g).out);
}

TEST_F(CliTest, ErrorCodes) {
  EXPECT_EQ(run("").code, 64);
  EXPECT_EQ(run("bogus").code, 64);
  EXPECT_EQ(run("iso only_one.g6").code, 64);
  EXPECT_EQ(run("refine --h 1 x.g6").code, 64);
  EXPECT_EQ(run("refine " + (dir_ / "missing.g6").string()).code, 65);
  auto bad = write("bad.g6", "x!!\n");
  EXPECT_EQ(run("refine " + bad).code, 65);
  auto badlist = write("bad.txt", "0 1 2\n");
  EXPECT_EQ(run("refine " + badlist).code, 65);
  auto s = write_g6("s.g6", star_graph(3));
  EXPECT_EQ(run("closure " + s + " --x 9").code, 65);
  EXPECT_EQ(run("--help").code, 0);
}
