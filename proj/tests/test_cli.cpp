// Runs the command-line tool as a subprocess.
#include <doctest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <json.hpp>
#include <string>

using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  std::string cmd = std::string(DISCYCLE_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const std::string& name) { return std::string(DISCYCLE_TEST_DATA) + "/" + name; }

std::string scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "discycle_cli_test";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate is reproducible from the seed") {
  auto a = run("simulate --model " + data("one_edge_model.json") + " --n 200 --seed 9");
  auto b = run("simulate --model " + data("one_edge_model.json") + " --n 200 --seed 9");
  auto c = run("simulate --model " + data("one_edge_model.json") + " --n 200 --seed 10");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out != c.out);
  CHECK(a.out.rfind("X1,X2,X3\n", 0) == 0);
  CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 201);
}

TEST_CASE("population discovery from exact moments") {
  auto mpath = scratch("one_edge_moments.json");
  REQUIRE(run("moments --model " + data("one_edge_model.json") + " --out " + mpath).code == 0);
  auto r = run("discover --moments " + mpath + " --mode population --tol 1e-9");
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["status"] == "complete");
  REQUIRE(j["edges"].size() == 1);
  CHECK(j["edges"][0][0] == 1);
  CHECK(j["edges"][0][1] == 2);
  CHECK(j["edges"][0][2].get<double>() == doctest::Approx(3.0).epsilon(1e-12));

  auto overlap = scratch("overlap_moments.json");
  REQUIRE(run("moments --model " + data("overlap_model.json") + " --out " + overlap).code == 0);
  auto h = run("discover --moments " + overlap + " --mode population");
  REQUIRE(h.code == 0);
  CHECK(json::parse(h.out)["status"] == "halted_no_simple_cycle");
}

TEST_CASE("sample discovery from a CSV") {
  auto csv = scratch("one_edge.csv");
  REQUIRE(run("simulate --model " + data("one_edge_model.json") + " --n 20000 --seed 3 --out " + csv).code == 0);
  auto r = run("discover --data " + csv + " --alpha 0.05 --correction bh");
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  REQUIRE(j["edges"].size() == 1);
  CHECK(j["edges"][0][2].get<double>() == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("equivalence class") {
  auto r = run("equiv --graph " + data("overlap_graph.json"));
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out).size() == 3);
  auto w = run("equiv --graph " + data("layered_graph.json") + " --weights " + data("layered_model.json"));
  REQUIRE(w.code == 0);
  auto cls = json::parse(w.out);
  CHECK(cls.size() == 4);
  CHECK(cls[0].contains("omega3"));
}

TEST_CASE("benchmark output") {
  auto sum = scratch("summary.csv"), plot = scratch("plot.gp");
  auto r = run("bench --p 6 --cycle-size 3 --n 1000 --reps 2 --mode population --summary " + sum + " --gnuplot " +
               plot);
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("rep,n,p,dist,alpha,correction,ordering_ok,correct_pairs,runtime_s,status\n", 0) == 0);
  CHECK(std::filesystem::exists(sum));
  CHECK(std::filesystem::exists(plot));
}

TEST_CASE("exit codes") {
  CHECK(run("discover --data /nonexistent/file.csv").code == 1);
  CHECK(run("simulate --model " + data("one_edge_model.json")).code == 1);  // --n missing
  CHECK(run("simulate --model " + data("one_edge_model.json") + " --n 10 --bogus").code == 1);
  CHECK(run("frobnicate").code == 1);
  CHECK(run("equiv --graph " + data("layered_model.json")).code == 1);  // weighted edges are not a graph
  CHECK(run("discover --moments " + data("one_edge_model.json") + " --mode sample").code == 1);

  // Zero weights on the cycle block the weighted class: a numerical failure.
  auto zero = scratch("zero.json");
  FILE* f = std::fopen(zero.c_str(), "w");
  REQUIRE(f != nullptr);
  std::fputs(R"({"p": 3, "edges": [[1, 2, 3], [2, 3, 0], [3, 1, 0]], "omega2": [1, 2, 1], "omega3": [1, 2, 1]})", f);
  std::fclose(f);
  auto graph = scratch("cycle.json");
  f = std::fopen(graph.c_str(), "w");
  std::fputs(R"({"p": 3, "edges": [[1, 2], [2, 3], [3, 1]]})", f);
  std::fclose(f);
  CHECK(run("equiv --graph " + graph + " --weights " + zero).code == 2);
  CHECK(run("--help").code == 0);
}

}  // TEST_SUITE
