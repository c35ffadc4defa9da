#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "mlr/bench.hpp"

using namespace mlr;
using namespace mlr::bench;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// strips the named columns so wall-clock noise does not break equality
std::string drop_columns(const std::string& csv, const std::vector<std::string>& names) {
  std::stringstream in(csv), out;
  std::string line;
  std::vector<int> drop;
  bool first = true;
  while (std::getline(in, line)) {
    std::stringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (first) {
      for (size_t c = 0; c < fields.size(); ++c)
        for (const auto& n : names)
          if (fields[c] == n) drop.push_back(static_cast<int>(c));
      first = false;
    }
    bool wrote = false;
    for (size_t c = 0; c < fields.size(); ++c) {
      if (std::find(drop.begin(), drop.end(), static_cast<int>(c)) != drop.end()) continue;
      if (wrote) out << ',';
      out << fields[c];
      wrote = true;
    }
    out << '\n';
  }
  return out.str();
}

ExperimentSpec tiny_spec() {
  ExperimentSpec spec = default_spec(Panel::fig3a);
  spec.d_list = {16};
  spec.trials = 3;
  spec.root_seed = 99;
  return spec;
}

}  // namespace

TEST_CASE("trial seeds are stable under adding trials") {
  const uint64_t a = trial_seed(1, 50, 0);
  CHECK(a == trial_seed(1, 50, 0));
  CHECK(a != trial_seed(1, 50, 1));
  CHECK(a != trial_seed(1, 100, 0));
  CHECK(a != trial_seed(2, 50, 0));
}

TEST_CASE("panel outputs are byte-identical across reruns") {
  TempDir d1("mlr_bench_a"), d2("mlr_bench_b");
  const ExperimentSpec spec = tiny_spec();
  run_panel(spec, d1.path.string());
  run_panel(spec, d2.path.string());
  for (const char* name : {"fig3a_curves.csv", "fig3a_loglog.csv", "fig3a_meta.json"})
    CHECK(read_file(d1.path / name) == read_file(d2.path / name));
  const std::string r1 =
      drop_columns(read_file(d1.path / "fig3a_records.csv"), {"wall_clock_s"});
  const std::string r2 =
      drop_columns(read_file(d2.path / "fig3a_records.csv"), {"wall_clock_s"});
  CHECK(r1 == r2);
}

TEST_CASE("adding trials preserves earlier records") {
  TempDir dir("mlr_bench_grow");
  ExperimentSpec spec = tiny_spec();
  const PanelResult small = run_panel(spec, "");
  spec.trials = 5;
  const PanelResult big = run_panel(spec, "");
  REQUIRE(big.records.size() >= small.records.size());
  for (size_t i = 0; i < small.records.size(); ++i) {
    CHECK(small.records[i].seed == big.records[i].seed);
    CHECK(small.records[i].final_dist == big.records[i].final_dist);
  }
}

TEST_CASE("records round-trip through their CSV at 17 digits") {
  TempDir dir("mlr_bench_rt");
  const ExperimentSpec spec = tiny_spec();
  const PanelResult res = run_panel(spec, dir.path.string());
  std::ifstream in(dir.path / "fig3a_records.csv");
  std::string line;
  REQUIRE(std::getline(in, line));  // header
  for (const auto& rec : res.records) {
    REQUIRE(std::getline(in, line));
    std::stringstream ls(line);
    std::vector<std::string> f;
    std::string field;
    while (std::getline(ls, field, ',')) f.push_back(field);
    REQUIRE(f.size() == 12);
    CHECK(std::stoi(f[1]) == rec.d);
    CHECK(std::stoull(f[6]) == rec.seed);
    CHECK(std::stod(f[9]) == rec.wall_clock_s);
    CHECK(std::stod(f[11]) == rec.final_dist);
  }
}

TEST_CASE("mean curves flatten after convergence and reach zero") {
  const ExperimentSpec spec = tiny_spec();
  const PanelResult res = run_panel(spec, "");
  REQUIRE(res.mean_curves.size() == 1);
  const auto& curve = res.mean_curves[0].second;
  REQUIRE(curve.size() >= 5);
  CHECK(curve.front() > 0.1);
  CHECK(curve.back() < 1e-8);
}

TEST_CASE("table rows come in am/gd pairs with the right columns") {
  TempDir dir("mlr_bench_tbl");
  ExperimentSpec spec = default_spec(Panel::table1);
  spec.d_list = {16};
  spec.trials = 3;
  spec.root_seed = 4;
  const auto rows = compare_table(spec, dir.path.string());
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].algorithm == "am");
  CHECK(rows[1].algorithm == "gd");
  CHECK(rows[0].iterations >= 1.0);
  CHECK(rows[1].iterations > rows[0].iterations);
  const std::string csv = read_file(dir.path / "table1.csv");
  CHECK(csv.rfind("d,algorithm,iterations,wall_clock_s\n", 0) == 0);
}

TEST_CASE("zero-radius sweep sees no mismatches") {
  const auto res = lemma1_sweep(8, 200, {0.0, 0.1}, 5, 7, "");
  REQUIRE(res.points.size() == 2);
  CHECK(res.points[0].second == 0.0);
  CHECK(res.points[1].second > 0.0);
}

TEST_CASE("halving the radius roughly halves the mismatch fraction") {
  const GroundTruth gt = random_truth(2, 20, 0.0, 11);
  (void)gt;
  // radii chosen well inside the linear regime
  const auto res = lemma1_sweep(20, 2000, {0.4, 0.2}, 30, 11, "");
  const double ratio = res.points[1].second / res.points[0].second;
  CHECK(ratio >= 0.3);
  CHECK(ratio <= 0.7);
}

TEST_CASE("json specs parse with defaults and validation") {
  TempDir dir("mlr_bench_json");
  {
    std::ofstream out(dir.path / "spec.json");
    out << R"({"panel":"fig3b","d_list":[32,48],"trials":2,"root_seed":5,)"
        << R"("sigma":0.05,"init":"perturbed","max_rounds":9})";
  }
  const ExperimentSpec spec = spec_from_json_file((dir.path / "spec.json").string());
  CHECK(spec.panel == Panel::fig3b);
  CHECK(spec.d_list == std::vector<int>{32, 48});
  CHECK(spec.trials == 2);
  CHECK(spec.sigma == 0.05);
  CHECK(spec.max_rounds == 9);
  CHECK(spec.n_over_d == 6.0);  // panel default survives

  {
    std::ofstream out(dir.path / "bad.json");
    out << R"({"panel":"fig3a","trials":0})";
  }
  CHECK_THROWS_AS(spec_from_json_file((dir.path / "bad.json").string()), InvalidSpec);
  {
    std::ofstream out(dir.path / "broken.json");
    out << "{not json";
  }
  CHECK_THROWS_AS(spec_from_json_file((dir.path / "broken.json").string()), InvalidSpec);
}

TEST_CASE("run_panel validates its spec") {
  ExperimentSpec spec = tiny_spec();
  spec.d_list.clear();
  CHECK_THROWS_AS(run_panel(spec, ""), InvalidSpec);
  spec = tiny_spec();
  spec.panel = Panel::table1;
  CHECK_THROWS_AS(run_panel(spec, ""), InvalidSpec);
  spec = tiny_spec();
  spec.init = InitPolicy::spectral;
  spec.K = 3;
  CHECK_THROWS_AS(run_panel(spec, ""), InvalidSpec);
}

TEST_CASE("radius policies parse") {
  ExperimentSpec spec = tiny_spec();
  spec.init_radius_policy = "boundary*0.5";
  CHECK_NOTHROW(run_panel(spec, ""));
  spec.init_radius_policy = "0.25";
  CHECK_NOTHROW(run_panel(spec, ""));
  spec.init_radius_policy = "maximal";
  CHECK_THROWS_AS(run_panel(spec, ""), InvalidSpec);
}
