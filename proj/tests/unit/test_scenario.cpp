#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>
#include <doctest.h>

#include <mfgnet/error.hpp>
#include <mfgnet/io.hpp>
#include <mfgnet/scenario.hpp>

using namespace mfgnet;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mfgnet-unit-" + name);
  fs::remove_all(p);
  return p;
}

InfectionHistogram hist(std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
  InfectionHistogram h;
  h.counts = {a, b, c, d};
  return h;
}

}  // namespace

TEST_CASE("bucket histogram") {
  const std::vector<double> spread{0.1, 0.3, 0.6, 0.9};
  CHECK(bucket_histogram(spread) == hist(1, 1, 1, 1));
  CHECK(bucket_histogram(std::vector<double>(11, 0.0)) == hist(11, 0, 0, 0));
  const std::vector<double> edges{0.25, 0.5, 0.75, 1.0};
  CHECK(bucket_histogram(edges) == hist(0, 1, 1, 2));
  CHECK(bucket_histogram(std::vector<double>{1.0 + 1e-12}) == hist(0, 0, 0, 1));
  CHECK_THROWS_AS(bucket_histogram(std::vector<double>{1.1}), Error);
  CHECK_THROWS_AS(bucket_histogram(std::vector<double>{-0.01}), Error);
  CHECK(hist(2, 4, 5, 0).infected() == 9);
}

TEST_CASE("stochastic dominance") {
  CHECK(stochastically_dominates(hist(0, 6, 5, 0), hist(2, 4, 5, 0)));
  CHECK_FALSE(stochastically_dominates(hist(2, 4, 5, 0), hist(0, 6, 5, 0)));
  CHECK_FALSE(stochastically_dominates(hist(1, 1, 1, 1), hist(1, 1, 1, 1)));
  // crossing tails
  CHECK_FALSE(stochastically_dominates(hist(1, 3, 0, 0), hist(2, 0, 2, 0)));
}

TEST_CASE("histogram json") {
  const auto j = nlohmann::json::parse(histogram_json(hist(3, 2, 1, 0)));
  CHECK(j["counts"] == nlohmann::json::array({3, 2, 1, 0}));
  CHECK(j["buckets"].size() == 4);
}

TEST_CASE("scenario configuration") {
  CHECK_THROWS_AS(ScenarioConfig::from_json(R"({"seed": 1, "colour": 2})"), Error);
  CHECK_THROWS_AS(ScenarioConfig::from_json(R"({"epidemic": {"beta99": 1}})"), Error);
  const ScenarioConfig c =
      ScenarioConfig::from_json(R"({"seed": 5, "attack": {"kind": "sequential"}})");
  CHECK(c.seed == 5);
  CHECK(c.attack.kind == AttackKind::sequential);

  ScenarioConfig w = ScenarioConfig::preset(AttackKind::continuous_low_rate);
  const NodeTriple x0 = w.resolve();
  CHECK(x0 == walpole_node11_initial());
  CHECK(w.grid.n == 11);
  CHECK(w.attack.base13 == w.epidemic.beta13);
}

TEST_CASE("scenario without infection") {
  ScenarioConfig c = ScenarioConfig::preset(AttackKind::continuous_low_rate);
  c.epidemic.beta13 = c.epidemic.beta23 = 0.0;
  c.epidemic_horizon = 20;
  c.steady_horizon = 60;
  c.grid_iterations = 200;
  c.output = scratch("clean").string();
  const ScenarioReport r = run_scenario(c);
  CHECK(r.final == hist(11, 0, 0, 0));
  CHECK_FALSE(r.band_exceeded);
  REQUIRE(r.files.size() == 7);

  const auto manifest =
      nlohmann::json::parse(read_text_file((fs::path(c.output) / "manifest.json").string()));
  CHECK(manifest["partial"] == false);
  for (const auto& f : manifest["files"]) {
    const std::string body = read_text_file((fs::path(c.output) / f["name"].get<std::string>()).string());
    CHECK(f["sha256"] == sha256_hex(body));
    CHECK(f["bytes"] == body.size());
  }
}

TEST_CASE("failing scenario leaves a partial manifest") {
  ScenarioConfig c = ScenarioConfig::preset(AttackKind::continuous_low_rate);
  c.epidemic_horizon = 20;
  c.steady_horizon = 20;
  c.epidemic.beta13 = c.epidemic.beta23 = 50;
  c.epidemic_dt = 0.5;  // passes validation, then overshoots the simplex
  c.output = scratch("partial").string();
  CHECK_THROWS_AS(run_scenario(c), Error);
  const auto manifest =
      nlohmann::json::parse(read_text_file((fs::path(c.output) / "manifest.json").string()));
  CHECK(manifest["partial"] == true);
  CHECK(manifest.contains("error"));
  CHECK(manifest["files"].is_array());
}
