#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <doctest.h>

#include <mfgnet/io.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "mfgnet");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = mfgnet::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string config(const std::string& name) {
  return (fs::path(MFGNET_CONFIG_DIR) / name).string();
}

std::string scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mfgnet-cli-" + name);
  fs::remove_all(p);
  return p.string();
}

}  // namespace

TEST_CASE("stationary from reduced coefficients") {
  const std::string dir = scratch("stationary");
  const Run r = cli({"stationary", "--config", config("stationary_symmetric.json"), "--out", dir});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["y_star"] == json::array({-1.0, -1.0}));
  CHECK(j["classification"]["verdict"] == "stable node");
  CHECK(fs::exists(fs::path(dir) / "summary.json"));
}

TEST_CASE("scenario bundle") {
  const std::string dir = scratch("scenario");
  const Run r = cli({"scenario", "--config", config("scenario_sequential.json"), "--out", dir});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["files"].size() == 7);
  for (const auto& f : j["files"]) CHECK(fs::exists(fs::path(dir) / f.get<std::string>()));
}

TEST_CASE("usage and domain errors") {
  CHECK(cli({"no-such-command"}).code == 2);
  CHECK(cli({}).code == 2);
  CHECK(cli({"stationary", "--jobs", "0"}).code == 2);

  const Run missing = cli({"buckets", "--config", "/nonexistent/cfg.json", "--out", scratch("x")});
  CHECK(missing.code == 1);
  CHECK(json::parse(missing.err)["error"] == "IoError");

  const std::string cfg = scratch("bad.json");
  mfgnet::write_text_file(cfg, R"({"infection": [0.1], "colour": 1})");
  const Run unknown = cli({"buckets", "--config", cfg, "--out", scratch("y")});
  CHECK(unknown.code == 1);
  CHECK(unknown.err.find("colour") != std::string::npos);
}

TEST_CASE("help lists the config keys") {
  const Run h = cli({"grid-sim", "--help"});
  CHECK(h.code == 0);
  for (const char* key : {"infection_file", "adjacency_coupling", "band", "k_hat", "stride"})
    CHECK(h.out.find(key) != std::string::npos);
}

TEST_CASE("outputs do not depend on the worker count") {
  const std::string a = scratch("jobs1"), b = scratch("jobs4");
  const Run r1 = cli({"convergence", "--config", config("convergence.json"), "--out", a, "--jobs", "1"});
  const Run r4 = cli({"convergence", "--config", config("convergence.json"), "--out", b, "--jobs", "4"});
  REQUIRE(r1.code == 0);
  REQUIRE(r4.code == 0);
  CHECK(r1.out == r4.out);
  CHECK(mfgnet::read_text_file(a + "/convergence.csv") ==
        mfgnet::read_text_file(b + "/convergence.csv"));
}
