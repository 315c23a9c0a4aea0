#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "slfv/cli.hpp"

namespace fs = std::filesystem;
using slfv::cli::run;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("slfv_unit_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

nlohmann::json small_config() {
  return nlohmann::json::parse(R"({
    "model": {"L": 64, "alpha": 0.5, "R_s": 1, "R_B": 1, "u_s": 0.3, "u_B": 0.3, "rho": 16, "r": 0.1,
              "lambda_s": {"2": 1.0}, "lambda_B": {"2": 1.0}, "beta": 0.75},
    "estimator": {"replicates": 30, "seed": 5, "t_grid": [0.75, 0.9, 1.0], "phase2_grid": [1.0]},
    "ibd": {"thetas": [0.001]},
    "output": {"prefix": "t"}
  })");
}

fs::path write_config(const fs::path& dir, const nlohmann::json& doc) {
  const auto path = dir / "config.json";
  std::ofstream(path) << doc.dump(2);
  return path;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int invoke(std::vector<std::string> args, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = slfv::cli::parse_config(small_config());
  CHECK(cfg.model.side == 64);
  CHECK(cfg.model.small_parents.mass(2) == 1.0);
  CHECK(cfg.estimator.replicates == 30);
  CHECK(cfg.horizon_multiplier == 50.0);

  auto doc = small_config();
  doc["model"].erase("u_B");
  try {
    slfv::cli::parse_config(doc);
    FAIL("expected an error");
  } catch (const slfv::cli::ConfigFieldError& e) {
    CHECK(e.field() == "model.u_B");
  }

  doc = small_config();
  doc["model"]["colour"] = 1;
  CHECK_THROWS_AS(slfv::cli::parse_config(doc), slfv::cli::ConfigFieldError);
  doc = small_config();
  doc["estimator"].erase("seed");
  CHECK_THROWS_AS(slfv::cli::parse_config(doc), slfv::cli::ConfigFieldError);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("codes");
  auto doc = small_config();
  doc["model"].erase("rho");
  std::string err;
  CHECK(invoke({"theory", "scales", "-c", write_config(dir, doc).string(), "-o", dir.string()}, &err) == 2);
  CHECK(err.find("model.rho") != std::string::npos);

  doc = small_config();
  doc["model"]["u_s"] = 1.0;
  CHECK(invoke({"sim", "pair", "-c", write_config(dir, doc).string(), "-o", dir.string()}, &err) == 2);
  CHECK(err.find("u_s must lie in (0,1)") != std::string::npos);

  std::ofstream(dir / "broken.json") << "{\n  \"model\": {,\n}";
  CHECK(invoke({"theory", "scales", "-c", (dir / "broken.json").string()}, &err) == 2);
  CHECK(err.find("line") != std::string::npos);

  CHECK(invoke({"nonsense"}) == 2);
}

TEST_CASE("theory scales output") {
  const auto dir = scratch("scales");
  auto doc = small_config();
  doc["model"]["r"] = 1.0;
  doc["model"]["rho"] = 60;
  REQUIRE(invoke({"theory", "scales", "-c", write_config(dir, doc).string(), "-o", dir.string()}) == 0);
  const auto text = slurp(dir / "t_scales.csv");
  CHECK(text.find("gamma_finite") != std::string::npos);
  CHECK(fs::exists(dir / "t_scales.meta.json"));
}

TEST_CASE("simulation output is byte-identical across runs and worker counts") {
  const auto dir = scratch("repro");
  const auto cfg = write_config(dir, small_config());
  for (const std::string target : {"pair", "two-locus"}) {
    const auto a = dir / (target + "_a"), b = dir / (target + "_b");
    REQUIRE(invoke({"sim", target, "-c", cfg.string(), "-o", a.string(), "-w", "1"}) == 0);
    REQUIRE(invoke({"sim", target, "-c", cfg.string(), "-o", b.string(), "-w", "4"}) == 0);
    int files = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
      if (entry.path().extension() != ".csv") continue;
      ++files;
      CHECK_MESSAGE(slurp(entry.path()) == slurp(b / entry.path().filename()), entry.path().string());
    }
    CHECK(files >= 3);
  }
  const auto header = slurp(dir / "pair_a" / "t_pair_survival.csv");
  CHECK(header.rfind("t_exponent,threshold_time,survival,ci_lo,ci_hi,n,censored\n", 0) == 0);
}

TEST_CASE("seed override from the environment") {
  const auto dir = scratch("seed");
  const auto cfg = write_config(dir, small_config());
  REQUIRE(invoke({"sim", "pair", "-c", cfg.string(), "-o", (dir / "a").string()}) == 0);
  setenv("SLFV_SEED", "991", 1);
  REQUIRE(invoke({"sim", "pair", "-c", cfg.string(), "-o", (dir / "b").string()}) == 0);
  unsetenv("SLFV_SEED");
  CHECK(slurp(dir / "a" / "t_pair_records.csv") != slurp(dir / "b" / "t_pair_records.csv"));
  const auto meta = nlohmann::json::parse(slurp(dir / "b" / "t_pair.meta.json"));
  CHECK(meta.at("seed") == 991);
}

TEST_CASE("format_double") {
  CHECK(slfv::cli::format_double(0.1) == "0.10000000000000001");
  CHECK(slfv::cli::format_double(2.0) == "2");
}
