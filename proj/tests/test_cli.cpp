#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "gsde/config.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "gsde_cli_tests";

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(GSDE_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const std::string& name, const std::string& text) {
  fs::create_directories(kWork);
  const fs::path p = kWork / name;
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(static_cast<bool>(in));
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const std::string kBase = R"([grid]
horizon = 1.0
steps = 32

[family.p]
kind = constant
value = 4.0

[family.q]
kind = regime_switching
states = 1.0, 4.0
switch_prob = 0.1

[coefficients]
builtin = gbm

[functional]
kind = terminal
payoff = call
strike = 1.0

[run]
n_paths = 50
master_seed = 11
)";

}  // namespace

TEST_CASE("usage errors exit with code 2 and help with 0") {
  CHECK(run_cli("") == 2);
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("frobnicate --config x.ini") == 2);
  CHECK(run_cli("simulate") == 2);  // --config is required
  CHECK(run_cli("simulate --config /no/such/file.ini") == 2);
}

TEST_CASE("config syntax and semantic problems exit with code 2") {
  const fs::path bad = write_config("bad_syntax.ini", "orphan = 1\n");
  CHECK(run_cli("simulate --config " + bad.string()) == 2);

  const fs::path noseed = write_config(
      "no_seed.ini",
      "[grid]\nhorizon = 1\nsteps = 8\n[family.p]\nkind = constant\nvalue = 1\n"
      "[run]\nn_paths = 5\n");
  CHECK(run_cli("simulate --config " + noseed.string()) == 2);
}

TEST_CASE("simulate writes per-member drivers, a summary, and a manifest") {
  const fs::path cfg = write_config("sim.ini", kBase);
  const fs::path out = kWork / "sim_out";
  fs::remove_all(out);
  CHECK(run_cli("simulate --config " + cfg.string() + " --out " +
                out.string()) == 0);
  CHECK(fs::exists(out / "drivers_p.csv"));
  CHECK(fs::exists(out / "drivers_q.csv"));
  CHECK(fs::exists(out / "summary.json"));

  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["command"] == "simulate");
  CHECK(manifest["master_seed"] == 11);
  CHECK(manifest["config_hash"].get<std::string>().size() == 16);
  bool saw_summary = false;
  for (const auto& o : manifest["outputs"])
    saw_summary |= o["file"] == "summary.json";
  CHECK(saw_summary);
}

TEST_CASE("compat and patch succeed on the overlap family") {
  const fs::path cfg = write_config("overlap.ini", kBase);
  const fs::path out = kWork / "overlap_out";
  fs::remove_all(out);
  CHECK(run_cli("compat --config " + cfg.string() + " --out " + out.string()) ==
        0);
  const auto compat = nlohmann::json::parse(slurp(out / "compat.json"));
  CHECK(compat["pass"] == true);
  CHECK(compat["max_deviation"] == 0.0);

  CHECK(run_cli("patch --config " + cfg.string() + " --out " + out.string()) ==
        0);
  const auto summary =
      nlohmann::json::parse(slurp(out / "table_summary.json"));
  CHECK(summary["exceptional_count"] == 0);
  CHECK(summary["conflict_count"] == 0);
  CHECK(summary["entry_count"] == 100);  // 50 paths per member
}

TEST_CASE("price produces the estimate files and respects --out") {
  const fs::path cfg = write_config("price.ini", kBase);
  const fs::path out = kWork / "price_out";
  fs::remove_all(out);
  CHECK(run_cli("price --config " + cfg.string() + " --out " + out.string()) ==
        0);
  const auto g = nlohmann::json::parse(slurp(out / "gestimate.json"));
  CHECK(g.contains("sup_value"));
  CHECK(g.contains("argmax_id"));
  CHECK(fs::exists(out / "breakdown.csv"));
}

TEST_CASE("identical runs are byte-identical regardless of threads") {
  const fs::path cfg = write_config("det.ini", kBase);
  const fs::path o1 = kWork / "det1";
  const fs::path o2 = kWork / "det2";
  fs::remove_all(o1);
  fs::remove_all(o2);
  CHECK(run_cli("price --config " + cfg.string() + " --out " + o1.string() +
                " --threads 1") == 0);
  CHECK(run_cli("price --config " + cfg.string() + " --out " + o2.string() +
                " --threads 8") == 0);
  for (const char* name : {"gestimate.json", "breakdown.csv", "manifest.json"})
    CHECK(slurp(o1 / name) == slurp(o2 / name));
}

TEST_CASE("solver blow-ups exit with code 3") {
  std::string cfg_text = kBase;
  cfg_text.replace(cfg_text.find("builtin = gbm"), 13,
                   "builtin = gbm\nmu = 1e300");
  const fs::path cfg = write_config("blowup.ini", cfg_text);
  CHECK(run_cli("price --config " + cfg.string() + " --out " +
                (kWork / "blow_out").string()) == 3);
}

TEST_CASE("failing validation verdicts exit with code 1") {
  const std::string cfg_text =
      "[coefficients]\nbuiltin = sqrt_diffusion\nalpha = 0.4\n"
      "[run]\nmaster_seed = 3\n";
  const fs::path cfg = write_config("validate_fail.ini", cfg_text);
  const fs::path out = kWork / "validate_out";
  fs::remove_all(out);
  CHECK(run_cli("validate --config " + cfg.string() + " --out " +
                out.string()) == 1);
  const auto rep = nlohmann::json::parse(slurp(out / "regularity.json"));
  CHECK(rep["pass"] == false);
  CHECK(rep["class"] == "yamada_watanabe");
  CHECK(rep["sub_verdicts"]["integral_divergence"] == false);
}

TEST_CASE("integrate tabulates the refinement ladder") {
  const fs::path cfg = write_config("integrate.ini", kBase);
  const fs::path out = kWork / "integrate_out";
  fs::remove_all(out);
  CHECK(run_cli("integrate --config " + cfg.string() + " --out " +
                out.string()) == 0);
  const std::string csv = slurp(out / "convergence.csv");
  CHECK(csv.rfind("path_index,n,epsilon,cauchy_gap,error_bound\n", 0) == 0);
  const auto summary =
      nlohmann::json::parse(slurp(out / "integrate_summary.json"));
  CHECK(summary["bound_violations"] == 0);
}

TEST_CASE("the shipped sample configs stay loadable") {
  const fs::path dir = GSDE_CONFIG_DIR;
  REQUIRE(fs::exists(dir));
  std::size_t seen = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".ini") continue;
    ++seen;
    const gsde::Config c = gsde::Config::parse_file(entry.path().string());
    CHECK_NOTHROW(gsde::load_run_config(c));
  }
  CHECK(seen >= 3);
}
