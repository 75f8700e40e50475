#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "imreg/cli.hpp"
#include "imreg/csv.hpp"

using namespace imreg;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "imreg");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "imreg_cli_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string scenario(const std::string& name) {
  return std::string(IMREG_SCENARIO_DIR) + "/" + name + ".scn";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) rows.push_back(csv::split(line));
  return rows;
}

double field(const std::string& text, const std::string& key) {
  const auto at = text.find(key + "=");
  REQUIRE(at != std::string::npos);
  return std::stod(text.substr(at + key.size() + 1));
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
  std::ofstream(dir / name) << text;
  return dir / name;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate writes three files and a summary") {
  const auto dir = scratch("simulate");
  const auto r = invoke({"simulate", "--scenario", scenario("tuned_no1"), "--out", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(field(r.out, "sup") == doctest::Approx(0.0917).epsilon(0.10));
  CHECK(field(r.out, "L2") == doctest::Approx(0.0549).epsilon(0.10));
  for (const char* suffix : {"_trajectory.csv", "_norms.csv", "_spectrum.csv"}) {
    CHECK(fs::exists(dir / (std::string("tuned_no1") + suffix)));
  }
  const auto norms = read_csv(dir / "tuned_no1_norms.csv");
  REQUIRE(norms.size() == 2);
  CHECK(norms[0] == std::vector<std::string>{"scenario", "sigma", "mu", "n_o", "omega_hat",
                                             "sup", "inf_l2", "noisy"});
  CHECK(norms[1][3] == "1");
  const auto spec = read_csv(dir / "tuned_no1_spectrum.csv");
  CHECK(spec.size() == 12);
}

TEST_CASE("simulate rejects a run shorter than the steady window") {
  const auto dir = scratch("short");
  const auto r = invoke({"simulate", "--scenario", scenario("tuned_no1"), "--t-end", "15",
                         "--out", dir.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("trajectory too short") != std::string::npos);
}

TEST_CASE("noisy simulate is byte-identical across runs") {
  const auto a = scratch("noisy_a"), b = scratch("noisy_b");
  for (const auto& d : {a, b}) {
    const auto r = invoke({"simulate", "--scenario", scenario("noisy_no2"), "--t-end", "40",
                           "--seed", "5", "--out", d.string()});
    REQUIRE(r.code == 0);
  }
  for (const char* f : {"noisy_no2_trajectory.csv", "noisy_no2_norms.csv", "noisy_no2_spectrum.csv"}) {
    CHECK(slurp(a / f) == slurp(b / f));
    CHECK_FALSE(slurp(a / f).empty());
  }
}

TEST_CASE("overflow maps to exit 3") {
  const auto dir = scratch("overflow");
  const auto f = write_file(dir, "blowup.scn",
                            "name=blowup\ncontroller=high_gain\nregulator.sigma=1\n"
                            "sim.x0=0,60\nsim.e0=0\nsim.t_end=20\n");
  const auto r = invoke({"simulate", "--scenario", f.string(), "--out", dir.string()});
  CHECK(r.code == 3);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("parse errors map to exit 2") {
  const auto dir = scratch("parse");
  const auto f = write_file(dir, "bad.scn", "name=bad\nregulator.sigma=two\n");
  CHECK(invoke({"simulate", "--scenario", f.string()}).code == 2);
  CHECK(invoke({"simulate"}).code == 2);
  CHECK(invoke({"nonsense"}).code == 2);
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"--help"}).code == 0);
  CHECK(invoke({"reproduce", "--table", "3"}).code == 2);
}

TEST_CASE("sigma sweep keeps the given order") {
  const auto dir = scratch("sweep_sigma");
  const auto r = invoke({"sweep", "--scenario", scenario("high_gain"), "--axis", "sigma",
                         "--values", "40,2,10,5,20", "--workers", "3", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto rows = read_csv(dir / "high_gain_sweep_sigma.csv");
  REQUIRE(rows.size() == 6);
  const char* order[] = {"40", "2", "10", "5", "20"};
  const double sup_ref[] = {0.1181, 1.2555, 0.400, 0.6577, 0.2248};
  for (int i = 0; i < 5; ++i) {
    CHECK(rows[i + 1][1] == order[i]);
    CHECK(std::stod(rows[i + 1][5]) == doctest::Approx(sup_ref[i]).epsilon(0.05));
  }
  // Serial and parallel sweeps agree byte for byte.
  const auto serial = scratch("sweep_sigma_serial");
  invoke({"sweep", "--scenario", scenario("high_gain"), "--axis", "sigma", "--values",
          "40,2,10,5,20", "--workers", "1", "--out", serial.string()});
  CHECK(slurp(serial / "high_gain_sweep_sigma.csv") == slurp(dir / "high_gain_sweep_sigma.csv"));
}

TEST_CASE("oscillator sweep gives decreasing L2") {
  const auto dir = scratch("sweep_no");
  const auto r = invoke({"sweep", "--scenario", scenario("tuned_no1"), "--axis", "n_o",
                         "--values", "0,1,2,3,4", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto rows = read_csv(dir / "tuned_no1_sweep_n_o.csv");
  REQUIRE(rows.size() == 6);
  for (int i = 2; i <= 5; ++i) CHECK(std::stod(rows[i][6]) < std::stod(rows[i - 1][6]));
}

TEST_CASE("bad sweeps") {
  CHECK(invoke({"sweep", "--scenario", scenario("tuned_no1"), "--axis", "n_o", "--values", ""}).code == 2);
  CHECK(invoke({"sweep", "--scenario", scenario("tuned_no1"), "--axis", "mu", "--values", "1"}).code == 2);
  CHECK(invoke({"sweep", "--scenario", scenario("tuned_no1"), "--axis", "n_o", "--values", "1.5"}).code == 2);
}

TEST_CASE("bode files and notches") {
  const auto dir = scratch("bode");
  const auto r = invoke({"bode", "--out", dir.string()});
  REQUIRE(r.code == 0);
  for (const char* f : {"bode_high_gain.csv", "bode_internal_model.csv"}) {
    const auto rows = read_csv(dir / f);
    REQUIRE(rows.size() == 2001);
    CHECK(rows[0] == std::vector<std::string>{"omega_rad_s", "magnitude", "magnitude_db"});
    CHECK(std::stod(rows[1][0]) == doctest::Approx(0.1));
    CHECK(std::stod(rows[2000][0]) == doctest::Approx(1000.0));
    for (std::size_t i = 2; i < rows.size(); ++i) CHECK(std::stod(rows[i][0]) > std::stod(rows[i - 1][0]));
  }
  std::size_t notches = 0;
  for (std::size_t p = r.out.find("depth="); p != std::string::npos; p = r.out.find("depth=", p + 1)) {
    CHECK(std::stod(r.out.substr(p + 6)) >= 60.0);
    ++notches;
  }
  CHECK(notches == 11);

  const auto r0 = invoke({"bode", "--n-o", "0", "--out", dir.string()});
  REQUIRE(r0.code == 0);
  CHECK(r0.out.find("l=0 ") != std::string::npos);
  CHECK(r0.out.find("l=1 ") == std::string::npos);
}

TEST_CASE("verify exit codes") {
  const auto ok = invoke({"verify"});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("certified") != std::string::npos);
  CHECK(invoke({"verify", "--mu", "0"}).code == 1);
  const auto bad = invoke({"verify", "--n-o", "2", "--coefficients", "2,0.5,0.8"});
  CHECK(bad.code == 1);
  CHECK(bad.out.find("strict_decrease") != std::string::npos);
  const auto dir = scratch("verify");
  CHECK(invoke({"verify", "--out", dir.string()}).code == 0);
  CHECK(fs::exists(dir / "certification.csv"));
}

TEST_CASE("analyze an exported trajectory") {
  const auto dir = scratch("analyze");
  REQUIRE(invoke({"simulate", "--scenario", scenario("tuned_no1"), "--out", dir.string()}).code == 0);
  const auto sim_norms = read_csv(dir / "tuned_no1_norms.csv");
  const auto r = invoke({"analyze", "--trajectory", (dir / "tuned_no1_trajectory.csv").string(),
                         "--out", (dir / "re").string()});
  REQUIRE(r.code == 0);
  const auto again = read_csv(dir / "re" / "tuned_no1_trajectory_norms.csv");
  CHECK(std::stod(again[1][5]) == doctest::Approx(std::stod(sim_norms[1][5])).epsilon(1e-12));
  CHECK(std::stod(again[1][6]) == doctest::Approx(std::stod(sim_norms[1][6])).epsilon(1e-12));
}

TEST_CASE("reproduce --table 1 reports ten ok lines") {
  const auto dir = scratch("repro1");
  const auto r = invoke({"reproduce", "--table", "1", "--out", dir.string()});
  CHECK(r.code == 0);
  std::size_t ok = 0;
  for (std::size_t p = r.out.find(" ok\n"); p != std::string::npos; p = r.out.find(" ok\n", p + 1)) ++ok;
  CHECK(ok == 10);
}

TEST_CASE("reproduce spectrum data") {
  const auto dir = scratch("fft");
  const auto r = invoke({"reproduce", "--table", "fft", "--out", dir.string()});
  REQUIRE(r.code == 0);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().filename().string().rfind("fft_", 0) == 0) {
      ++files;
      const auto rows = read_csv(e.path());
      CHECK(rows[0] == std::vector<std::string>{"freq_rad_s", "cos", "sin", "magnitude"});
      CHECK(rows.size() > 100);
    }
  }
  CHECK(files == 12);
}

}  // TEST_SUITE
