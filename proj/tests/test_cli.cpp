#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("drlab_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct Run {
  int status = -1;
  std::string err;
};

// Runs the CLI with stderr captured in dir/stderr.txt.
Run drlab(const std::string& args, const fs::path& dir) {
  const auto err = dir / "stderr.txt";
  const std::string cmd =
      std::string(DRLAB_CLI_PATH) + " " + args + " > /dev/null 2> " + err.string();
  const int raw = std::system(cmd.c_str());
  Run r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream f(err);
  std::stringstream ss;
  ss << f.rdbuf();
  r.err = ss.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

std::vector<std::vector<std::string>> csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream f(p);
  std::string line;
  while (std::getline(f, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

void write(const fs::path& p, const std::string& body) { std::ofstream(p) << body; }

}  // namespace

TEST(Cli, IdealGenerateGivesAllOnes) {
  const auto d = scratch("ideal");
  const auto r = drlab("--out " + (d / "out").string() + " --channel ideal generate --n-max 10", d);
  ASSERT_EQ(r.status, 0) << r.err;
  const auto rows = csv(d / "out" / "fidelity.csv");
  ASSERT_EQ(rows.size(), 11u);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    EXPECT_NEAR(std::stod(rows[k][1]), 1.0, 1e-9) << k;
    EXPECT_NEAR(std::stod(rows[k][3]), 1.0, 1e-9) << k;
    EXPECT_EQ(rows[k][2], k > 8 ? "1" : "0");  // extrapolated rows flagged
  }
  const auto m = load(d / "out" / "manifest.json");
  EXPECT_EQ(m["status"], "ok");
  EXPECT_EQ(m["config"]["channel"]["source"], "ideal");
  EXPECT_TRUE(fs::exists(d / "out" / "states" / "noisy_n4.json"));
}

TEST(Cli, CalibratedGenerateWritesFitAndChecks) {
  const auto d = scratch("fit");
  const auto r = drlab("--out " + (d / "out").string() + " generate", d);
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(fs::exists(d / "out" / "calibration.json"));
  const auto m = load(d / "out" / "manifest.json");
  ASSERT_FALSE(m["checks"].empty());
  for (const auto& c : m["checks"]) EXPECT_TRUE(c["pass"].get<bool>()) << c["name"];
  const auto rows = csv(d / "out" / "fidelity.csv");
  EXPECT_GT(std::stod(rows[4][1]), 0.5);
  EXPECT_LT(std::stod(rows[4][1]), 0.7);
}

TEST(Cli, RerunIsByteIdentical) {
  const auto d = scratch("rerun");
  const auto out = d / "out";
  const std::string args = "--seed 42 --out " + out.string() + " tomo --shots 20000";
  ASSERT_EQ(drlab(args, d).status, 0);
  std::map<std::string, std::string> first;
  for (const auto& e : fs::recursive_directory_iterator(out))
    if (e.is_regular_file()) first[e.path().string()] = slurp(e.path());
  fs::remove_all(out);
  ASSERT_EQ(drlab(args, d).status, 0);
  ASSERT_FALSE(first.empty());
  for (const auto& [p, body] : first) EXPECT_EQ(slurp(p), body) << p;

  // A different seed changes the data.
  const auto other = d / "other";
  ASSERT_EQ(drlab("--seed 43 --out " + other.string() + " tomo --shots 20000", d).status, 0);
  EXPECT_NE(slurp(other / "moments.json"), slurp(out / "moments.json"));
}

TEST(Cli, FlagsOverrideConfigOverridesDefaults) {
  const auto d = scratch("precedence");
  write(d / "cfg.json", R"({
  "seed": 5,
  "out": ")" + (d / "from_config").string() + R"(",
  "generate": {"n_max": 3}
})");
  auto r = drlab("--config " + (d / "cfg.json").string() + " --seed 9 --channel ideal generate", d);
  ASSERT_EQ(r.status, 0) << r.err;
  const auto m = load(d / "from_config" / "manifest.json");
  EXPECT_EQ(m["config"]["seed"], 9);                     // flag wins
  EXPECT_EQ(m["config"]["generate"]["n_max"], 3);        // config wins over default
  EXPECT_EQ(m["config"]["generate"]["n_exact"], 8);      // default
  EXPECT_EQ(csv(d / "from_config" / "fidelity.csv").size(), 4u);

  r = drlab("--config " + (d / "cfg.json").string() + " --out " + (d / "flag").string() +
                " --channel ideal generate --n-max 2",
            d);
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(load(d / "flag" / "manifest.json")["config"]["generate"]["n_max"], 2);
}

TEST(Cli, ConfigErrorsNameTheLine) {
  const auto d = scratch("badcfg");
  write(d / "unknown.json", "{\n  \"seed\": 1,\n  \"tomo\": {\n    \"shotz\": 10\n  }\n}\n");
  auto r = drlab("--config " + (d / "unknown.json").string() + " generate", d);
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("unknown.json:4:"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("tomo.shotz"), std::string::npos) << r.err;

  write(d / "type.json", "{\n  \"le\": {\n    \"threshold\": \"high\"\n  }\n}\n");
  r = drlab("--config " + (d / "type.json").string() + " le", d);
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("type.json:3:"), std::string::npos) << r.err;

  write(d / "syntax.json", "{\n  \"seed\": 1,\n  \"out\" \"x\"\n}\n");
  r = drlab("--config " + (d / "syntax.json").string() + " le", d);
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("syntax.json:3:"), std::string::npos) << r.err;

  write(d / "range.json", "{\n  \"tomo\": {\"shots\": 0}\n}\n");
  r = drlab("--config " + (d / "range.json").string() + " tomo", d);
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("range.json:2:"), std::string::npos) << r.err;
}

TEST(Cli, ZeroShotsIsAnError) {
  const auto d = scratch("zero");
  const auto r = drlab("--out " + (d / "out").string() + " tomo --shots 0", d);
  EXPECT_EQ(r.status, 2);
  EXPECT_EQ(load(d / "out" / "manifest.json")["status"], "error");
}

TEST(Cli, ShotFileRoundTripAndMissingVacuum) {
  const auto d = scratch("shots");
  const auto a = d / "a";
  ASSERT_EQ(drlab("--out " + a.string() + " tomo --shots 20000 --save-shots", d).status, 0);
  const auto rec = a / "shots.drshot";
  ASSERT_TRUE(fs::exists(rec));
  const auto b = d / "b";
  ASSERT_EQ(drlab("--out " + b.string() + " tomo --shots-file " + rec.string(), d).status, 0);
  EXPECT_EQ(slurp(a / "moments.json"), slurp(b / "moments.json"));

  fs::remove(rec.string() + ".vac");
  EXPECT_EQ(drlab("--out " + (d / "c").string() + " tomo --shots-file " + rec.string(), d).status, 2);
}

TEST(Cli, IdealLocalizableEntanglementIsOneHalf) {
  const auto d = scratch("le");
  const auto r = drlab("--out " + (d / "out").string() + " --channel ideal le --max-distance 5", d);
  ASSERT_EQ(r.status, 0) << r.err;
  const auto rows = csv(d / "out" / "le_curves.csv");
  ASSERT_GT(rows.size(), 14u);
  for (std::size_t k = 1; k < rows.size(); ++k) EXPECT_NEAR(std::stod(rows[k][3]), 0.5, 1e-9);
  const auto t = load(d / "out" / "thresholds.json");
  EXPECT_TRUE(t["logical"]["exceeds_range"].get<bool>());
}

TEST(Cli, IdenticalChannelsGiveIdenticalCurves) {
  const auto d = scratch("compare");
  const auto r = drlab("--out " + (d / "out").string() + " --channel ideal compare --max-distance 5", d);
  ASSERT_EQ(r.status, 0) << r.err;
  const auto rows = csv(d / "out" / "compare_fidelity.csv");
  for (std::size_t k = 1; k < rows.size(); ++k) {
    EXPECT_EQ(rows[k][1], rows[k][3]);
    EXPECT_EQ(rows[k][3], rows[k][5]);
  }
}

TEST(Cli, DeviceStarkZeroAtZeroDrive) {
  const auto d = scratch("device");
  const auto r = drlab("--out " + (d / "out").string() + " device --draws 2", d);
  ASSERT_EQ(r.status, 0) << r.err;
  int zero_rows = 0;
  for (const auto& row : csv(d / "out" / "stark.csv"))
    if (row[1] == "0") {
      EXPECT_EQ(row[3], "0");
      ++zero_rows;
    }
  EXPECT_EQ(zero_rows, 2);
  const auto c = load(d / "out" / "coherence.json");
  EXPECT_EQ(c["fidelities"].size(), 2u);
  EXPECT_TRUE(fs::exists(d / "out" / "spectra_g.csv"));
}
