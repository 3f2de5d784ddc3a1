#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>

#include "drlab/entanglement.hpp"
#include "drlab/error.hpp"
#include "drlab/tomography.hpp"
#include "drlab/util.hpp"

namespace fs = std::filesystem;

namespace drlab::cli {

namespace {

// 1-based line of byte offset pos.
int line_of(const std::string& text, std::size_t pos) {
  pos = std::min(pos, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
}

// Line of a key path such as {"tomo", "shots"}: each key is searched after the previous one.
int locate(const std::string& text, const std::vector<std::string>& path) {
  std::size_t pos = 0;
  for (const auto& key : path) {
    const auto hit = text.find('"' + key + '"', pos);
    if (hit == std::string::npos) return line_of(text, pos);
    pos = hit;
  }
  return line_of(text, pos);
}

class ConfigReader {
 public:
  ConfigReader(const std::string& text, const std::string& origin) : text_(text), origin_(origin) {}

  [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& what) const {
    std::string dotted;
    for (const auto& k : path) dotted += (dotted.empty() ? "" : ".") + k;
    throw FormatError(origin_ + ":" + std::to_string(locate(text_, path)) + ": " + dotted + ": " +
                      what);
  }

  template <class T>
  void read(const json& j, const std::vector<std::string>& path, T& dst) const {
    try {
      dst = j.get<T>();
    } catch (const json::exception&) {
      fail(path, "wrong type (" + std::string(j.type_name()) + ")");
    }
  }

  // Every key of obj must be listed.
  void only(const json& obj, const std::vector<std::string>& prefix,
            const std::vector<std::string>& allowed) const {
    if (!obj.is_object()) fail(prefix, "expected an object");
    for (const auto& [k, v] : obj.items()) {
      (void)v;
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
        auto p = prefix;
        p.push_back(k);
        fail(p, "unknown key");
      }
    }
  }

 private:
  const std::string& text_;
  const std::string& origin_;
};

void check_choice(const ConfigReader& r, const std::vector<std::string>& path,
                  const std::string& v, const std::vector<std::string>& choices) {
  if (std::find(choices.begin(), choices.end(), v) != choices.end()) return;
  std::string list;
  for (const auto& c : choices) list += (list.empty() ? "" : " | ") + c;
  r.fail(path, "'" + v + "' is not one of " + list);
}

// ---- output helpers ----

std::string num(double x) {
  if (!std::isfinite(x)) return "nan";
  if (x == 0.0) x = 0.0;  // no "-0"
  std::ostringstream s;
  s << std::setprecision(12) << x;
  return s.str();
}

class Outputs {
 public:
  Outputs(const RunConfig& cfg, CommandResult& res) : root_(cfg.out), res_(res) {
    fs::create_directories(root_);
  }
  std::string path(const std::string& rel) {
    const auto p = root_ / rel;
    fs::create_directories(p.parent_path());
    res_.outputs.push_back(rel);
    return p.string();
  }
  void text(const std::string& rel, const std::string& body) {
    std::ofstream f(path(rel));
    if (!f) throw FormatError("cannot write " + rel);
    f << body;
  }
  void json_file(const std::string& rel, const json& j) { write_json(path(rel), j); }

 private:
  fs::path root_;
  CommandResult& res_;
};

void check(CommandResult& res, std::string name, bool pass, std::string detail = {}) {
  res.checks.push_back({std::move(name), pass, std::move(detail)});
}

void check_state(CommandResult& res, const std::string& name, const MultimodeState& s) {
  try {
    s.validate();
    check(res, name + " is a density operator", true);
  } catch (const Error& e) {
    check(res, name + " is a density operator", false, e.what());
  }
}

void check_channel(CommandResult& res, const std::string& name, const EmissionChannel& ch) {
  check(res, name + " completely positive", ch.min_choi_eigenvalue() >= -1e-9,
        "min Choi eigenvalue " + num(ch.min_choi_eigenvalue()));
  check(res, name + " trace preserving", ch.tp_deficit() <= ch.tp_tolerance(),
        "deficit " + num(ch.tp_deficit()));
}

// ---- channel source ----

struct Channels {
  EmissionChannel dual;
  std::optional<EmissionChannel> single;
  json source;
};

Channels resolve_channels(const RunConfig& cfg, Outputs& out) {
  Channels c;
  if (cfg.channel == "ideal") {
    c.dual = ideal_emission_channel();
    c.single = ideal_single_rail_channel();
    c.source = {{"source", "ideal"}};
  } else if (cfg.channel == "explicit") {
    cfg.noise.validate();
    c.dual = noisy_emission_channel(cfg.noise);
    c.single = single_rail_channel(cfg.noise);
    c.source = {{"source", "explicit"}, {"noise", noise_to_json(cfg.noise)}};
  } else if (cfg.channel == "fit") {
    const auto rep = calibrate_noise(CalibrationTargets::measured());
    c.dual = noisy_emission_channel(rep.params);
    c.single = single_rail_channel(rep.params);
    out.json_file("calibration.json", calibration_to_json(rep));
    c.source = {{"source", "fit"}, {"noise", noise_to_json(rep.params)}};
  } else {
    // A channel JSON, or {"dual_rail": ..., "single_rail": ...}.
    if (cfg.channel_path.empty()) throw DomainError("channel source 'file' needs a path");
    const auto j = read_json(cfg.channel_path);
    if (j.contains("dual_rail")) {
      c.dual = channel_from_json(j.at("dual_rail"));
      if (j.contains("single_rail")) c.single = channel_from_json(j.at("single_rail"));
    } else {
      c.dual = channel_from_json(j);
    }
    if (c.dual.encoding() != Encoding::dual_rail)
      throw DomainError(cfg.channel_path + ": dual-rail channel expected");
    c.source = {{"source", "file"}, {"path", cfg.channel_path}};
  }
  c.source["process_fidelity"] = process_fidelity(c.dual);
  return c;
}

const EmissionChannel& need_single(const Channels& c) {
  if (!c.single) throw DomainError("this command needs a single-rail channel");
  return *c.single;
}

std::string curve_csv(const std::vector<std::pair<std::string, const ScalingCurve*>>& cols) {
  std::ostringstream s;
  s << "n";
  for (const auto& [name, c] : cols) s << ',' << name << ',' << name << "_extrapolated";
  s << '\n';
  const auto rows = cols.front().second->rows.size();
  for (std::size_t k = 0; k < rows; ++k) {
    s << cols.front().second->rows[k].n;
    for (const auto& [name, c] : cols)
      s << ',' << num(c->rows[k].fidelity) << ',' << (c->rows[k].extrapolated ? 1 : 0);
    s << '\n';
  }
  return s.str();
}

json curve_json(const ScalingCurve& c) {
  return {{"crossing", c.crossing},
          {"fit_slope", c.fit_slope},
          {"fit_intercept", c.fit_intercept},
          {"fit_r2", c.fit_r2}};
}

void check_curve(CommandResult& res, const std::string& name, const ScalingCurve& c) {
  bool ok = true;
  for (const auto& r : c.rows) ok = ok && r.fidelity >= -1e-12 && r.fidelity <= 1 + 1e-9;
  check(res, name + " fidelities in [0,1]", ok);
}

const char* variant_name(LeVariant v) {
  switch (v) {
    case LeVariant::physical: return "physical";
    case LeVariant::logical: return "logical";
    case LeVariant::single_rail: return "single_rail";
  }
  return "?";
}

void le_rows(std::ostringstream& s, LeVariant v, const LeCurve& c) {
  for (const auto& p : c.points)
    s << variant_name(v) << ',' << p.distance << ',' << p.mode << ',' << num(p.value) << ','
      << num(p.stderr_) << '\n';
}

void check_branch_sum(CommandResult& res, const EmissionChannel& ch, LeVariant v, int i, int j) {
  const auto r = le_from_channel(ch, v, i, j);
  check(res, std::string("LE branch probabilities sum to 1 (") + variant_name(v) + ")",
        std::abs(r.probability_sum - 1.0) < 1e-9, "sum " + num(r.probability_sum));
}

MultimodeState tomo_target(const RunConfig& cfg, const Channels* ch) {
  if (cfg.tomo_state == "psi_plus") return make_ideal_cluster(cfg.n_logical, Branch::plus);
  return compose_chain(ch->dual, cfg.n_logical, Projection::x_plus);
}

}  // namespace

// ---- config ----

json RunConfig::to_json() const {
  return {{"command", command},
          {"preset", preset},
          {"device", device_path},
          {"seed", seed},
          {"out", out},
          {"channel", {{"source", channel}, {"noise", noise_to_json(noise)}, {"path", channel_path}}},
          {"generate", {{"n_max", n_max}, {"n_exact", n_exact}, {"state_n_max", state_n_max}}},
          {"tomo",
           {{"state", tomo_state},
            {"n_logical", n_logical},
            {"shots", shots},
            {"shots_file", shots_file},
            {"save_shots", save_shots},
            {"bootstrap", bootstrap}}},
          {"le", {{"threshold", threshold}, {"max_distance", max_distance}, {"matrix_n", matrix_n}}},
          {"compare", {{"n_max", compare_n_max}}},
          {"device_run", {{"draws", draws}}}};
}

void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(origin + ":" + std::to_string(line_of(text, e.byte > 0 ? e.byte - 1 : 0)) +
                      ": " + e.what());
  }
  const ConfigReader r(text, origin);
  r.only(j, {}, {"preset", "device", "seed", "out", "channel", "generate", "tomo", "le", "compare",
                 "device_run"});
  if (j.contains("preset")) r.read(j["preset"], {"preset"}, cfg.preset);
  if (j.contains("device")) r.read(j["device"], {"device"}, cfg.device_path);
  if (j.contains("seed")) r.read(j["seed"], {"seed"}, cfg.seed);
  if (j.contains("out")) r.read(j["out"], {"out"}, cfg.out);

  if (j.contains("channel")) {
    const auto& c = j["channel"];
    r.only(c, {"channel"}, {"source", "noise", "path"});
    if (c.contains("source")) {
      r.read(c["source"], {"channel", "source"}, cfg.channel);
      check_choice(r, {"channel", "source"}, cfg.channel, {"fit", "ideal", "explicit", "file"});
    }
    if (c.contains("path")) r.read(c["path"], {"channel", "path"}, cfg.channel_path);
    if (c.contains("noise")) {
      try {
        cfg.noise = noise_from_json(c["noise"]);
        cfg.noise.validate();
      } catch (const std::exception& e) {
        r.fail({"channel", "noise"}, e.what());
      }
    }
  }
  auto section = [&](const char* name, const std::vector<std::string>& keys, auto&& body) {
    if (!j.contains(name)) return;
    r.only(j[name], {name}, keys);
    body(j[name]);
  };
  auto positive = [&](const std::vector<std::string>& path, auto v) {
    if (v <= 0) r.fail(path, "must be positive");
  };
  section("generate", {"n_max", "n_exact", "state_n_max"}, [&](const json& s) {
    if (s.contains("n_max")) r.read(s["n_max"], {"generate", "n_max"}, cfg.n_max);
    if (s.contains("n_exact")) r.read(s["n_exact"], {"generate", "n_exact"}, cfg.n_exact);
    if (s.contains("state_n_max"))
      r.read(s["state_n_max"], {"generate", "state_n_max"}, cfg.state_n_max);
    positive({"generate", "n_max"}, cfg.n_max);
    if (cfg.n_exact < 1 || cfg.n_exact > 8) r.fail({"generate", "n_exact"}, "must be in 1..8");
    if (cfg.state_n_max < 0 || cfg.state_n_max > 5)
      r.fail({"generate", "state_n_max"}, "must be in 0..5");
  });
  section("tomo", {"state", "n_logical", "shots", "shots_file", "save_shots", "bootstrap"},
          [&](const json& s) {
            if (s.contains("state")) {
              r.read(s["state"], {"tomo", "state"}, cfg.tomo_state);
              check_choice(r, {"tomo", "state"}, cfg.tomo_state, {"psi_plus", "chain"});
            }
            if (s.contains("n_logical")) r.read(s["n_logical"], {"tomo", "n_logical"}, cfg.n_logical);
            if (s.contains("shots")) r.read(s["shots"], {"tomo", "shots"}, cfg.shots);
            if (s.contains("shots_file"))
              r.read(s["shots_file"], {"tomo", "shots_file"}, cfg.shots_file);
            if (s.contains("save_shots"))
              r.read(s["save_shots"], {"tomo", "save_shots"}, cfg.save_shots);
            if (s.contains("bootstrap")) r.read(s["bootstrap"], {"tomo", "bootstrap"}, cfg.bootstrap);
            if (cfg.n_logical < 1 || cfg.n_logical > 3)
              r.fail({"tomo", "n_logical"}, "must be in 1..3");
            positive({"tomo", "shots"}, cfg.shots);
            positive({"tomo", "bootstrap"}, cfg.bootstrap);
          });
  section("le", {"threshold", "max_distance", "matrix_n"}, [&](const json& s) {
    if (s.contains("threshold")) r.read(s["threshold"], {"le", "threshold"}, cfg.threshold);
    if (s.contains("max_distance"))
      r.read(s["max_distance"], {"le", "max_distance"}, cfg.max_distance);
    if (s.contains("matrix_n")) r.read(s["matrix_n"], {"le", "matrix_n"}, cfg.matrix_n);
    positive({"le", "threshold"}, cfg.threshold);
    positive({"le", "max_distance"}, cfg.max_distance);
    if (cfg.matrix_n < 2 || cfg.matrix_n > 5) r.fail({"le", "matrix_n"}, "must be in 2..5");
  });
  section("compare", {"n_max"}, [&](const json& s) {
    if (s.contains("n_max")) r.read(s["n_max"], {"compare", "n_max"}, cfg.compare_n_max);
    positive({"compare", "n_max"}, cfg.compare_n_max);
  });
  section("device_run", {"draws"}, [&](const json& s) {
    if (s.contains("draws")) r.read(s["draws"], {"device_run", "draws"}, cfg.draws);
    positive({"device_run", "draws"}, cfg.draws);
  });
}

bool CommandResult::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

// ---- commands ----

CommandResult cmd_generate(const RunConfig& cfg) {
  CommandResult res;
  Outputs out(cfg, res);
  const auto ch = resolve_channels(cfg, out);
  check_channel(res, "dual-rail channel", ch.dual);

  const auto raw = fidelity_scaling_curve(ch.dual, cfg.n_max, false, cfg.n_exact);
  const auto logical = fidelity_scaling_curve(ch.dual, cfg.n_max, true, cfg.n_exact);
  out.text("fidelity.csv", curve_csv({{"raw", &raw}, {"logical", &logical}}));
  check_curve(res, "raw", raw);
  check_curve(res, "logical", logical);

  for (int n = 1; n <= std::min(cfg.n_max, cfg.state_n_max); ++n) {
    const auto ideal = ideal_chain_state(Encoding::dual_rail, n, Projection::x_plus);
    const auto noisy = compose_chain(ch.dual, n, Projection::x_plus);
    out.json_file("states/ideal_n" + std::to_string(n) + ".json", state_to_json(ideal));
    out.json_file("states/noisy_n" + std::to_string(n) + ".json", state_to_json(noisy));
    check_state(res, "noisy chain n=" + std::to_string(n), noisy);
    const double dense = fidelity(noisy, ideal);
    const double contracted = raw.rows[static_cast<std::size_t>(n - 1)].fidelity;
    check(res, "dense and contracted fidelity agree n=" + std::to_string(n),
          std::abs(dense - contracted) < 1e-8, num(dense) + " vs " + num(contracted));
  }
  out.json_file("generate.json", {{"channel", ch.source},
                                  {"raw", curve_json(raw)},
                                  {"logical", curve_json(logical)}});
  return res;
}

CommandResult cmd_tomo(const RunConfig& cfg) {
  CommandResult res;
  Outputs out(cfg, res);
  std::optional<Channels> ch;
  if (cfg.tomo_state == "chain") ch = resolve_channels(cfg, out);
  const auto target = tomo_target(cfg, ch ? &*ch : nullptr);
  const int n_modes = 2 * cfg.n_logical;
  const auto cal = NoiseCalibration::device(n_modes);

  HeterodyneData data;
  if (!cfg.shots_file.empty()) {
    data = read_heterodyne(cfg.shots_file);
  } else {
    if (cfg.shots <= 0) throw DomainError("shot count must be positive");
    data = synthesize_shots(target, cal, cfg.shots, derive_seed(cfg.seed, 1));
    if (cfg.save_shots) write_heterodyne(out.path("shots.drshot"), data);
  }
  data.validate();
  if (data.signal.shot_count() == 0) throw DomainError("shot record is empty");
  if (data.signal.n_modes != n_modes)
    throw DomainError("shot record has " + std::to_string(data.signal.n_modes) +
                      " modes, config expects " + std::to_string(n_modes));

  MomentOptions mo;
  mo.n_bootstrap = cfg.bootstrap;
  mo.seed = derive_seed(cfg.seed, 2);
  std::vector<int> all(static_cast<std::size_t>(n_modes));
  std::iota(all.begin(), all.end(), 0);
  const auto table = estimate_moments(data, all, mo);
  out.json_file("moments.json", moments_to_json(table));
  const auto mle = mle_reconstruct(table);
  out.json_file("state.json", state_to_json(mle.state));
  check_state(res, "reconstructed state", mle.state);
  for (const auto& w : table.warnings) res.warnings.push_back(w);
  for (const auto& w : mle.warnings) res.warnings.push_back(w);

  const auto samples = sampling_requirement(cal.n0, std::vector<int>(static_cast<std::size_t>(n_modes), 2));
  json report = {{"shots", data.signal.shot_count()},
                 {"target", cfg.tomo_state},
                 {"fidelity", fidelity(mle.state, target)},
                 {"mle_iterations", mle.iterations},
                 {"mle_converged", mle.converged},
                 {"sampling_requirement", samples}};
  if (cfg.n_logical >= 3) {
    std::vector<MomentTable> windows;
    for (int s = 0; s + 5 <= n_modes; ++s)
      windows.push_back(estimate_moments(data, {s, s + 1, s + 2, s + 3, s + 4}, mo));
    const auto mpo = mpo_reconstruct(windows, n_modes);
    out.json_file("state_mpo.json", state_to_json(mpo.state));
    check_state(res, "MPO state", mpo.state);
    report["mpo"] = {{"fidelity", fidelity(mpo.state, target)},
                     {"trace_distance_to_direct",
                      trace_distance(mpo.state.density(), mle.state.density())},
                     {"iterations", mpo.iterations},
                     {"converged", mpo.converged}};
  }
  out.json_file("report.json", report);
  return res;
}

CommandResult cmd_le(const RunConfig& cfg) {
  CommandResult res;
  Outputs out(cfg, res);
  const auto ch = resolve_channels(cfg, out);
  check_channel(res, "dual-rail channel", ch.dual);

  std::ostringstream curves;
  curves << "variant,distance,mode,value,stderr\n";
  json thresholds = {{"threshold", cfg.threshold}, {"channel", ch.source}};
  std::vector<std::pair<LeVariant, const EmissionChannel*>> runs = {
      {LeVariant::physical, &ch.dual}, {LeVariant::logical, &ch.dual}};
  if (ch.single) runs.push_back({LeVariant::single_rail, &*ch.single});
  for (const auto& [v, c] : runs) {
    const auto curve = le_distance_curve(*c, cfg.threshold, v, cfg.max_distance);
    le_rows(curves, v, curve);
    thresholds[variant_name(v)] = {{"length", curve.threshold_length},
                                   {"exceeds_range", curve.exceeds_range}};
    check_branch_sum(res, *c, v, 0, v == LeVariant::physical ? 3 : 1);
  }
  out.text("le_curves.csv", curves.str());
  out.json_file("thresholds.json", thresholds);

  const auto rho = compose_chain(ch.dual, cfg.matrix_n, Projection::x_plus);
  check_state(res, "chain n=" + std::to_string(cfg.matrix_n), rho);
  write_le_csv(out.path("le_matrix.csv"), le_matrix(rho));
  return res;
}

CommandResult cmd_compare(const RunConfig& cfg) {
  CommandResult res;
  Outputs out(cfg, res);
  const auto ch = resolve_channels(cfg, out);
  const auto& single = need_single(ch);
  check_channel(res, "dual-rail channel", ch.dual);
  check_channel(res, "single-rail channel", single);

  const int n_exact = std::min(8, cfg.compare_n_max);
  const auto raw = fidelity_scaling_curve(ch.dual, cfg.compare_n_max, false, n_exact);
  const auto logical = fidelity_scaling_curve(ch.dual, cfg.compare_n_max, true, n_exact);
  const auto sr = fidelity_scaling_curve(single, cfg.compare_n_max, false, n_exact);
  out.text("compare_fidelity.csv",
           curve_csv({{"dual_raw", &raw}, {"dual_logical", &logical}, {"single_rail", &sr}}));
  for (const auto* c : {&raw, &logical, &sr}) check_curve(res, "compare", *c);

  std::ostringstream curves;
  curves << "variant,distance,mode,value,stderr\n";
  const auto le_dual = le_distance_curve(ch.dual, cfg.threshold, LeVariant::logical, cfg.max_distance);
  const auto le_sr = le_distance_curve(single, cfg.threshold, LeVariant::single_rail, cfg.max_distance);
  le_rows(curves, LeVariant::logical, le_dual);
  le_rows(curves, LeVariant::single_rail, le_sr);
  out.text("compare_le.csv", curves.str());
  out.json_file("compare.json", {{"channel", ch.source},
                                 {"dual_raw_crossing", raw.crossing},
                                 {"dual_logical_crossing", logical.crossing},
                                 {"single_rail_crossing", sr.crossing},
                                 {"dual_logical_le_length", le_dual.threshold_length},
                                 {"single_rail_le_length", le_sr.threshold_length}});
  return res;
}

CommandResult cmd_device(const RunConfig& cfg) {
  CommandResult res;
  Outputs out(cfg, res);
  auto p = DeviceParams::preset(cfg.preset);
  if (!cfg.device_path.empty()) {
    std::ifstream f(cfg.device_path);
    if (!f) throw FormatError("cannot open " + cfg.device_path);
    std::stringstream ss;
    ss << f.rdbuf();
    p = device_from_json(ss.str());
  }
  out.text("device.json", device_to_json(p));

  // Shift against drive amplitude at the operating detuning of each sideband.
  std::ostringstream stark;
  stark << "transition,omega_MHz,delta_q_MHz,shift_MHz\n";
  const std::pair<Transition, const char*> ts[] = {{Transition::f0g1, "f0g1"},
                                                   {Transition::h0e1, "h0e1"}};
  for (const auto& [t, name] : ts) {
    const double om_max = t == Transition::f0g1 ? p.omega_f0g1 : p.omega_h0e1;
    const double dq = p.w_ge - (t == Transition::f0g1 ? p.wd_f0g1 : p.wd_h0e1);
    for (int k = 0; k <= 20; ++k) {
      const double om = om_max * k / 20.0;
      double shift = std::nan("");
      try {
        shift = stark_shift(t, om, dq, p.alpha());
      } catch (const PoleError& e) {
        res.warnings.push_back(std::string(name) + ": " + e.what());
      }
      stark << name << ',' << num(om) << ',' << num(dq) << ',' << num(shift) << '\n';
    }
  }
  out.text("stark.csv", stark.str());

  const auto sg = system_spectra(p, QubitLevel::g);
  const auto se = system_spectra(p, QubitLevel::e);
  sg.spectrum.write_csv(out.path("spectra_g.csv"));
  se.spectrum.write_csv(out.path("spectra_e.csv"));
  check(res, "spectra converged in truncation", sg.converged && se.converged,
        "shift " + num(std::max(sg.cutoff_shift, se.cutoff_shift)) + " MHz");

  const auto cl = coherence_limit(p, cfg.draws, derive_seed(cfg.seed, 3));
  bool in_range = true;
  for (double f : cl.fidelities) in_range = in_range && f >= 0.0 && f <= 1.0 + 1e-9;
  check(res, "coherence-limit fidelities in [0,1]", in_range);
  out.json_file("coherence.json", {{"draws", cfg.draws},
                                   {"fidelities", cl.fidelities},
                                   {"mean", cl.mean},
                                   {"sd", cl.sd},
                                   {"efficiency_f0g1", cl.eff_f0g1},
                                   {"efficiency_h0e1", cl.eff_h0e1},
                                   {"dressed_resonator_g", sg.resonator_feature},
                                   {"dressed_resonator_e", se.resonator_feature},
                                   {"two_chi", sg.resonator_feature - se.resonator_feature},
                                   {"bare_wq", sg.bare_wq},
                                   {"bare_alpha", sg.bare_alpha},
                                   {"bare_alpha_h", sg.bare_alpha_h}});
  return res;
}

int run(const RunConfig& cfg) {
  json manifest = {{"tool", "drlab"}, {"config", cfg.to_json()}};
  int status = 0;
  try {
    CommandResult res;
    if (cfg.command == "generate") res = cmd_generate(cfg);
    else if (cfg.command == "tomo") res = cmd_tomo(cfg);
    else if (cfg.command == "le") res = cmd_le(cfg);
    else if (cfg.command == "compare") res = cmd_compare(cfg);
    else if (cfg.command == "device") res = cmd_device(cfg);
    else throw DomainError("unknown command '" + cfg.command + "'");

    json checks = json::array();
    for (const auto& c : res.checks) {
      checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
      if (!c.pass) std::cerr << "invariant failed: " << c.name << " " << c.detail << '\n';
    }
    for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
    manifest["outputs"] = res.outputs;
    manifest["checks"] = checks;
    manifest["warnings"] = res.warnings;
    status = res.ok() ? 0 : 3;
    manifest["status"] = res.ok() ? "ok" : "invariant_failure";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    manifest["status"] = "error";
    manifest["error"] = e.what();
    status = 2;
  }
  try {
    fs::create_directories(cfg.out);
    write_json((fs::path(cfg.out) / "manifest.json").string(), manifest);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return status;
}

}  // namespace drlab::cli
