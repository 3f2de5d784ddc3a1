#include "drlab/json_io.hpp"

#include <fstream>

#include "drlab/error.hpp"

namespace drlab {

// Complex matrices are stored as nested row arrays {"re": [[...]], "im": [[...]]}.
json matrix_to_json(const CMat& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json rr = json::array(), ri = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ri.push_back(m(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return {{"re", re}, {"im", im}};
}

CMat matrix_from_json(const json& j) {
  try {
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    const auto rows = static_cast<Eigen::Index>(re.size());
    if (im.size() != re.size()) throw FormatError("matrix JSON: re/im row count differs");
    const auto cols = rows == 0 ? Eigen::Index(0) : static_cast<Eigen::Index>(re[0].size());
    CMat m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (static_cast<Eigen::Index>(re[r].size()) != cols || static_cast<Eigen::Index>(im[r].size()) != cols)
        throw FormatError("matrix JSON: ragged rows");
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = cplx(re[r][c].get<double>(), im[r][c].get<double>());
    }
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("matrix JSON: ") + e.what());
  }
}

json state_to_json(const MultimodeState& s) {
  json labels = json::array();
  for (const auto& l : s.labels()) labels.push_back(l.str());
  json j = {{"role", "state"}, {"dims", s.dims()}, {"labels", labels}};
  const json m = matrix_to_json(s.density());
  j["re"] = m["re"];
  j["im"] = m["im"];
  return j;
}

MultimodeState state_from_json(const json& j) {
  try {
    auto dims = j.at("dims").get<std::vector<int>>();
    std::vector<SubsystemLabel> labels;
    for (const auto& l : j.at("labels")) labels.push_back(SubsystemLabel::parse(l.get<std::string>()));
    MultimodeState s = MultimodeState::from_density(dims, labels, matrix_from_json(j));
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw FormatError(std::string("state JSON: ") + e.what());
  }
}

json channel_to_json(const EmissionChannel& ch) {
  json j = {{"role", "choi"},
            {"out_dims", ch.out_dims()},
            {"tp_deficit", ch.tp_deficit()},
            {"process_fidelity", process_fidelity(ch)}};
  const json m = matrix_to_json(ch.choi());
  j["re"] = m["re"];
  j["im"] = m["im"];
  return j;
}

EmissionChannel channel_from_json(const json& j) {
  try {
    if (j.value("role", "choi") != "choi") throw FormatError("channel JSON: role is not choi");
    EmissionChannel ch(matrix_from_json(j), j.at("out_dims").get<std::vector<int>>(), 1.0);
    ch.validate(false);
    return ch;
  } catch (const json::exception& e) {
    throw FormatError(std::string("channel JSON: ") + e.what());
  }
}

json noise_to_json(const NoiseParams& p) {
  return {{"loss_w1", p.loss_w1}, {"loss_w2", p.loss_w2}, {"dephase", p.dephase}, {"thermal", p.thermal}};
}

NoiseParams noise_from_json(const json& j) {
  NoiseParams p;
  p.loss_w1 = j.value("loss_w1", 0.0);
  p.loss_w2 = j.value("loss_w2", 0.0);
  p.dephase = j.value("dephase", 0.0);
  p.thermal = j.value("thermal", 0.0);
  p.validate();
  return p;
}

json calibration_to_json(const CalibrationReport& r) {
  json res = json::array();
  for (const auto& x : r.residuals)
    res.push_back({{"label", x.label}, {"target", x.target}, {"sigma", x.sigma}, {"model", x.model}, {"z", x.z()}});
  return {{"loss_w1", r.params.loss_w1},
          {"loss_w2", r.params.loss_w2},
          {"dephase", r.params.dephase},
          {"process_fidelity", r.process_fidelity},
          {"chi2", r.chi2},
          {"all_within_2sigma", r.all_within_2sigma()},
          {"residuals", res}};
}

json moments_to_json(const MomentTable& t) {
  json entries = json::array();
  for (const auto& [k, e] : t.entries)
    entries.push_back({{"key", k.str()}, {"re", e.value.real()}, {"im", e.value.imag()}, {"stddev", e.stddev}});
  return {{"window", t.window},
          {"max_exp", t.max_exp},
          {"max_total", t.max_total},
          {"with_qubit", t.with_qubit},
          {"conjugate_symmetry_violation", t.conjugate_symmetry_violation()},
          {"warnings", t.warnings},
          {"entries", entries}};
}

void write_json(const std::string& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw FormatError("cannot open " + path + " for writing");
  f << j.dump(2) << '\n';
}

json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw FormatError("cannot open " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
}

}  // namespace drlab
