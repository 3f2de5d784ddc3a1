#include <cmath>

#include "drlab/error.hpp"
#include "drlab/json_io.hpp"
#include "drlab/physics.hpp"

namespace drlab {

void DeviceParams::validate() const {
  for (double f : {w_ge, w_ef, w_fh, w_r_dressed_g, w_r, w_f, w1, w2, kappa_f, kappa, wd_f0g1, wd_h0e1})
    if (!(f > 0.0)) throw DomainError("device frequencies and linewidths must be positive");
  if (!(alpha() < 0.0)) throw DomainError("transmon anharmonicity must be negative (w_ef < w_ge)");
  for (const auto* u : {&T1_ge, &T2_ge, &T2e_ge, &T1_ef, &T2_ef, &T1_fh, &T2_fh}) {
    if (!(u->mean > 0.0)) throw DomainError("decoherence times must be positive");
    if (u->sd < 0.0) throw DomainError("decoherence stddevs must be non-negative");
  }
  if (!(gamma_f0g1 > 0.0) || !(gamma_h0e1 > 0.0)) throw DomainError("emission rates must be positive");
  if (n0_w1 < 0.0 || n0_w2 < 0.0) throw DomainError("noise photon numbers must be non-negative");
  for (double e : {eff_w1, eff_w2})
    if (!(e > 0.0 && e <= 1.0)) throw DomainError("efficiency must lie in (0, 1]");
}

DeviceParams DeviceParams::preset(const std::string& name) {
  if (name == "paper-device") return DeviceParams{};
  throw DomainError("unknown device preset '" + name + "'");
}

namespace {

json u_json(const Uncertain& u) { return {{"mean", u.mean}, {"sd", u.sd}}; }

void read(const json& j, const char* key, double& v) {
  if (j.contains(key)) v = j.at(key).get<double>();
}
void read(const json& j, const char* key, Uncertain& u) {
  if (!j.contains(key)) return;
  const auto& x = j.at(key);
  if (x.is_number()) {
    u.mean = x.get<double>();
    return;
  }
  read(x, "mean", u.mean);
  read(x, "sd", u.sd);
}

}  // namespace

// Field table shared by both directions.
#define DRLAB_DEVICE_FIELDS(X)                                                                   \
  X(w_ge) X(w_ef) X(w_fh) X(T1_ge) X(T2_ge) X(T2e_ge) X(T1_ef) X(T2_ef) X(T1_fh) X(T2_fh)        \
  X(w_r_dressed_g) X(two_chi) X(w_r) X(w_f) X(kappa_f) X(J) X(g) X(kappa) X(omega_f0g1)          \
  X(omega_h0e1) X(wd_f0g1) X(wd_h0e1) X(gamma_f0g1) X(gamma_h0e1) X(w1) X(w2) X(n0_w1) X(n0_w2) \
  X(eff_w1) X(eff_w2)

namespace {
json field(double v) { return v; }
json field(const Uncertain& u) { return u_json(u); }
}  // namespace

std::string device_to_json(const DeviceParams& p) {
  json j;
#define X(name) j[#name] = field(p.name);
  DRLAB_DEVICE_FIELDS(X)
#undef X
  return j.dump(2);
}

// Missing keys keep the preset values; unknown keys are rejected.
DeviceParams device_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("device JSON: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("device JSON must be an object");
  DeviceParams p;
  try {
    for (const auto& [k, v] : j.items()) {
      (void)v;
      bool known = false;
#define X(name) known = known || k == #name;
      DRLAB_DEVICE_FIELDS(X)
#undef X
      if (!known) throw FormatError("device JSON: unknown key '" + k + "'");
    }
#define X(name) read(j, #name, p.name);
    DRLAB_DEVICE_FIELDS(X)
#undef X
  } catch (const json::exception& e) {
    throw FormatError(std::string("device JSON: ") + e.what());
  }
  p.validate();
  return p;
}

DecoherenceDraw DecoherenceDraw::mean(const DeviceParams& p) {
  return {p.T1_ge.mean, p.T2_ge.mean, p.T1_ef.mean, p.T2_ef.mean, p.T1_fh.mean, p.T2_fh.mean};
}

}  // namespace drlab
