#pragma once

#include <array>
#include <charconv>
#include <ostream>
#include <string>
#include <system_error>

#include <json.hpp>

#include "trapkohn/oracle/phase_field.hpp"
#include "trapkohn/response.hpp"

namespace trapkohn::io {

/// Shortest decimal string that round-trips to the same double; independent
/// of the C locale.
inline std::string format_double(double x) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (res.ec != std::errc{})
    throw std::runtime_error("double formatting failed");
  return {buf.data(), res.ptr};
}

/// CSV with header `omega,re_mu,im_mu,method` and a trailing `rel_diff`
/// column when requested. omega is written divided by `omega_unit`. Rows
/// without a rel_diff value leave the field empty.
inline void write_csv(std::ostream &os, const MobilitySpectrum &spec, bool with_rel_diff,
                      double omega_unit = 1.0) {
  os << "omega,re_mu,im_mu,method";
  if (with_rel_diff)
    os << ",rel_diff";
  os << '\n';
  for (const auto &s : spec.samples) {
    os << format_double(s.freq.omega / omega_unit) << ',' << format_double(s.value.real()) << ','
       << format_double(s.value.imag()) << ',' << to_string(s.method);
    if (with_rel_diff) {
      os << ',';
      if (s.rel_diff)
        os << format_double(*s.rel_diff);
    }
    os << '\n';
  }
}

inline nlohmann::ordered_json params_json(const ModelParams &p, const DerivedConstants &dc) {
  nlohmann::ordered_json j;
  j["vtilde_c"] = p.vtilde_c;
  j["omega_l"] = p.omega_l;
  j["l_fermi"] = p.l_fermi;
  j["hbar"] = p.hbar;
  j["k_lutt"] = dc.k_lutt;
  j["eps_tilde"] = dc.eps_tilde;
  return j;
}

inline nlohmann::ordered_json to_json(const MobilitySample &s, double omega_unit = 1.0,
                                      double length_unit = 1.0) {
  nlohmann::ordered_json j;
  j["z"] = s.z / length_unit;
  j["z0"] = s.z0 / length_unit;
  j["omega"] = s.freq.omega / omega_unit;
  j["eta"] = s.freq.eta / omega_unit;
  j["gamma"] = s.freq.gamma / omega_unit;
  j["re_mu"] = s.value.real();
  j["im_mu"] = s.value.imag();
  j["method"] = std::string(to_string(s.method));
  j["near_pole"] = s.near_pole;
  if (s.rel_diff)
    j["rel_diff"] = *s.rel_diff;
  return j;
}

/// `{"params": {...}, "samples": [...]}`; positions in units of L_F and
/// frequencies in units of omega_l.
inline nlohmann::ordered_json to_json(const MobilitySpectrum &spec) {
  nlohmann::ordered_json j;
  j["params"] = params_json(spec.params, spec.constants);
  auto arr = nlohmann::ordered_json::array();
  for (const auto &s : spec.samples)
    arr.push_back(to_json(s, spec.params.omega_l, spec.params.l_fermi));
  j["samples"] = std::move(arr);
  return j;
}

/// Trajectory CSV: `t` followed by phi at each probe node, one row per
/// snapshot. Probe columns are named `phi_<node index>`.
inline void write_trajectory_csv(std::ostream &os, const oracle::Trajectory &traj,
                                 const std::vector<std::size_t> &probe_nodes) {
  os << "t";
  for (auto i : probe_nodes)
    os << ",phi_" << i;
  os << '\n';
  for (const auto &f : traj.snapshots) {
    os << format_double(f.time);
    for (auto i : probe_nodes) {
      if (i >= f.phi.size())
        throw DomainError("probe node " + std::to_string(i) + " outside the grid");
      os << ',' << format_double(f.phi[i]);
    }
    os << '\n';
  }
}

} // namespace trapkohn::io
