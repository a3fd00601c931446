#include "dwlab/report_io.hpp"

#include <array>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace dwlab {

std::string format_double(double v) {
  std::array<char, 40> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (res.ec != std::errc{})
    throw std::runtime_error("failed to format a double");
  return std::string(buf.data(), res.ptr);
}

void write_text_atomic(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string ledger_csv(const Ledger& led) {
  std::string out = "t,E,E_L,G,Etilde,D,l2_u,l2_udot,linf_u,diss,resid_eq29";
  for (int mu : led.mu_list) {
    const std::string m = std::to_string(mu);
    out += ",E_L_mu" + m + ",G_mu" + m + ",D_mu" + m + ",resid_eq54_mu" + m;
  }
  out += "\n";
  for (const LedgerRow& r : led.rows) {
    out += format_double(r.t);
    for (double v : {r.E, r.E_L, r.G, r.Etilde, r.D, r.l2_u, r.l2_udot,
                     r.linf_u, r.diss, r.resid_eq29})
      out += "," + format_double(v);
    for (double v : r.per_mu) out += "," + format_double(v);
    out += "\n";
  }
  return out;
}

std::string fit_csv(const DecayFit& fit) {
  std::string out = "t," + fit.quantity + "\n";
  for (std::size_t i = 0; i < fit.ts.size(); ++i)
    out += format_double(fit.ts[i]) + "," + format_double(fit.qs[i]) + "\n";
  return out;
}

json config_json(const ExperimentConfig& c) {
  return json{
      {"grid",
       {{"d", c.dim},
        {"n", c.n},
        {"X", c.half_width},
        {"stencil_order", c.stencil_order}}},
      {"model",
       {{"profile", c.profile},
        {"b0", c.b0},
        {"r0", c.r0},
        {"R", c.R},
        {"eps", c.eps},
        {"dir", {c.dir[0], c.dir[1], c.dir[2]}},
        {"tensor_seed", c.tensor_seed},
        {"tensor_strength", c.tensor_strength}}},
      {"run",
       {{"lambda", c.lambda},
        {"dt", c.dt},
        {"cfl_safety", c.cfl_safety},
        {"t_final", c.t_final},
        {"sample_every", c.sample_every},
        {"L", c.L},
        {"smallness_budget", c.smallness_budget},
        {"blowup_sup", c.blowup_sup}}},
      {"data",
       {{"u0_family", c.u0_family},
        {"u1_family", c.u1_family},
        {"u0_amplitude", c.u0_amplitude},
        {"u1_amplitude", c.u1_amplitude},
        {"seed", c.data_seed},
        {"radius", c.data_radius}}},
      {"suite",
       {{"mu_max", c.mu_max},
        {"samples", c.samples},
        {"checks", c.checks},
        {"window_t1", c.window_t1},
        {"window_t2", c.window_t2},
        {"slack", c.slack},
        {"c1", c.c1},
        {"fits", c.run_fits},
        {"ledger", c.run_ledger}}}};
}

json hypotheses_json(const HypothesisReport& h) {
  return json{{"dim", h.dim},
              {"p_grid", h.p_grid},
              {"f_lp", h.f_lp},
              {"weighted_l2", h.weighted_l2},
              {"weighted_l1", h.weighted_l1},
              {"mean", h.mean},
              {"odd_certificate", h.odd_certificate},
              {"H1", h.h1},
              {"H2", h.h2},
              {"H3", h.h3},
              {"best", hypothesis_name(h.best())},
              {"rescale_lambda", h.rescale_lambda},
              {"mean_rescaled", h.mean_rescaled},
              {"transfer_ok", h.transfer_ok}};
}

json ledger_json(const Ledger& led) {
  json entries = json::array();
  for (const LedgerEntry& e : led.entries)
    entries.push_back(json{{"tag", e.tag},
                           {"statement", e.statement},
                           {"measured", e.measured},
                           {"budget", e.budget},
                           {"plateau_growth", e.plateau_growth},
                           {"applicable", e.applicable},
                           {"pass", e.pass}});
  return json{{"params",
               {{"L", led.params.L},
                {"L0", led.params.L0},
                {"lambda", led.params.lambda},
                {"b0", led.params.b0},
                {"R", led.params.R},
                {"B_sup", led.params.B_sup},
                {"C1", led.params.C1},
                {"C0", led.params.C0},
                {"delta_sq", led.params.delta_sq}}},
              {"mu_list", led.mu_list},
              {"eps_num", led.eps_num},
              {"hypothesis_data", led.hypothesis_data},
              {"samples", led.rows.size()},
              {"w_energy_max",
               led.w_energy.empty()
                   ? 0.0
                   : *std::max_element(led.w_energy.begin(), led.w_energy.end())},
              {"m0_final", led.m0.empty() ? 0.0 : led.m0.back()},
              {"entries", entries},
              {"all_pass", led.all_pass()}};
}

json fits_json(const std::vector<DecayFit>& fits) {
  json out = json::array();
  for (const DecayFit& f : fits)
    out.push_back(json{{"quantity", f.quantity},
                       {"t1", f.t1},
                       {"t2", f.t2},
                       {"count", f.count},
                       {"slope", f.slope},
                       {"intercept", f.intercept},
                       {"residual_rms", f.residual_rms},
                       {"target", f.target},
                       {"slack", f.slack},
                       {"trivial", f.trivial},
                       {"pass", f.pass}});
  return out;
}

json inequality_json(const InequalityReport& rep) {
  return json{{"name", rep.name},
              {"samples", rep.samples},
              {"skipped", rep.skipped},
              {"ratios", rep.ratios},
              {"max_ratio", rep.max_ratio},
              {"max_ratio_fine", rep.max_ratio_fine},
              {"sweep_values", rep.sweep_values},
              {"sweep_max", rep.sweep_max},
              {"refinement_drift", rep.refinement_drift},
              {"constant", rep.constant},
              {"origin_deficit", rep.origin_deficit},
              {"pass", rep.pass},
              {"detail", rep.detail}};
}

json assemble_report(const ExperimentConfig& c, const HypothesisReport* hyp,
                     const Ledger* led, const std::vector<DecayFit>* fits,
                     const json& constants, const json& meta) {
  json doc;
  doc["config"] = config_json(c);
  doc["hypotheses"] = hyp ? hypotheses_json(*hyp) : json(nullptr);
  doc["ledger"] = led ? ledger_json(*led) : json(nullptr);
  doc["fits"] = fits ? fits_json(*fits) : json::array();
  doc["constants"] = constants.is_null() ? json::object() : constants;
  doc["meta"] = meta.is_null() ? json::object() : meta;
  return doc;
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

json parse_json(const std::string& text) { return json::parse(text); }

}  // namespace dwlab
