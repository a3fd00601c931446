#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "dwlab/config.hpp"
#include "dwlab/decay.hpp"
#include "dwlab/energetics.hpp"
#include "dwlab/inequalities.hpp"

namespace dwlab {

using json = nlohmann::json;

// Shortest round-trip decimal form of v.
std::string format_double(double v);

// Writes text to path via a temp file + rename; no partial file is ever
// visible at the final path.
void write_text_atomic(const std::string& path, const std::string& text);

// Time-series CSV with the pinned header
//   t,E,E_L,G,Etilde,D,l2_u,l2_udot,linf_u,diss,resid_eq29
// followed by E_L_mu{m},G_mu{m},D_mu{m},resid_eq54_mu{m} per tracked mu.
std::string ledger_csv(const Ledger& led);

// Two-column CSV of a fitted series: t,<quantity>.
std::string fit_csv(const DecayFit& fit);

json config_json(const ExperimentConfig& c);
json hypotheses_json(const HypothesisReport& h);
json ledger_json(const Ledger& led);
json fits_json(const std::vector<DecayFit>& fits);
json inequality_json(const InequalityReport& rep);

// Fixed top-level report schema: config, hypotheses, ledger, fits,
// constants, meta.  Absent sections appear as null (objects) or [] (fits).
json assemble_report(const ExperimentConfig& c, const HypothesisReport* hyp,
                     const Ledger* led, const std::vector<DecayFit>* fits,
                     const json& constants, const json& meta);

// Deterministic dump (sorted keys, 2-space indent, trailing newline).
std::string dump_json(const json& j);
json parse_json(const std::string& text);

}  // namespace dwlab
