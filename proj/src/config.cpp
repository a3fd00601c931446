#include "dwlab/config.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dwlab/model.hpp"

namespace dwlab {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void bad_key(const std::string& qualified, const std::string& why) {
  throw std::invalid_argument("config: " + why + " '" + qualified + "'");
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (trim(v.substr(pos)).empty()) return x;
  } catch (const std::exception&) {
  }
  bad_key(key, "bad numeric value for");
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (trim(v.substr(pos)).empty()) return x;
  } catch (const std::exception&) {
  }
  bad_key(key, "bad integer value for");
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (trim(v.substr(pos)).empty()) return x;
  } catch (const std::exception&) {
  }
  bad_key(key, "bad unsigned value for");
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  bad_key(key, "bad boolean value for");
}

std::array<double, 3> parse_vec3(const std::string& key, const std::string& v) {
  std::istringstream in(v);
  std::array<double, 3> out{0, 0, 0};
  if (!(in >> out[0] >> out[1] >> out[2])) bad_key(key, "bad vector value for");
  std::string rest;
  if (in >> rest) bad_key(key, "bad vector value for");
  return out;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line, section;
  std::set<std::string> seen;
  int lineno = 0;

  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config: malformed section header at line " +
                                    std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      if (section != "grid" && section != "model" && section != "run" &&
          section != "data" && section != "suite")
        bad_key(section, "unknown section");
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: expected key = value at line " +
                                  std::to_string(lineno));
    if (section.empty())
      throw std::invalid_argument("config: key outside any section at line " +
                                  std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string q = section + "." + key;
    if (!seen.insert(q).second) bad_key(q, "duplicate key");

    if (section == "grid") {
      if (key == "d") c.dim = static_cast<int>(parse_int(q, value));
      else if (key == "n") c.n = static_cast<int>(parse_int(q, value));
      else if (key == "X") c.half_width = parse_double(q, value);
      else if (key == "stencil_order")
        c.stencil_order = static_cast<int>(parse_int(q, value));
      else bad_key(q, "unknown key");
    } else if (section == "model") {
      if (key == "profile") c.profile = value;
      else if (key == "b0") c.b0 = parse_double(q, value);
      else if (key == "r0") c.r0 = parse_double(q, value);
      else if (key == "R") c.R = parse_double(q, value);
      else if (key == "eps") c.eps = parse_double(q, value);
      else if (key == "dir") c.dir = parse_vec3(q, value);
      else if (key == "tensor_seed") c.tensor_seed = parse_u64(q, value);
      else if (key == "tensor_strength")
        c.tensor_strength = parse_double(q, value);
      else bad_key(q, "unknown key");
    } else if (section == "run") {
      if (key == "lambda") c.lambda = parse_double(q, value);
      else if (key == "dt") c.dt = parse_double(q, value);
      else if (key == "cfl_safety") c.cfl_safety = parse_double(q, value);
      else if (key == "t_final") c.t_final = parse_double(q, value);
      else if (key == "sample_every") c.sample_every = parse_int(q, value);
      else if (key == "L") c.L = static_cast<int>(parse_int(q, value));
      else if (key == "smallness_budget")
        c.smallness_budget = parse_double(q, value);
      else if (key == "blowup_sup") c.blowup_sup = parse_double(q, value);
      else bad_key(q, "unknown key");
    } else if (section == "data") {
      if (key == "u0_family") c.u0_family = value;
      else if (key == "u1_family") c.u1_family = value;
      else if (key == "u0_amplitude") c.u0_amplitude = parse_double(q, value);
      else if (key == "u1_amplitude") c.u1_amplitude = parse_double(q, value);
      else if (key == "seed") c.data_seed = parse_u64(q, value);
      else if (key == "radius") c.data_radius = parse_double(q, value);
      else bad_key(q, "unknown key");
    } else {  // suite
      if (key == "mu_max") c.mu_max = static_cast<int>(parse_int(q, value));
      else if (key == "samples") c.samples = static_cast<int>(parse_int(q, value));
      else if (key == "checks") c.checks = value;
      else if (key == "window_t1") c.window_t1 = parse_double(q, value);
      else if (key == "window_t2") c.window_t2 = parse_double(q, value);
      else if (key == "slack") c.slack = parse_double(q, value);
      else if (key == "c1") c.c1 = parse_double(q, value);
      else if (key == "fits") c.run_fits = parse_bool(q, value);
      else if (key == "ledger") c.run_ledger = parse_bool(q, value);
      else bad_key(q, "unknown key");
    }
  }

  for (const char* req : {"grid.d", "grid.n", "grid.X", "run.t_final"})
    if (!seen.contains(req)) bad_key(req, "missing required key");
  return c;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string config_text(const ExperimentConfig& c) {
  std::ostringstream out;
  out.precision(17);
  out << "[grid]\n"
      << "d = " << c.dim << "\n"
      << "n = " << c.n << "\n"
      << "X = " << c.half_width << "\n"
      << "stencil_order = " << c.stencil_order << "\n\n"
      << "[model]\n"
      << "profile = " << c.profile << "\n"
      << "b0 = " << c.b0 << "\n"
      << "r0 = " << c.r0 << "\n"
      << "R = " << c.R << "\n"
      << "eps = " << c.eps << "\n"
      << "dir = " << c.dir[0] << " " << c.dir[1] << " " << c.dir[2] << "\n"
      << "tensor_seed = " << c.tensor_seed << "\n"
      << "tensor_strength = " << c.tensor_strength << "\n\n"
      << "[run]\n"
      << "lambda = " << c.lambda << "\n"
      << "dt = " << c.dt << "\n"
      << "cfl_safety = " << c.cfl_safety << "\n"
      << "t_final = " << c.t_final << "\n"
      << "sample_every = " << c.sample_every << "\n"
      << "L = " << c.L << "\n"
      << "smallness_budget = " << c.smallness_budget << "\n"
      << "blowup_sup = " << c.blowup_sup << "\n\n"
      << "[data]\n"
      << "u0_family = " << c.u0_family << "\n"
      << "u1_family = " << c.u1_family << "\n"
      << "u0_amplitude = " << c.u0_amplitude << "\n"
      << "u1_amplitude = " << c.u1_amplitude << "\n"
      << "seed = " << c.data_seed << "\n"
      << "radius = " << c.data_radius << "\n\n"
      << "[suite]\n"
      << "mu_max = " << c.mu_max << "\n"
      << "samples = " << c.samples << "\n"
      << "checks = " << c.checks << "\n"
      << "window_t1 = " << c.window_t1 << "\n"
      << "window_t2 = " << c.window_t2 << "\n"
      << "slack = " << c.slack << "\n"
      << "c1 = " << c.c1 << "\n"
      << "fits = " << (c.run_fits ? "on" : "off") << "\n"
      << "ledger = " << (c.run_ledger ? "on" : "off") << "\n";
  return out.str();
}

RunConfig to_run_config(const ExperimentConfig& c) {
  if (!(c.lambda > 0) || c.lambda > 1)
    throw std::invalid_argument("config: run.lambda must lie in (0, 1]");
  RunConfig r;
  r.grid = make_grid(c.dim, c.n, c.half_width, c.stencil_order);
  if (c.b0 > 0) {
    r.damping = make_damping(parse_damping_profile(c.profile), c.dim, c.b0,
                             c.r0, c.R, c.eps, c.dir)
                    .rescaled(c.lambda);
  } else {
    r.damping = make_damping(DampingProfile::uniform, c.dim, 0, c.r0, c.R);
  }
  r.tensor = c.tensor_strength > 0
                 ? NonlinearTensor::random_symmetrized(c.dim, c.tensor_seed,
                                                       c.tensor_strength)
                 : NonlinearTensor::zero(c.dim);
  r.lambda = c.lambda;
  r.dt = c.dt;
  r.t_final = c.t_final;
  r.sample_every = c.sample_every;
  r.L = c.L;
  r.cfl_safety = c.cfl_safety;
  r.smallness_budget = c.smallness_budget;
  r.blowup_sup = c.blowup_sup;
  validate(r);
  return r;
}

InitialData make_initial_data(const ExperimentConfig& c, const Grid& g) {
  const double radius = c.data_radius > 0 ? c.data_radius : g.half_width / 2;
  auto build = [&](const std::string& family, double amplitude,
                   std::uint64_t seed) {
    if (family == "zero" || amplitude == 0) return Field(g);
    Field f = sample_function(g, seed, parse_sample_kind(family), radius);
    f *= amplitude;
    return f;
  };
  auto odd_ok = [](const std::string& family, double amplitude) {
    return family == "zero" || amplitude == 0 || family == "odd_bump";
  };
  InitialData d{build(c.u0_family, c.u0_amplitude, c.data_seed * 2),
                build(c.u1_family, c.u1_amplitude, c.data_seed * 2 + 1),
                odd_ok(c.u0_family, c.u0_amplitude) &&
                    odd_ok(c.u1_family, c.u1_amplitude)};
  return d;
}

}  // namespace dwlab
