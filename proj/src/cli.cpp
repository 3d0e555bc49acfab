#include "symred/cli.hpp"

#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <nlohmann/json.hpp>

#include "symred/dynamics.hpp"
#include "symred/equilibria.hpp"
#include "symred/errors.hpp"
#include "symred/models.hpp"
#include "symred/normal_form.hpp"

namespace symred {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Every option as given on the command line (or left empty); a config file
// fills the gaps.
struct Options {
  std::string config;
  std::string system;
  std::string masses;
  std::string lengths;
  std::optional<double> d0;
  std::optional<double> gravity;
  std::string b;
  std::string r;
  std::optional<int> order;
  std::optional<double> tol_res;
  std::string out;
  std::optional<int> jobs;
  std::optional<double> dt;
  std::optional<double> T;
  std::optional<int> stride;
  std::string offset;
  bool reconstruct = false;
};

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    try {
      out.push_back(std::stod(tok, &used));
    } catch (const std::exception&) {
      throw UsageError(fmt::format("--{}: cannot parse '{}'", what, tok));
    }
    if (used != tok.size()) throw UsageError(fmt::format("--{}: cannot parse '{}'", what, tok));
  }
  return out;
}

double parse_number(const std::string& s, const char* what) {
  const auto v = parse_list(s, what);
  if (v.size() != 1) throw UsageError(fmt::format("--{} expects a single number", what));
  return v[0];
}

std::string json_scalar_string(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + json_scalar_string(v[i]);
    return s;
  }
  std::ostringstream os;
  os.precision(17);
  os << v.get<double>();
  return os.str();
}

// Merges the config file under the command-line options.
void apply_config(Options& o) {
  if (o.config.empty()) return;
  std::ifstream in(o.config);
  if (!in) throw UsageError("cannot open config file '" + o.config + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("malformed config file: ") + e.what());
  }
  auto str = [&](const char* key, std::string& dst) {
    if (dst.empty() && j.contains(key)) dst = json_scalar_string(j.at(key));
  };
  auto num = [&](const char* key, auto& dst) {
    if (!dst && j.contains(key)) dst = j.at(key).get<typename std::decay_t<decltype(dst)>::value_type>();
  };
  try {
    str("system", o.system);
    str("masses", o.masses);
    str("lengths", o.lengths);
    str("b", o.b);
    str("r", o.r);
    str("out", o.out);
    str("offset", o.offset);
    num("d0", o.d0);
    num("gravity", o.gravity);
    num("order", o.order);
    num("tol-res", o.tol_res);
    num("jobs", o.jobs);
    num("dt", o.dt);
    num("T", o.T);
    num("stride", o.stride);
    if (!o.reconstruct && j.contains("reconstruct")) o.reconstruct = j.at("reconstruct").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("malformed config file: ") + e.what());
  }
}

ModelConfig build_model(const Options& o) {
  nlohmann::json j;
  j["system"] = o.system.empty() ? "three-body" : o.system;
  if (!o.masses.empty()) j["masses"] = parse_list(o.masses, "masses");
  if (!o.lengths.empty()) j["lengths"] = parse_list(o.lengths, "lengths");
  if (o.d0) j["d0"] = *o.d0;
  if (o.gravity) j["gravity"] = *o.gravity;
  try {
    return model_from_json(j);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
}

// The parameter selecting the equilibrium: b for the three-body system, r for the pendulum.
double equilibrium_parameter(const Options& o, const ModelConfig& m) {
  if (m.is_three_body()) {
    if (o.b.empty()) throw UsageError("three-body runs need --b");
    const double b = parse_number(o.b, "b");
    if (!(b > 0.0)) throw UsageError("--b must be positive");
    return b;
  }
  const double r = o.r.empty() ? 1.0 : parse_number(o.r, "r");
  if (!(r > 0.0)) throw UsageError("--r must be positive");
  return r;
}

struct Located {
  RelativeEquilibrium eq;
  ReducedHamiltonian h;
};

Located locate(const ModelConfig& m, double param) {
  const MechanicalSystem sys = m.system();
  if (m.is_three_body()) {
    RelativeEquilibrium eq = lagrange_relative_equilibrium(std::get<ThreeBodyParams>(m.params), param);
    if (eq.r == 0.0) throw ChartSingularity("zero angular momentum: the reduced chart is singular");
    return {eq, ReducedHamiltonian(sys, ReducedChart::for_system(sys, eq.r))};
  }
  RelativeEquilibrium eq = stretched_out_equilibrium(std::get<PendulumParams>(m.params), param);
  return {eq, ReducedHamiltonian(sys, ReducedChart::for_system(sys, param))};
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + path + "'");
  f << content;
}

std::string fixed(double x) { return fmt::format("{:.10f}", x); }

int cmd_equilibrium(const Options& o, std::ostream& out) {
  const ModelConfig m = build_model(o);
  const double param = equilibrium_parameter(o, m);
  const MechanicalSystem sys = m.system();
  RelativeEquilibrium eq;
  std::vector<std::string> names;
  if (m.is_three_body()) {
    eq = lagrange_relative_equilibrium(std::get<ThreeBodyParams>(m.params), param);
    names = ReducedChart::deprit(sys.shape_names, std::max(eq.r, 1.0)).names;
  } else {
    eq = stretched_out_equilibrium(std::get<PendulumParams>(m.params), param);
    names = ReducedChart::for_system(sys, param).names;
  }
  out << "system " << sys.name << '\n';
  out << "r = " << fixed(eq.r) << '\n';
  for (std::size_t k = 0; k < eq.z.size(); ++k) out << names[k] << " = " << fixed(eq.z[k]) << '\n';
  out << "E0 = " << fixed(eq.energy) << '\n';
  for (std::size_t k = 0; k < eq.frequencies.size(); ++k) out << "omega_" << k + 1 << " = " << fixed(eq.frequencies[k]) << '\n';
  out << "elliptic = " << (eq.elliptic ? "yes" : "no") << '\n';

  if (!o.out.empty()) {
    nlohmann::json j;
    j["system"] = sys.name;
    j["r"] = eq.r;
    j["z"] = eq.z;
    j["names"] = names;
    j["energy"] = eq.energy;
    j["frequencies"] = eq.frequencies;
    j["elliptic"] = eq.elliptic;
    write_file(o.out, j.dump(2) + "\n");
  }
  return kExitOk;
}

std::string action_label(const std::vector<int>& alpha) {
  std::string s;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    if (alpha[k] == 0) continue;
    if (!s.empty()) s += ' ';
    s += fmt::format("I{}", k + 1);
    if (alpha[k] > 1) s += fmt::format("^{}", alpha[k]);
  }
  return s.empty() ? "1" : s;
}

int cmd_normalform(const Options& o, std::ostream& out) {
  const int order = o.order.value_or(4);
  if (order < 2 || order % 2 != 0) throw UsageError("--order must be even and at least 2");
  const double tol_res = o.tol_res.value_or(1e-10);
  if (!(tol_res > 0.0)) throw UsageError("--tol-res must be positive");
  const ModelConfig m = build_model(o);
  const double param = equilibrium_parameter(o, m);
  const Located loc = locate(m, param);

  NormalFormOptions opts;
  opts.tol_res = tol_res;
  const NormalForm nf = normal_form(loc.h.jet(), loc.eq.z, order, opts);

  out << "system " << loc.h.system().name << ", order " << order << '\n';
  out << "frequencies";
  for (double w : nf.linear.frequencies) out << ' ' << fixed(w);
  out << '\n';
  out << fmt::format("resonance margin {:.10f}\n", nf.margin.value);

  const auto j = normal_form_to_json(nf);
  for (const auto& term : j.at("action_terms")) {
    const auto alpha = term[0].get<std::vector<int>>();
    out << fmt::format("{:<12} {:>18}\n", action_label(alpha), fixed(term[1].get<double>()));
  }
  if (!o.out.empty()) write_file(o.out, j.dump(2) + "\n");
  return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  const ModelConfig m = build_model(o);
  const int jobs = o.jobs.value_or(1);
  if (jobs < 0) throw UsageError("--jobs must be non-negative");
  std::vector<SweepRow> rows;
  int dof = 0;
  try {
    if (m.is_three_body()) {
      if (o.b.empty()) throw UsageError("three-body sweeps need --b lo:hi:step");
      rows = sweep_three_body(std::get<ThreeBodyParams>(m.params), parse_range(o.b), jobs);
      dof = 4;
    } else {
      if (o.r.empty()) throw UsageError("pendulum sweeps need --r lo:hi:step");
      rows = sweep_pendulum(std::get<PendulumParams>(m.params), parse_range(o.r));
      dof = 3;
    }
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  std::ostringstream csv;
  write_sweep_csv(csv, rows, dof);
  if (o.out.empty()) {
    out << csv.str();
  } else {
    write_file(o.out, csv.str());
    const auto ok = std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return r.eq.has_value(); });
    out << fmt::format("{} rows, {} converged, written to {}\n", rows.size(), ok, o.out);
  }
  return kExitOk;
}

int cmd_integrate(const Options& o, std::ostream& out) {
  const double dt = o.dt.value_or(1e-3);
  const double T = o.T.value_or(10.0);
  const int stride = o.stride.value_or(1);
  if (!(dt > 0.0)) throw UsageError("--dt must be positive");
  if (!(T >= 0.0)) throw UsageError("--T must be non-negative");
  if (stride < 1) throw UsageError("--stride must be at least 1");
  const ModelConfig m = build_model(o);
  const double param = equilibrium_parameter(o, m);
  const Located loc = locate(m, param);
  if (o.reconstruct && !m.is_three_body()) throw UsageError("--reconstruct needs an SO(3) system");

  std::vector<double> z0 = loc.eq.z;
  if (!o.offset.empty()) {
    const auto off = parse_list(o.offset, "offset");
    if (off.size() != z0.size()) throw UsageError(fmt::format("--offset needs {} entries", z0.size()));
    for (std::size_t k = 0; k < z0.size(); ++k) z0[k] += off[k];
  }
  std::optional<Eigen::Matrix3d> g0;
  if (o.reconstruct) g0 = Eigen::Matrix3d::Identity();
  const Trajectory traj = integrate_reduced(loc.h, z0, dt, T, g0);

  std::ostringstream csv;
  write_trajectory_csv(csv, loc.h, traj, stride);
  if (o.out.empty()) {
    out << csv.str();
  } else {
    write_file(o.out, csv.str());
    out << fmt::format("{} steps, energy drift {:.3e}{}\n", traj.z.size() - 1, traj.energy_drift(),
                       traj.truncated ? ", truncated: " + traj.truncation_reason : "");
  }
  return traj.truncated ? kExitNumerical : kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reduction, relative equilibria and Birkhoff normal forms of symmetric mechanical systems", "symred"};
  app.require_subcommand(1);
  Options o;

  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON file with the same keys as the flags");
    sub->add_option("--system", o.system, "three-body or pendulum")->check(CLI::IsMember({"three-body", "pendulum"}));
    sub->add_option("--masses", o.masses, "comma-separated masses (3 for three-body, 2 for pendulum)");
    sub->add_option("--d0", o.d0, "Morse equilibrium distance");
    sub->add_option("--lengths", o.lengths, "pendulum lengths l1,l2");
    sub->add_option("--gravity", o.gravity, "gravitational acceleration");
  };

  auto* eq = app.add_subcommand("equilibrium", "locate a relative equilibrium");
  add_model(eq);
  eq->add_option("--b", o.b, "triangle size (three-body)");
  eq->add_option("--r", o.r, "momentum (pendulum)");
  eq->add_option("--out", o.out, "JSON report");

  auto* nf = app.add_subcommand("normalform", "Birkhoff normal form at a relative equilibrium");
  add_model(nf);
  nf->add_option("--b", o.b, "triangle size (three-body)");
  nf->add_option("--r", o.r, "momentum (pendulum)");
  nf->add_option("--order", o.order, "even normal form order");
  nf->add_option("--tol-res", o.tol_res, "smallest admissible divisor");
  nf->add_option("--out", o.out, "JSON output");

  auto* sw = app.add_subcommand("sweep", "equilibria over a parameter range");
  add_model(sw);
  sw->add_option("--b", o.b, "lo:hi:step (three-body)");
  sw->add_option("--r", o.r, "lo:hi:step (pendulum)");
  sw->add_option("--jobs", o.jobs, "worker threads (three-body)");
  sw->add_option("--out", o.out, "CSV output (default stdout)");

  auto* in = app.add_subcommand("integrate", "reduced trajectory starting near an equilibrium");
  add_model(in);
  in->add_option("--b", o.b, "triangle size (three-body)");
  in->add_option("--r", o.r, "momentum (pendulum)");
  in->add_option("--dt", o.dt, "RK4 step");
  in->add_option("--T", o.T, "final time");
  in->add_option("--stride", o.stride, "write every n-th state");
  in->add_option("--offset", o.offset, "comma-separated displacement from the equilibrium, chart order");
  in->add_flag("--reconstruct", o.reconstruct, "integrate the rotation as well");
  in->add_option("--out", o.out, "CSV output (default stdout)");

  std::vector<std::string> argv_store;
  argv_store.emplace_back("symred");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    apply_config(o);
    if (eq->parsed()) return cmd_equilibrium(o, out);
    if (nf->parsed()) return cmd_normalform(o, out);
    if (sw->parsed()) return cmd_sweep(o, out);
    if (in->parsed()) return cmd_integrate(o, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ResonanceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace symred
