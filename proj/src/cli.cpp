#include "nvw/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "nvw/csv.hpp"
#include "nvw/oracles.hpp"

namespace nvw {

namespace fs = std::filesystem;
using nlohmann::json;

Resolution RunConfig::resolution() const {
  Resolution r;
  r.N = N;
  r.n_samples = n_samples;
  r.s_range = s_range;
  r.margin = margin;
  return r;
}

double RunConfig::max_abs_time() const {
  double m = 0.0;
  for (double t : times) m = std::max(m, std::abs(t));
  return m;
}

namespace {

std::vector<Atom> parse_atoms(const json& j, const char* key) {
  std::vector<Atom> atoms;
  if (!j.contains(key)) return atoms;
  for (const auto& a : j.at(key)) {
    if (!a.is_array() || a.size() != 2) {
      fail(ErrorCode::ConfigError, std::string(key) + " entries must be [position, mass]");
    }
    atoms.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
  }
  return atoms;
}

PhysicalState parse_initial(const json& j, const SpeedLaw& law, std::string& preset) {
  if (j.contains("preset")) {
    preset = j.at("preset").get<std::string>();
    if (preset != "box-example") fail(ErrorCode::ConfigError, "unknown preset '" + preset + "'");
    return box_example_state(j.value("half_width", 1.0));
  }
  const auto grid = j.at("grid").get<std::vector<double>>();
  std::vector<double> u;
  std::vector<double> R;
  std::vector<double> S;
  if (j.contains("u0")) {
    u = j.at("u0").get<std::vector<double>>();
    const auto u1 = j.at("u1").get<std::vector<double>>();
    RSData rs = rs_from_velocity(grid, u, u1, law);
    R = std::move(rs.R);
    S = std::move(rs.S);
    R.back() = 0.0;
    S.back() = 0.0;
  } else {
    u = j.at("u").get<std::vector<double>>();
    R = j.at("R").get<std::vector<double>>();
    S = j.at("S").get<std::vector<double>>();
  }
  if (u.size() != grid.size()) fail(ErrorCode::ConfigError, "u must be sampled on the grid");
  const double u_inf = j.value("u_infinity", u.empty() ? 0.0 : u.front());
  return make_state(grid, u, R, S, parse_atoms(j, "mu_atoms"), parse_atoms(j, "nu_atoms"),
                    u_inf);
}

void check_solvable(const RunConfig& c) {
  if (c.N < 8) fail(ErrorCode::ConfigError, "N must be at least 8");
  if (c.n_samples < 2) fail(ErrorCode::ConfigError, "n_samples must be at least 2");
  if (!c.s_range) return;
  const auto& r = *c.s_range;
  if (!(r[1] > r[0])) fail(ErrorCode::ConfigError, "s_range must be increasing");
  const double reach = 2.0 * c.law.max_speed() * c.max_abs_time();
  const double need_lo = c.initial.grid.front() - reach;
  const double need_hi = c.initial.grid.back() + 0.5 * c.initial.total_energy() + reach;
  if (r[0] > need_lo || r[1] < need_hi) {
    fail(ErrorCode::ConfigError, "s_range [" + format_double(r[0]) + ", " + format_double(r[1]) +
                                     "] cannot reach the requested times; need [" +
                                     format_double(need_lo) + ", " + format_double(need_hi) +
                                     "]");
  }
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) fail(ErrorCode::IoError, "failed writing " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
}

json residuals_json(const InvariantDiagnostics& d) {
  return {{"x_t_X", d.x_t_X},       {"x_t_Y", d.x_t_Y},
          {"J_K_X", d.J_K_X},       {"J_K_Y", d.J_K_Y},
          {"energy_X", d.energy_X}, {"energy_Y", d.energy_Y},
          {"min_x_X", d.min_x_X},   {"min_x_Y", d.min_x_Y},
          {"min_J_X", d.min_J_X},   {"min_J_Y", d.min_J_Y},
          {"min_xJ_X", d.min_xJ_X}, {"min_xJ_Y", d.min_xJ_Y},
          {"max_J_excess", d.max_J_excess}, {"min_J", d.min_J},
          {"zh_zv", d.zh_zv}};
}

std::vector<double> sample_points(double lo, double hi, int n) {
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) xs[k] = lo + (hi - lo) * (k + 0.5) / n;
  return xs;
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

MonotoneFunction random_relabeling(std::mt19937_64& rng, double lo, double hi, int pieces) {
  std::vector<double> in(static_cast<std::size_t>(pieces) + 1);
  std::vector<double> out(in.size());
  in[0] = lo;
  out[0] = lo;
  for (int k = 1; k <= pieces; ++k) {
    in[k] = lo + (hi - lo) * k / pieces;
    const double slope = 0.5 + 1.5 * uniform01(rng);
    out[k] = out[k - 1] + slope * (in[k] - in[k - 1]);
  }
  return MonotoneFunction(std::move(in), std::move(out), MonotoneFunction::Extension::UnitSlope);
}

}  // namespace

RunConfig parse_config(const json& j, const fs::path& base_dir) {
  try {
    RunConfig c;
    c.law = j.at("law").get<SpeedLaw>();
    c.initial = parse_initial(j.at("initial"), c.law, c.preset);
    if (j.contains("s_range")) {
      const auto r = j.at("s_range").get<std::vector<double>>();
      if (r.size() != 2) fail(ErrorCode::ConfigError, "s_range must have two entries");
      c.s_range = std::array<double, 2>{r[0], r[1]};
    }
    c.N = j.value("N", c.N);
    c.n_samples = j.value("n_samples", c.n_samples);
    c.margin = j.value("margin", c.margin);
    c.times = j.value("times", std::vector<double>{});
    c.output_dir = j.value("output_dir", std::string("out"));
    if (c.output_dir.is_relative() && !base_dir.empty()) c.output_dir = base_dir / c.output_dir;
    if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') {
      c.output_dir = env;
    }
    if (j.contains("emit")) {
      const json& e = j.at("emit");
      c.emit.grid = e.value("grid", true);
      c.emit.isotimes = e.value("isotimes", true);
      c.emit.characteristics = e.value("characteristics", true);
      c.emit.surface = e.value("surface", true);
      c.emit.measures = e.value("measures", true);
    }
    c.audit_time = j.value("audit_time", c.audit_time);
    c.seed = j.value("seed", c.seed);
    check_solvable(c);
    return c;
  } catch (const json::exception& e) {
    fail(ErrorCode::ConfigError, e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IoError || e.code() == ErrorCode::ConfigError) throw;
    fail(ErrorCode::ConfigError, e.what());
  }
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot read " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorCode::ConfigError, std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j, path.parent_path());
}

std::string snapshot_name(double T) { return "snapshot_" + format_double(T) + ".csv"; }
std::string measures_name(double T) { return "measures_" + format_double(T) + ".json"; }

std::optional<double> fitted_order(const std::vector<double>& h, const std::vector<double>& err,
                                   double floor) {
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t k = 0; k < h.size() && k < err.size(); ++k) {
    if (err[k] > floor) {
      lx.push_back(std::log(h[k]));
      ly.push_back(std::log(err[k]));
    }
  }
  if (lx.size() < 2) return std::nullopt;
  const double n = static_cast<double>(lx.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    mx += lx[k] / n;
    my += ly[k] / n;
  }
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

void run_solve(const RunConfig& config) {
  ensure_dir(config.output_dir);
  const Evolution evo =
      prepare_evolution(config.initial, config.law, config.resolution(), config.max_abs_time());
  const SolutionGrid& g = evo.grid;

  if (config.emit.grid) {
    std::ofstream out = open_out(config.output_dir / "grid.csv");
    write_grid_csv(out, g);
  }

  json energies = json::array();
  std::vector<IsotimeCurve> curves;
  for (double T : config.times) {
    const Snapshot snap = take_snapshot(evo, T);
    {
      std::ofstream out = open_out(config.output_dir / snapshot_name(T));
      out << "x,u,R,S\n";
      const PhysicalState& st = snap.state;
      for (std::size_t k = 0; k < st.grid.size(); ++k) {
        write_csv_row(out, {st.grid[k], st.u[k], st.R[k], st.S[k]});
      }
    }
    if (config.emit.measures) {
      write_json(config.output_dir / measures_name(T),
                 {{"T", T}, {"mu", snap.state.mu}, {"nu", snap.state.nu}, {"energy", snap.energy}});
    }
    energies.push_back({{"T", T}, {"energy", snap.energy}});
    if (config.emit.isotimes) {
      curves.push_back(snap.isotime ? *snap.isotime : extract_isotime(g, T));
    }
  }

  if (config.emit.isotimes && !curves.empty()) {
    std::ofstream out = open_out(config.output_dir / "isotimes.csv");
    out << "T,k,i,j,X,Y,t,x\n";
    for (const IsotimeCurve& iso : curves) {
      for (std::size_t k = 0; k < iso.path.size(); ++k) {
        const StaircaseNode& p = iso.path[k];
        write_csv_row(out, {iso.T, static_cast<double>(k), static_cast<double>(p.i),
                            static_cast<double>(p.j), g.X[p.i], g.Y[p.j], p.z.t, p.z.x});
      }
    }
  }

  if (config.emit.characteristics) {
    // family 0: forward characteristics (Y fixed, X varying); 1: backward.
    std::ofstream out = open_out(config.output_dir / "characteristics.csv");
    out << "family,index,X,Y,x,t\n";
    const int stride = std::max(1, g.N / 20);
    for (int j = 0; j <= g.N; j += stride) {
      for (int i = 0; i <= g.N; ++i) {
        const FiveVector z = g.node(i, j);
        write_csv_row(out, {0.0, static_cast<double>(j), g.X[i], g.Y[j], z.x, z.t});
      }
    }
    for (int i = 0; i <= g.N; i += stride) {
      for (int j = 0; j <= g.N; ++j) {
        const FiveVector z = g.node(i, j);
        write_csv_row(out, {1.0, static_cast<double>(i), g.X[i], g.Y[j], z.x, z.t});
      }
    }
  }

  if (config.emit.surface) {
    std::ofstream out = open_out(config.output_dir / "surface.csv");
    out << "i,j,t,x,U\n";
    for (int i = 0; i <= g.N; ++i) {
      for (int j = 0; j <= g.N; ++j) {
        const FiveVector z = g.node(i, j);
        write_csv_row(out, {static_cast<double>(i), static_cast<double>(j), z.t, z.x, z.U});
      }
    }
  }

  const InvariantDiagnostics diag = invariant_residuals(g);
  write_json(config.output_dir / "diagnostics.json",
             {{"N", g.N},
              {"h", g.h()},
              {"s_range", {g.s.front(), g.s.back()}},
              {"initial_energy", config.initial.total_energy()},
              {"residuals", residuals_json(diag)},
              {"energy", energies}});
}

json run_convergence(const RunConfig& config, const std::vector<int>& n_list) {
  if (n_list.size() < 3) fail(ErrorCode::ConfigError, "convergence needs at least 3 grid sizes");
  for (std::size_t k = 0; k < n_list.size(); ++k) {
    if (n_list[k] < 8) fail(ErrorCode::ConfigError, "grid sizes must be at least 8");
    if (k > 0 && n_list[k] <= n_list[k - 1]) {
      fail(ErrorCode::ConfigError, "grid sizes must be ascending");
    }
  }
  ensure_dir(config.output_dir);
  const double T_max = config.max_abs_time();
  const auto range = config.s_range ? *config.s_range
                                    : auto_s_range(config.initial, config.law, T_max, config.margin);
  std::vector<double> times;
  for (double t : config.times) {
    if (t != 0.0) times.push_back(t);
  }
  const bool linear = config.law.is_constant();
  const bool box = config.preset == "box-example";

  std::vector<Evolution> runs;
  for (int N : n_list) {
    Resolution r = config.resolution();
    r.N = N;
    r.s_range = range;
    runs.push_back(prepare_evolution(config.initial, config.law, r, T_max));
  }
  const Evolution& finest = runs.back();
  // The closed-form reference needs each domain of dependence inside the
  // sampled window, so the linear study samples the shrunken window. When
  // that window is empty the finest grid serves as the reference instead.
  const double reach = config.law.max_speed() * T_max;
  const double x0 = config.initial.grid.front();
  const double x1 = config.initial.grid.back();
  const bool closed_form_u = linear && x1 - reach > x0 + reach;
  const double lo = closed_form_u ? x0 + reach : x0 - reach;
  const double hi = closed_form_u ? x1 - reach : x1 + reach;
  const auto xs = sample_points(lo, hi, 50);

  std::vector<std::vector<double>> u_fine;
  for (double T : times) {
    const PhysicalState st = take_snapshot(finest, T).state;
    std::vector<double> row;
    for (double x : xs) row.push_back(st.u_at(x));
    u_fine.push_back(std::move(row));
  }

  json entries = json::array();
  std::vector<double> hs;
  std::vector<double> node_err;
  std::vector<double> u_err;
  std::vector<double> res_err;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const SolutionGrid& g = runs[r].grid;
    double e_nodes = 0.0;
    if (linear && box) {
      for (int i = 0; i <= g.N; ++i) {
        for (int j = 0; j <= g.N; ++j) {
          const FiveVector ref = linear_box_solution(g.X[i], g.Y[j], config.law.c0());
          e_nodes = std::max(e_nodes, (g.node(i, j) - ref).max_abs());
        }
      }
    } else if (finest.grid.N % g.N == 0) {
      const int m = finest.grid.N / g.N;
      for (int i = 0; i <= g.N; ++i) {
        for (int j = 0; j <= g.N; ++j) {
          e_nodes = std::max(e_nodes, (g.node(i, j) - finest.grid.node(m * i, m * j)).max_abs());
        }
      }
    } else {
      e_nodes = std::nan("");
    }
    double e_u = 0.0;
    for (std::size_t q = 0; q < times.size(); ++q) {
      const PhysicalState st = take_snapshot(runs[r], times[q]).state;
      for (std::size_t p = 0; p < xs.size(); ++p) {
        double ref = u_fine[q][p];
        if (closed_form_u) {
          const PhysicalState& s0 = config.initial;
          ref = dalembert(s0.grid, s0.u, s0.R, s0.S, config.law.c0(), times[q], xs[p]);
        }
        e_u = std::max(e_u, std::abs(st.u_at(xs[p]) - ref));
      }
    }
    const InvariantDiagnostics d = invariant_residuals(g);
    hs.push_back(g.h());
    node_err.push_back(e_nodes);
    u_err.push_back(e_u);
    res_err.push_back(d.max_equality());
    entries.push_back({{"N", g.N},
                       {"h", g.h()},
                       {"node_error", e_nodes},
                       {"u_error", e_u},
                       {"residuals", residuals_json(d)}});
  }

  // The finest grid is its own reference in the self-convergence study.
  auto fit = [&](std::vector<double> err, bool self_ref) -> json {
    std::vector<double> h = hs;
    if (self_ref) {
      h.pop_back();
      err.pop_back();
    }
    const auto o = fitted_order(h, err);
    return o ? json(*o) : json(nullptr);
  };
  json report = {{"law", config.law},
                 {"s_range", {range[0], range[1]}},
                 {"times", times},
                 {"node_reference", linear && box ? "closed form" : "finest grid"},
                 {"u_reference", closed_form_u ? "closed form" : "finest grid"},
                 {"runs", entries},
                 {"order_nodes", fit(node_err, !(linear && box))},
                 {"order_u", fit(u_err, !closed_form_u)},
                 {"order_residuals", fit(res_err, false)}};
  write_json(config.output_dir / "convergence.json", report);

  std::ofstream txt = open_out(config.output_dir / "convergence.txt");
  txt << "N        h             node_error    u_error       residual\n";
  for (std::size_t r = 0; r < runs.size(); ++r) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-8d %-13.6e %-13.6e %-13.6e %-13.6e\n", runs[r].grid.N,
                  hs[r], node_err[r], u_err[r], res_err[r]);
    txt << line;
  }
  txt << "fitted orders: nodes " << report["order_nodes"].dump() << ", u "
      << report["order_u"].dump() << ", residuals " << report["order_residuals"].dump() << '\n';
  return report;
}

json run_audit(const RunConfig& config) {
  ensure_dir(config.output_dir);
  const PhysicalState& s0 = config.initial;
  const SpeedLaw& law = config.law;
  const PlaneData psi = map_L(s0, law, LOptions{config.n_samples});

  // M o L
  const PhysicalState back = map_M(psi, law);
  double du = 0.0;
  double dR = 0.0;
  double dS = 0.0;
  for (std::size_t k = 0; k < s0.grid.size(); ++k) {
    const double x = s0.grid[k];
    du = std::max(du, std::abs(back.u_at(x) - s0.u[k]));
    if (k + 1 < s0.grid.size()) {
      dR = std::max(dR, std::abs(back.R_at(x) - s0.R[k]));
      dS = std::max(dS, std::abs(back.S_at(x) - s0.S[k]));
    }
  }
  const double dmu = measure_distance(back.mu, s0.mu);
  const double dnu = measure_distance(back.nu, s0.nu);

  // D o C and projection
  const double dc = plane_distance(map_D(map_C(psi, law)), psi);
  const PlaneData p1 = project_Pi(psi);
  const double pi_idem = plane_distance(project_Pi(p1), p1);

  // Relabeling invariance of the physical output.
  std::mt19937_64 rng(config.seed);
  Relabeling phi;
  phi.f = random_relabeling(rng, psi.first.grid.front(), psi.first.grid.back(), 7);
  phi.g = random_relabeling(rng, psi.second.grid.front(), psi.second.grid.back(), 7);
  const PhysicalState relab = map_M(relabel(psi, phi), law);
  double drel = 0.0;
  for (double x : s0.grid) drel = std::max(drel, std::abs(relab.u_at(x) - back.u_at(x)));
  drel = std::max(drel, measure_distance(relab.mu, back.mu));
  drel = std::max(drel, measure_distance(relab.nu, back.nu));

  // Semigroup: one step of length T against two of length T/2, at N and N/2.
  const double T = config.audit_time;
  const double reach = law.max_speed() * T;
  const auto xs = sample_points(s0.grid.front() - reach, s0.grid.back() + reach, 200);
  json semigroup = json::array();
  for (int N : {config.N / 2, config.N}) {
    Resolution r = config.resolution();
    r.N = N;
    r.s_range.reset();
    const PhysicalState one = semigroup_step(s0, T, law, r);
    const PhysicalState half = semigroup_step(s0, 0.5 * T, law, r);
    const PhysicalState two = semigroup_step(half, 0.5 * T, law, r);
    double d = 0.0;
    for (double x : xs) d = std::max(d, std::abs(one.u_at(x) - two.u_at(x)));
    const auto range = auto_s_range(s0, law, T, r.margin);
    semigroup.push_back({{"N", N}, {"h", (range[1] - range[0]) / N}, {"max_u_difference", d}});
  }

  json report = {{"M_of_L", {{"u", du}, {"R", dR}, {"S", dS}, {"mu", dmu}, {"nu", dnu}}},
                 {"D_of_C", dc},
                 {"Pi_idempotence", pi_idem},
                 {"relabel_invariance", drel},
                 {"semigroup", {{"T", T}, {"runs", semigroup}}}};
  write_json(config.output_dir / "audit.json", report);
  return report;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFiniteValue: return 3;
    case ErrorCode::IoError: return 4;
    default: return 2;
  }
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Conservative solver for the nonlinear variational wave equation"};
  app.require_subcommand(1);
  std::string config_path;
  std::string n_list_text = "50,100,200";
  auto* solve = app.add_subcommand("solve", "solve and write snapshots, grid and diagnostics");
  solve->add_option("config", config_path, "run configuration (JSON)")->required();
  auto* conv = app.add_subcommand("convergence", "grid refinement study");
  conv->add_option("config", config_path, "run configuration (JSON)")->required();
  conv->add_option("--n", n_list_text, "comma-separated grid sizes");
  auto* audit = app.add_subcommand("audit", "round-trip and semigroup audit");
  audit->add_option("config", config_path, "run configuration (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const RunConfig config = load_config(config_path);
    if (solve->parsed()) {
      run_solve(config);
      std::cout << "wrote results to " << config.output_dir.string() << '\n';
    } else if (conv->parsed()) {
      std::vector<int> ns;
      std::stringstream ss(n_list_text);
      std::string item;
      while (std::getline(ss, item, ',')) {
        try {
          ns.push_back(std::stoi(item));
        } catch (const std::exception&) {
          fail(ErrorCode::ConfigError, "bad grid size '" + item + "'");
        }
      }
      const json report = run_convergence(config, ns);
      std::cout << report.dump(2) << '\n';
    } else if (audit->parsed()) {
      const json report = run_audit(config);
      std::cout << report.dump(2) << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace nvw
