#ifndef SASCOMP_CLI_HPP
#define SASCOMP_CLI_HPP

// Command implementations behind the sascomp executable. Each command builds a
// JSON document and a CSV table, writes the requested one, and reports whether
// its checks passed. Exit status: 0 pass, 1 failed check, 2 invalid config.

#include "sascomp/acceptance.hpp"
#include "sascomp/distops.hpp"
#include "sascomp/geoflow.hpp"
#include "sascomp/heat.hpp"
#include "sascomp/io.hpp"
#include "sascomp/models.hpp"
#include "sascomp/riccati.hpp"
#include "sascomp/volume.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace sascomp::cli {

enum class Format { Csv, Json };

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> names = {"volume",  "geodesic", "cutlocus", "riccati",
                                                 "hessian", "compare",  "heat",     "selftest"};
  return names;
}

struct RunConfig {
  std::string command;
  ModelSpace model{ModelKind::Heisenberg, 1.0};
  std::optional<double> R, k, tol;
  std::optional<int> grid;
  double h0 = 1.0;     // geodesic: Reeb momentum
  double theta = 0.0;  // geodesic: horizontal direction
  std::string out;     // empty selects out/<command>.<format>
  Format format = Format::Json;
  std::uint64_t seed = 0;
};

struct Outcome {
  bool pass = true;
  std::string summary;
  Json doc;
  CsvTable csv{{}};
};

enum ExitCode { kPass = 0, kFailedCheck = 1, kInvalidConfig = 2 };

namespace detail {

inline Error invalid(const std::string& what) { return Error(ErrorKind::InvalidConfig, what); }

inline int grid_or(const RunConfig& cfg, int fallback, int minimum) {
  const int g = cfg.grid.value_or(fallback);
  if (g < minimum) throw invalid("--grid must be at least " + std::to_string(minimum) + " for " + cfg.command);
  return g;
}

inline double tol_or(const RunConfig& cfg, double fallback) { return cfg.tol.value_or(fallback); }

inline std::string sci(double v) { return acceptance::sci(v); }

inline Json header(const RunConfig& cfg) {
  Json doc = document(cfg.command);
  doc["model"] = to_json(cfg.model);
  doc["seed"] = cfg.seed;
  return doc;
}

inline void columns(const Vec3& p, std::vector<std::string>& names, std::vector<double>& values) {
  names = {"x", "y", "z"};
  values = {p(0), p(1), p(2)};
}

inline void columns(const Mat2c& g, std::vector<std::string>& names, std::vector<double>& values) {
  names.clear();
  values.clear();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const std::string e = "g" + std::to_string(i) + std::to_string(j);
      names.push_back(e + "_re");
      names.push_back(e + "_im");
      values.push_back(g(i, j).real());
      values.push_back(g(i, j).imag());
    }
}

}  // namespace detail

inline void validate(const RunConfig& cfg) {
  bool known = false;
  for (const auto& c : commands()) known = known || c == cfg.command;
  if (!known) throw detail::invalid("unknown command '" + cfg.command + "'");
  if (!(cfg.model.c > 0.0) || !std::isfinite(cfg.model.c)) throw detail::invalid("--c must be positive");
  if (cfg.R && !(*cfg.R >= 0.0 && std::isfinite(*cfg.R))) throw detail::invalid("--R must be nonnegative");
  if (cfg.tol && !(*cfg.tol > 0.0)) throw detail::invalid("--tol must be positive");
  if (cfg.k && !std::isfinite(*cfg.k)) throw detail::invalid("--k must be finite");
}

inline Outcome volume(const RunConfig& cfg) {
  const ModelSpace& m = cfg.model;
  const double R = cfg.R.value_or(1.0);
  const double k_lower = cfg.k.value_or(m.k());
  const int grid = detail::grid_or(cfg, 64, 8);
  const double tol = detail::tol_or(cfg, 1e-3);
  if (m.kind == ModelKind::SL2 && R > sl2_validity_radius(m.c) * (1.0 + 1e-12))
    throw detail::invalid("SL(2) balls are only supported for R <= 2 sqrt(2) pi / c");
  const auto a = ball_volume(m, R);
  const auto b = ball_volume_exp_oracle(m, R, grid);
  const double rel = R == 0.0 ? 0.0 : std::abs(a.volume - b.volume) / a.volume;
  ComparisonReport bishop;
  bishop.name = "bishop";
  if (R > 0.0) bishop = bishop_check(k_lower, m, R);

  Outcome o;
  o.pass = rel <= tol && bishop.pass();
  o.summary = "volume " + detail::sci(a.volume) + ", oracle " + detail::sci(b.volume) + ", relative error " +
              detail::sci(rel) + ", Bishop vs k = " + detail::sci(k_lower) + (bishop.pass() ? " holds" : " fails");
  o.doc = detail::header(cfg);
  o.doc["R"] = R;
  o.doc["k_lower"] = k_lower;
  o.doc["closed_form"] = to_json(a);
  o.doc["exp_oracle"] = to_json(b);
  o.doc["relative_error"] = rel;
  o.doc["tolerance"] = tol;
  o.doc["bishop"] = to_json(bishop);
  o.doc["pass"] = o.pass;
  o.csv = CsvTable({"quantity", "R", "k", "value", "reference", "margin", "pass"});
  o.csv.row() << "closed_form" << R << m.k() << a.volume << b.volume << tol - rel << (rel <= tol ? "1" : "0");
  o.csv.row() << "exp_oracle" << R << m.k() << b.volume << b.error << tol - rel << (rel <= tol ? "1" : "0");
  for (const auto& s : bishop.samples)
    o.csv.row() << s.label << R << k_lower << s.lhs << s.rhs << s.margin << (s.pass ? "1" : "0");
  return o;
}

inline Outcome geodesic(const RunConfig& cfg) {
  const ModelSpace& m = cfg.model;
  const double r = cfg.R.value_or(1.0);
  const int samples = detail::grid_or(cfg, 200, 2);
  const double tol = detail::tol_or(cfg, 1e-9);
  const Vec3 alpha(cfg.h0, r * std::cos(cfg.theta), r * std::sin(cfg.theta));
  Outcome o;
  o.doc = detail::header(cfg);
  o.doc["alpha"] = to_json(alpha);
  Json traj = Json::array();
  double drift_H = 0.0, drift_h0 = 0.0;
  with_space(m, [&](const auto& space) {
    using Point = std::decay_t<decltype(space.origin())>;
    CovectorState<Point> s{space.origin(), alpha};
    std::vector<std::string> names;
    std::vector<double> values;
    detail::columns(s.x, names, values);
    std::vector<std::string> header = {"t", "h0", "h1", "h2", "hamiltonian"};
    header.insert(header.end(), names.begin(), names.end());
    o.csv = CsvTable(header);
    const double H0 = hamiltonian(alpha);
    for (int i = 0; i < samples; ++i) {
      const double t = static_cast<double>(i) / (samples - 1);
      if (i > 0) s = flow(space, s, t - static_cast<double>(i - 1) / (samples - 1), FlowOptions{1e-12});
      detail::columns(s.x, names, values);
      const double H = hamiltonian(s.h);
      drift_H = std::max(drift_H, std::abs(H - H0));
      drift_h0 = std::max(drift_h0, std::abs(s.h(0) - alpha(0)));
      auto& row = o.csv.row() << t << s.h(0) << s.h(1) << s.h(2) << H;
      for (double v : values) row << v;
      Json point = Json::object();
      for (std::size_t j = 0; j < names.size(); ++j) point[names[j]] = values[j];
      traj.push_back({{"t", t}, {"h", to_json(s.h)}, {"hamiltonian", H}, {"point", point}});
    }
    return 0;
  });
  const double scale = std::max(1.0, hamiltonian(alpha));
  o.pass = drift_H <= tol * scale && drift_h0 <= tol * std::max(1.0, std::abs(alpha(0)));
  bool in_domain = false;
  if (r > 0.0 && !(m.kind == ModelKind::SL2 && r > sl2_validity_radius(m.c)))
    in_domain = injectivity_domain(m, r).contains(alpha);
  o.summary = std::to_string(samples) + " samples, Hamiltonian drift " + detail::sci(drift_H) + ", h0 drift " +
              detail::sci(drift_h0) + (in_domain ? ", minimizing" : ", outside the injectivity domain");
  o.doc["in_injectivity_domain"] = in_domain;
  o.doc["hamiltonian_drift"] = drift_H;
  o.doc["h0_drift"] = drift_h0;
  o.doc["tolerance"] = tol;
  o.doc["pass"] = o.pass;
  o.doc["trajectory"] = traj;
  return o;
}

inline Outcome cutlocus(const RunConfig& cfg) {
  const ModelSpace& m = cfg.model;
  const double tol = detail::tol_or(cfg, 1e-6);
  const int n = detail::grid_or(cfg, 32, 2);
  double R_default = 2.0;
  if (m.kind == ModelKind::SU2) R_default = kTwoPi / m.c;
  if (m.kind == ModelKind::SL2) R_default = sl2_validity_radius(m.c);
  const double R = cfg.R.value_or(R_default);
  if (!(R > 0.0)) throw detail::invalid("--R must be positive for cutlocus");
  if (m.kind == ModelKind::SL2 && R > sl2_validity_radius(m.c) * (1.0 + 1e-12))
    throw detail::invalid("SL(2) injectivity domain is only known for R <= 2 sqrt(2) pi / c");
  const auto rep = cut::sl2_cut_analysis(tol);
  const auto dom = injectivity_domain(m, R);

  Outcome o;
  o.csv = CsvTable({"r", "h_lo", "h_hi", "sigma_hi", "b_closed_hi", "b_oracle_hi", "b_closed_lo"});
  Json sweep = Json::array();
  double sigma_err = 0.0, b_err = 0.0;
  with_space(m, [&](const auto& space) {
    for (int i = 1; i <= n; ++i) {
      const double r = R * i / n;
      const auto [lo, hi] = dom.h_range(r);
      if (!(hi > lo)) continue;
      const double sigma = hi * hi + m.k() * r * r;
      const double bc = bk_density(m.k(), r, hi);
      const double bo = jacobian_density(space, space.origin(), Vec3(hi, r, 0.0)).value;
      const double bl = bk_density(m.k(), r, lo);
      sigma_err = std::max(sigma_err, std::abs(sigma - 4.0 * kPi * kPi) / (4.0 * kPi * kPi));
      b_err = std::max(b_err, std::max(std::abs(bc), std::abs(bo)) / (r * r));
      o.csv.row() << r << lo << hi << sigma << bc << bo << bl;
      sweep.push_back({{"r", r}, {"h_lo", lo}, {"h_hi", hi}, {"sigma_hi", sigma}, {"b_closed_hi", bc},
                       {"b_oracle_hi", bo}, {"b_closed_lo", bl}});
    }
    return 0;
  });
  const bool boundary_ok = sigma_err <= tol && b_err <= tol;
  o.pass = rep.pass && boundary_ok;
  o.summary = "r2 = " + std::to_string(rep.r2) + " (8 pi^2 error " + detail::sci(rep.r2_error) + "), r3 = " +
              std::to_string(rep.r3) + ", r1 = " + std::to_string(rep.r1) + ", conjugate boundary density " +
              detail::sci(b_err);
  o.doc = detail::header(cfg);
  o.doc["cut"] = to_json(rep);
  o.doc["R"] = R;
  o.doc["boundary_sigma_error"] = sigma_err;
  o.doc["boundary_density"] = b_err;
  o.doc["boundary"] = sweep;
  o.doc["tolerance"] = tol;
  o.doc["pass"] = o.pass;
  return o;
}

inline Outcome riccati(const RunConfig& cfg) {
  const int samples = detail::grid_or(cfg, 12, 2);
  const double tol = detail::tol_or(cfg, 1e-8);
  if (cfg.k && !(std::abs(*cfg.k) <= 4.0 && *cfg.k == std::round(*cfg.k)))
    throw detail::invalid("--k must be an integer in [-4, 4] for riccati");
  Outcome o;
  o.csv = CsvTable({"k", "h0", "H", "t_max", "u_error", "s_error", "det_error"});
  Json rows = Json::array();
  double u = 0.0, s = 0.0, d = 0.0;
  for (const auto& c : closed_form_sweep(samples)) {
    if (cfg.k && c.k != *cfg.k) continue;
    u = std::max(u, c.u_error);
    s = std::max(s, c.s_error);
    d = std::max(d, c.det_error);
    o.csv.row() << c.k << c.h0 << c.H << c.t_max << c.u_error << c.s_error << c.det_error;
    rows.push_back({{"k", c.k}, {"h0", c.h0}, {"H", c.H}, {"t_max", c.t_max}, {"u_error", c.u_error},
                    {"s_error", c.s_error}, {"det_error", c.det_error}});
  }
  o.pass = u <= tol && s <= tol && d <= 0.1 * tol;
  o.summary = std::to_string(o.csv.size()) + " cases, U error " + detail::sci(u) + ", S error " + detail::sci(s) +
              ", |det B| error " + detail::sci(d);
  o.doc = document(cfg.command);
  o.doc["tolerance"] = tol;
  o.doc["det_tolerance"] = 0.1 * tol;
  o.doc["u_error"] = u;
  o.doc["s_error"] = s;
  o.doc["det_error"] = d;
  o.doc["pass"] = o.pass;
  o.doc["cases"] = rows;
  return o;
}

inline Outcome hessian(const RunConfig& cfg) {
  const ModelSpace& m = cfg.model;
  const int n = detail::grid_or(cfg, 50, 1);
  const double tol = detail::tol_or(cfg, 1e-3);
  Outcome o;
  o.csv = CsvTable({"i", "h0", "h1", "h2", "r", "v0r", "entry_error", "symmetry_residual", "trace_residual", "H33",
                    "H13", "H23", "laplacian_r_fd", "laplacian_r_formula"});
  Json rows = Json::array();
  double entry = 0.0, ident = 0.0, st = 0.0;
  with_space(m, [&](const auto& space) {
    const auto alphas = sample_interior_covectors(m, n, cfg.seed);
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      const auto s = hessian_sample(space, m, alphas[i]);
      entry = std::max(entry, s.entry_error);
      ident = std::max({ident, s.symmetry_residual, s.trace_residual});
      st = std::max({st, std::abs(s.fd(2, 2) + 1.0), std::abs(s.fd(0, 2)), std::abs(s.fd(1, 2))});
      o.csv.row() << static_cast<double>(i) << s.alpha(0) << s.alpha(1) << s.alpha(2) << s.r << s.v0r
                  << s.entry_error << s.symmetry_residual << s.trace_residual << s.fd(2, 2) << s.fd(0, 2)
                  << s.fd(1, 2) << s.laplacian_r_fd << s.laplacian_r_formula;
      rows.push_back(to_json(s));
    }
    return 0;
  });
  o.pass = entry <= tol && ident <= 1e-8 && st <= 1e-6;
  o.summary = std::to_string(n) + " points, entry error " + detail::sci(entry) + ", symmetry/trace " +
              detail::sci(ident) + ", H33/H13/H23 " + detail::sci(st);
  o.doc = detail::header(cfg);
  o.doc["tolerance"] = tol;
  o.doc["entry_error"] = entry;
  o.doc["identity_residual"] = ident;
  o.doc["structure_error"] = st;
  o.doc["pass"] = o.pass;
  o.doc["points"] = rows;
  return o;
}

inline Outcome compare(const RunConfig& cfg) {
  const ModelSpace& m = cfg.model;
  const double k = cfg.k.value_or(0.0);
  const int n = detail::grid_or(cfg, 10, 1);
  const double tol = detail::tol_or(cfg, 1e-5);
  const auto rep = with_space(m, [&](const auto& space) {
    return laplacian_compare(space, m, k, sample_interior_covectors(m, n, cfg.seed), tol);
  });
  Outcome o;
  o.pass = rep.pass();
  o.summary = m.name() + " vs space form k = " + detail::sci(k) + ": min margin " + detail::sci(rep.min_margin()) +
              (o.pass ? ", comparison holds" : ", comparison fails");
  o.doc = detail::header(cfg);
  o.doc["k"] = k;
  o.doc["report"] = to_json(rep);
  o.doc["pass"] = o.pass;
  o.csv = CsvTable({"label", "sample", "lhs", "rhs", "margin", "pass"});
  for (const auto& s : rep.samples) o.csv.row() << s.label << s.parameter << s.lhs << s.rhs << s.margin << (s.pass ? "1" : "0");
  return o;
}

inline Outcome heat(const RunConfig& cfg) {
  if (cfg.model.kind != ModelKind::Heisenberg) throw detail::invalid("the heat pipeline runs on the Heisenberg group");
  if (cfg.k && *cfg.k != 0.0) throw detail::invalid("the closed-form barrier needs k = 0");
  CheegerYauSetup setup;
  setup.n = detail::grid_or(cfg, 64, 16);
  setup.tol = detail::tol_or(cfg, 1e-6);
  setup.r_out = cfg.R.value_or(setup.r_out);
  if (!(setup.r_out > setup.r_in)) throw detail::invalid("--R (outer radius) must exceed 0.5");
  const auto run = cheeger_yau_pipeline(setup);
  Outcome o;
  o.pass = run.report.pass();
  o.summary = std::to_string(setup.n) + "^3 grid, " + std::to_string(run.solution.steps) + " steps, min(u - h(r)) = " +
              detail::sci(run.report.min_margin()) + ", need >= -" + detail::sci(setup.tol) +
              (run.report.hypotheses_hold ? "" : ", hypotheses violated");
  o.doc = detail::header(cfg);
  o.doc["grid"] = setup.n;
  o.doc["stencil_order"] = setup.order;
  o.doc["eps"] = setup.eps;
  o.doc["r_in"] = setup.r_in;
  o.doc["r_out"] = setup.r_out;
  o.doc["t_end"] = setup.t_end;
  o.doc["dt"] = run.solution.dt;
  o.doc["steps"] = run.solution.steps;
  o.doc["report"] = to_json(run.report);
  o.doc["pass"] = o.pass;
  o.csv = CsvTable({"x", "y", "z", "u"});
  const auto& g = run.solution.grid;
  const auto& u = run.solution.snapshots.back();
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Vec3 p = g.point(n);
    o.csv.row() << p(0) << p(1) << p(2) << u[n];
  }
  return o;
}

inline Outcome selftest(const RunConfig& cfg, std::ostream& log) {
  AcceptanceOptions opt;
  opt.seed = cfg.seed;
  opt.heat_grid = detail::grid_or(cfg, 64, 16);
  const auto results = run_acceptance(opt, &log);
  Outcome o;
  o.doc = acceptance_report(results, opt);
  o.pass = o.doc["pass"].get<bool>();
  int passed = 0;
  o.csv = CsvTable({"id", "name", "pass", "seconds", "summary"});
  for (const auto& r : results) {
    passed += r.pass ? 1 : 0;
    o.csv.row() << static_cast<double>(r.id) << r.name << (r.pass ? "1" : "0") << r.seconds << r.summary;
  }
  o.summary = std::to_string(passed) + "/" + std::to_string(results.size()) + " criteria passed";
  return o;
}

inline std::filesystem::path output_path(const RunConfig& cfg) {
  const std::string file = cfg.command + (cfg.format == Format::Json ? ".json" : ".csv");
  if (cfg.out.empty()) return std::filesystem::path("out") / file;
  std::filesystem::path p(cfg.out);
  if (cfg.out.back() == '/' || std::filesystem::is_directory(p)) return p / file;
  return p;
}

/// Runs one command, writes its artifact and returns the exit status.
inline int run(const RunConfig& cfg, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  Outcome o;
  try {
    validate(cfg);
    if (cfg.command == "volume") o = volume(cfg);
    else if (cfg.command == "geodesic") o = geodesic(cfg);
    else if (cfg.command == "cutlocus") o = cutlocus(cfg);
    else if (cfg.command == "riccati") o = riccati(cfg);
    else if (cfg.command == "hessian") o = hessian(cfg);
    else if (cfg.command == "compare") o = compare(cfg);
    else if (cfg.command == "heat") o = heat(cfg);
    else o = selftest(cfg, log);
    const auto path = output_path(cfg);
    write_text(path, cfg.format == Format::Json ? o.doc.dump(2) + "\n" : o.csv.str());
    log << cfg.command << ": " << (o.pass ? "PASS" : "FAIL") << ", " << o.summary << " -> " << path.string()
        << std::endl;
  } catch (const Error& e) {
    err << cfg.command << ": " << e.what() << std::endl;
    const bool config = e.kind() == ErrorKind::InvalidConfig || e.kind() == ErrorKind::Domain;
    return config ? kInvalidConfig : kFailedCheck;
  } catch (const std::exception& e) {
    err << cfg.command << ": " << e.what() << std::endl;
    return kFailedCheck;
  }
  return o.pass ? kPass : kFailedCheck;
}

}  // namespace sascomp::cli

#endif  // SASCOMP_CLI_HPP
