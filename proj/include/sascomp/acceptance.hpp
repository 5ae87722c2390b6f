#ifndef SASCOMP_ACCEPTANCE_HPP
#define SASCOMP_ACCEPTANCE_HPP

// The acceptance suite: eight numbered criteria, each reduced to one pass/fail
// verdict with a one-line summary and a JSON detail block.

#include "sascomp/distops.hpp"
#include "sascomp/frame.hpp"
#include "sascomp/heat.hpp"
#include "sascomp/io.hpp"
#include "sascomp/models.hpp"
#include "sascomp/riccati.hpp"
#include "sascomp/volume.hpp"

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

namespace sascomp {

struct CriterionResult {
  CriterionResult() = default;
  CriterionResult(int id_, std::string name_) : id(id_), name(std::move(name_)) {}

  int id = 0;
  std::string name;
  bool pass = false;
  std::string summary;
  double seconds = 0.0;
  double time_limit = 0.0;  // seconds; 0 means unlimited
  Json details = Json::object();
};

struct AcceptanceOptions {
  std::uint64_t seed = 0;
  int heat_grid = 64;  // finest grid of the heat refinement study
};

namespace acceptance {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

inline Json to_json(const CriterionResult& r) {
  return {{"id", r.id},     {"name", r.name},         {"pass", r.pass},      {"summary", r.summary},
          {"seconds", r.seconds}, {"time_limit", r.time_limit}, {"details", r.details}};
}

/// "criterion 3  PASS  sl2 cut analysis: ... (0.4 s)"
inline std::string format_line(const CriterionResult& r) {
  char t[32];
  std::snprintf(t, sizeof t, "%.1f s", r.seconds);
  return "criterion " + std::to_string(r.id) + "  " + (r.pass ? "PASS" : "FAIL") + "  " + r.name + ": " +
         r.summary + " (" + t + ")";
}

inline CriterionResult riccati_closed_forms(const AcceptanceOptions&) {
  CriterionResult res{1, "riccati closed-form equivalence"};
  res.time_limit = 60.0;
  const auto cases = closed_form_sweep(12);
  double u = 0.0, s = 0.0, d = 0.0;
  for (const auto& c : cases) {
    u = std::max(u, c.u_error);
    s = std::max(s, c.s_error);
    d = std::max(d, c.det_error);
  }
  const double us = std::max(u, s);
  res.pass = us <= 1e-8 && d <= 1e-9;
  res.summary = std::to_string(cases.size()) + " cases, U/S entry error " + sci(us) + " <= 1e-8, |det B| error " +
                sci(d) + " <= 1e-9";
  res.details = {{"cases", cases.size()}, {"u_error", u}, {"s_error", s}, {"det_error", d}};
  return res;
}

inline CriterionResult curvature_identity(const AcceptanceOptions& opt) {
  CriterionResult res{2, "curvature identity"};
  std::mt19937_64 rng(opt.seed + 2);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double identity = 0.0, exact = 0.0;
  int points = 0;
  Json per_model = Json::array();
  for (auto kind : {ModelKind::Heisenberg, ModelKind::SU2, ModelKind::SL2}) {
    double model_identity = 0.0, model_exact = 0.0;
    // identity on frames rotated by a random angle field, redrawn every 10 points
    for (int block = 0; block < 10; ++block) {
      const ModelSpace m{kind, 0.5 + 1.5 * (0.5 + 0.5 * U(rng))};
      const double w0 = U(rng), w1 = U(rng), w2 = U(rng), amp = 0.5 * U(rng), phase = kPi * U(rng);
      const auto frame = rotate_horizontal(m.chart_frame(), [=](const Vec3& x) {
        return amp * std::sin(w0 * x(0) + w1 * x(1) + w2 * x(2) + phase);
      });
      for (int n = 0; n < 10; ++n, ++points) {
        // chart coordinates scale like 1/c; keep the sample box away from the chart singularity
        const Vec3 x = Vec3(0.8 * U(rng), 0.8 * U(rng), 0.8 * U(rng)) / m.c;
        model_identity = std::max(model_identity,
                                  std::abs(tanaka_webster_kappa(frame, x) - riemannian_kappa_oracle(frame, x)));
      }
    }
    // exact model values on the chart frames
    for (double c : {0.7, 1.0, 2.0}) {
      const ModelSpace m{kind, c};
      const auto frame = m.chart_frame();
      for (int n = 0; n < 10; ++n) {
        const Vec3 x(U(rng), U(rng), U(rng));
        model_exact = std::max({model_exact, std::abs(tanaka_webster_kappa(frame, x) - m.k()),
                                std::abs(riemannian_kappa_oracle(frame, x) - m.k())});
      }
    }
    per_model.push_back({{"model", to_string(kind)}, {"identity_error", model_identity}, {"exact_error", model_exact}});
    identity = std::max(identity, model_identity);
    exact = std::max(exact, model_exact);
  }
  res.pass = identity <= 1e-6 && exact <= 1e-10;
  res.summary = std::to_string(points) + " rotated-frame points, |TW - oracle| " + sci(identity) +
                " <= 1e-6, model values within " + sci(exact) + " <= 1e-10";
  res.details = {{"models", per_model}};
  return res;
}

inline CriterionResult sl2_cut(const AcceptanceOptions&) {
  CriterionResult res{3, "sl2 cut analysis"};
  res.time_limit = 10.0;
  const auto rep = cut::sl2_cut_analysis(1e-6);
  res.pass = rep.pass && rep.r2_error <= 1e-6 && rep.ordering_holds && rep.f1g_residual <= 1e-6;
  res.summary = "r2 - 8 pi^2 = " + sci(rep.r2_error) + ", r2 < r3 <= r1 " + (rep.ordering_holds ? "holds" : "fails") +
                ", identity residual " + sci(rep.f1g_residual);
  res.details = sascomp::to_json(rep);
  return res;
}

inline CriterionResult volume_oracle(const AcceptanceOptions&) {
  CriterionResult res{4, "volume oracle equivalence"};
  res.time_limit = 300.0;
  const std::vector<std::pair<ModelSpace, std::vector<double>>> cases = {
      {{ModelKind::Heisenberg, 1.0}, {0.5, 1.0, 2.0}},
      {{ModelKind::SU2, 1.0}, {1.0, 3.0, 6.0}},
      {{ModelKind::SL2, 1.0}, {1.0, 4.0, 8.0}},
  };
  double worst = 0.0;
  Json rows = Json::array();
  for (const auto& [m, radii] : cases)
    for (double R : radii) {
      const auto a = ball_volume(m, R);
      const auto b = ball_volume_exp_oracle(m, R, 64);
      const double rel = std::abs(a.volume - b.volume) / a.volume;
      worst = std::max(worst, rel);
      rows.push_back({{"model", sascomp::to_json(m)}, {"R", R}, {"closed_form", a.volume}, {"oracle", b.volume},
                      {"relative_error", rel}});
    }
  const ModelSpace heis{ModelKind::Heisenberg, 1.0};
  const double ratio = ball_volume(heis, 2.0).volume / ball_volume(heis, 1.0).volume;
  res.pass = worst <= 1e-3 && std::abs(ratio - 16.0) <= 1e-3;
  res.summary = "max relative error " + sci(worst) + " <= 1e-3, Heisenberg vol(2R)/vol(R) - 16 = " +
                sci(ratio - 16.0);
  res.details = {{"rows", rows}, {"heisenberg_scaling", ratio}};
  return res;
}

inline CriterionResult bishop_ordering(const AcceptanceOptions&) {
  CriterionResult res{5, "bishop ordering"};
  const std::vector<double> ks = {-1.0, -0.5, 0.0, 0.5, 1.0};
  double order_margin = std::numeric_limits<double>::infinity(), equality = 0.0;
  bool comparisons = true;
  Json rows = Json::array();
  for (double R : {0.5, 1.0, 2.0, 4.0, 6.0}) {
    std::vector<double> v;
    for (double k : ks) v.push_back(ball_volume(space_form(k), R).volume);
    for (std::size_t i = 0; i + 1 < v.size(); ++i) order_margin = std::min(order_margin, (v[i] - v[i + 1]) / v[i]);
    for (double k : ks) equality = std::max(equality, std::abs(bishop_check(k, space_form(k), R).samples.front().margin));
    const bool su2 = bishop_check(0.0, {ModelKind::SU2, 1.0}, R).pass();
    const bool heis = bishop_check(-1.0, {ModelKind::Heisenberg, 1.0}, R).pass();
    comparisons = comparisons && su2 && heis;
    rows.push_back({{"R", R}, {"volumes", v}, {"su2_vs_0", su2}, {"heisenberg_vs_minus1", heis}});
  }
  res.pass = order_margin >= -2e-6 && equality <= 2e-6 && comparisons;
  res.summary = "min ordering margin " + sci(order_margin) + " >= -2e-6, equality case " + sci(equality) +
                " <= 2e-6, model comparisons " + (comparisons ? "pass" : "fail");
  res.details = {{"k", ks}, {"rows", rows}, {"equality_margin", equality}, {"order_margin", order_margin}};
  return res;
}

inline double laplacian_margin(const ComparisonReport& rep) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : rep.samples)
    if (s.label == "Delta_H r vs space form") m = std::min(m, s.margin);
  return m;
}

inline CriterionResult hessian_laplacian(const AcceptanceOptions& opt) {
  CriterionResult res{6, "hessian and sub-laplacian"};
  double entry = 0.0, identities = 0.0, structure = 0.0;
  Json per_model = Json::array();
  for (const ModelSpace m : {ModelSpace{ModelKind::Heisenberg, 1.0}, ModelSpace{ModelKind::SU2, 1.0},
                             ModelSpace{ModelKind::SL2, 1.0}}) {
    double e = 0.0, id = 0.0, st = 0.0;
    with_space(m, [&](const auto& space) {
      for (const Vec3& a : sample_interior_covectors(m, 50, opt.seed + 6)) {
        const auto s = hessian_sample(space, m, a);
        e = std::max(e, s.entry_error);
        id = std::max({id, s.symmetry_residual, s.trace_residual});
        st = std::max({st, std::abs(s.fd(2, 2) + 1.0), std::abs(s.fd(0, 2)), std::abs(s.fd(1, 2))});
      }
      return 0;
    });
    per_model.push_back({{"model", sascomp::to_json(m)}, {"entry_error", e}, {"identity_residual", id},
                         {"structure_error", st}});
    entry = std::max(entry, e);
    identities = std::max(identities, id);
    structure = std::max(structure, st);
  }
  const ModelSpace su2{ModelKind::SU2, 1.0}, sl2{ModelKind::SL2, 1.0};
  const auto rep_su2 = laplacian_compare(su2_space(1.0), su2, 0.0, sample_interior_covectors(su2, 10, opt.seed + 60));
  const auto rep_sl2 = laplacian_compare(sl2_space(1.0), sl2, 0.0, sample_interior_covectors(sl2, 10, opt.seed + 61));
  const double lap_margin = std::min(laplacian_margin(rep_su2), laplacian_margin(rep_sl2));
  const bool signed_ok = rep_su2.pass() && rep_sl2.pass() && lap_margin > 0.0;
  res.pass = entry <= 1e-3 && identities <= 1e-8 && structure <= 1e-6 && signed_ok;
  res.summary = "150 points, entry error " + sci(entry) + " <= 1e-3, symmetry/trace " + sci(identities) +
                " <= 1e-8, H33/H13/H23 " + sci(structure) + " <= 1e-6, comparison signs " +
                (signed_ok ? "correct" : "wrong") + " (min Laplacian margin " + sci(lap_margin) + ")";
  res.details = {{"models", per_model},
                 {"su2_vs_0", sascomp::to_json(rep_su2)},
                 {"sl2_vs_0", sascomp::to_json(rep_sl2)}};
  return res;
}

inline CriterionResult cheeger_yau(const AcceptanceOptions& opt) {
  CriterionResult res{7, "cheeger-yau comparison"};
  res.time_limit = 600.0;
  double barrier_residual = 0.0;
  for (int i = 0; i <= 40; ++i)
    for (int j = 0; j <= 49; ++j)
      barrier_residual = std::max(barrier_residual, std::abs(remark_residual(2.0 * i / 40, 0.1 + 4.9 * j / 49, 0.1)));

  const int fine = opt.heat_grid;
  const std::vector<int> levels = {fine / 2, (3 * fine) / 4, fine};
  std::vector<double> margins;
  bool hypotheses = true;
  Json study = Json::array();
  for (int n : levels) {
    CheegerYauSetup cfg;
    cfg.n = n;
    const auto run = cheeger_yau_pipeline(cfg);
    margins.push_back(run.report.min_margin());
    hypotheses = hypotheses && run.report.hypotheses_hold;
    study.push_back({{"n", n}, {"min_margin", run.report.min_margin()}, {"hypotheses_hold", run.report.hypotheses_hold},
                     {"steps", run.solution.steps}, {"dt", run.solution.dt}});
  }
  const double fine_margin = margins.back();
  const bool stable = fine_margin >= margins[margins.size() - 2] - 1e-6;
  res.pass = barrier_residual <= 1e-10 && hypotheses && fine_margin >= -1e-6 && stable;
  res.summary = "barrier residual " + sci(barrier_residual) + " <= 1e-10, min(u - h(r)) at n = " + std::to_string(levels[0]) +
                "/" + std::to_string(levels[1]) + "/" + std::to_string(levels[2]) + ": " + sci(margins[0]) + "/" +
                sci(margins[1]) + "/" + sci(margins[2]) + ", need >= -1e-6" +
                (stable ? ", non-degrading" : ", degrading");
  res.details = {{"barrier_residual", barrier_residual}, {"refinement", study}, {"tolerance", 1e-6}};
  return res;
}

inline CriterionResult riccati_comparison(const AcceptanceOptions& opt) {
  CriterionResult res{8, "riccati comparison property"};
  std::mt19937_64 rng(opt.seed + 8);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int passed = 0, det_ok = 0;
  double worst = std::numeric_limits<double>::infinity();
  const int profiles = 200;
  for (int p = 0; p < profiles; ++p) {
    const double k0 = -2.0 + 3.0 * U(rng), amp = 0.5 * U(rng), freq = 1.0 + 4.0 * U(rng), phase = kTwoPi * U(rng);
    const double h0 = -1.0 + 2.0 * U(rng), H = 0.1 + 0.9 * U(rng);
    std::array<double, 3> b{}, m{};
    for (int j = 0; j < 3; ++j) {
      b[static_cast<std::size_t>(j)] = U(rng);
      m[static_cast<std::size_t>(j)] = 0.5 + 2.5 * U(rng);
    }
    auto kappa_lo = [=](double t) { return k0 + amp * std::sin(freq * t + phase); };
    auto kappa_up = [=](double t) {
      double v = kappa_lo(t);
      for (std::size_t j = 0; j < 3; ++j) v += b[j] * std::pow(std::sin(kPi * m[j] * t), 2);
      return v;
    };
    const double kmax = k0 + amp + b[0] + b[1] + b[2];
    const double sigma_max = h0 * h0 + 2.0 * H * kmax;
    const double T = sigma_max > 0.0 ? std::min(1.0, 0.9 * (0.5 * kPi) / std::sqrt(sigma_max)) : 1.0;
    std::vector<double> times(41);
    for (std::size_t i = 0; i < times.size(); ++i) times[i] = T * static_cast<double>(i) / 40.0;
    const auto rep = riccati_compare(sasakian_profile(h0, H, kappa_lo), sasakian_profile(h0, H, kappa_up), times);
    if (rep.pass()) ++passed;
    bool det = rep.hypotheses_hold;
    for (const auto& s : rep.samples)
      if (s.label.rfind("det ratio", 0) == 0) det = det && s.pass;
    if (det) ++det_ok;
    worst = std::min(worst, rep.min_margin());
  }
  res.pass = passed == profiles && det_ok == profiles;
  res.summary = "eigen-order holds on " + std::to_string(passed) + "/" + std::to_string(profiles) +
                ", det-ratio monotone on " + std::to_string(det_ok) + "/" + std::to_string(profiles) +
                ", min margin " + sci(worst);
  res.details = {{"profiles", profiles}, {"passed", passed}, {"det_ratio_ok", det_ok}, {"min_margin", worst}};
  return res;
}

using CriterionFn = std::function<CriterionResult(const AcceptanceOptions&)>;

inline std::vector<CriterionFn> criteria() {
  return {riccati_closed_forms, curvature_identity, sl2_cut,          volume_oracle,
          bishop_ordering,      hessian_laplacian,  cheeger_yau,      riccati_comparison};
}

/// Runs one criterion with timing; exceptions become failures.
inline CriterionResult run_one(int id, const AcceptanceOptions& opt) {
  const auto all = criteria();
  if (id < 1 || id > static_cast<int>(all.size()))
    throw Error(ErrorKind::InvalidConfig, "no acceptance criterion " + std::to_string(id));
  const auto start = std::chrono::steady_clock::now();
  CriterionResult res;
  try {
    res = all[static_cast<std::size_t>(id - 1)](opt);
  } catch (const std::exception& e) {
    res.id = id;
    res.name = "criterion " + std::to_string(id);
    res.pass = false;
    res.summary = std::string("error: ") + e.what();
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (res.time_limit > 0.0 && res.seconds > res.time_limit) {
    res.pass = false;
    res.summary += ", over the " + std::to_string(static_cast<int>(res.time_limit)) + " s budget";
  }
  return res;
}

}  // namespace acceptance

/// Runs the selected criteria (all when `ids` is empty), printing one line per criterion.
inline std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt, std::ostream* out = nullptr,
                                                   std::vector<int> ids = {}) {
  if (ids.empty())
    for (int i = 1; i <= static_cast<int>(acceptance::criteria().size()); ++i) ids.push_back(i);
  std::vector<CriterionResult> results;
  for (int id : ids) {
    results.push_back(acceptance::run_one(id, opt));
    if (out) *out << acceptance::format_line(results.back()) << std::endl;
  }
  return results;
}

inline Json acceptance_report(const std::vector<CriterionResult>& results, const AcceptanceOptions& opt) {
  Json doc = document("selftest");
  bool all = true;
  Json list = Json::array();
  for (const auto& r : results) {
    all = all && r.pass;
    list.push_back(acceptance::to_json(r));
  }
  doc["seed"] = opt.seed;
  doc["pass"] = all;
  doc["criteria"] = list;
  return doc;
}

}  // namespace sascomp

#endif  // SASCOMP_ACCEPTANCE_HPP
