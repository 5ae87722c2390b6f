#include "sascomp/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

int main(int argc, char** argv) {
  using namespace sascomp;
  CLI::App app{"sascomp: numerical comparison geometry on three-dimensional Sasakian models"};
  app.require_subcommand(1);
  app.fallthrough();

  cli::RunConfig cfg;
  std::string model = "heisenberg";
  std::string format = "json";
  app.add_option("--model", model, "model space")->check(CLI::IsMember({"heisenberg", "su2", "sl2"}));
  app.add_option("--c", cfg.model.c, "metric scale; curvature 0, c^2 or -c^2");
  app.add_option("--R", cfg.R, "ball radius, geodesic length or outer heat radius");
  app.add_option("--k", cfg.k, "comparison curvature");
  app.add_option("--grid", cfg.grid, "resolution; meaning depends on the command");
  app.add_option("--tol", cfg.tol, "pass tolerance");
  app.add_option("--out", cfg.out, "output file or directory (default out/<command>.<format>)");
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", cfg.seed, "seed for sampled points");

  const std::map<std::string, std::string> help = {
      {"volume", "ball volume: closed form, exponential-map oracle and Bishop comparison"},
      {"geodesic", "trajectory of the normal geodesic with momenta (h0, R cos theta, R sin theta)"},
      {"cutlocus", "SL(2) cut-time infima and a sweep of the injectivity-domain boundary"},
      {"riccati", "closed-form Riccati solutions against the Jacobi system"},
      {"hessian", "finite-difference Hessian of -r^2/2 against its closed form"},
      {"compare", "sub-Laplacian and Hessian comparison against a space form"},
      {"heat", "Cheeger-Yau barrier check for the Heisenberg heat equation"},
      {"selftest", "the full acceptance suite"},
  };
  for (const auto& name : cli::commands()) {
    auto* sub = app.add_subcommand(name, help.at(name));
    if (name == "geodesic") {
      sub->add_option("--h0", cfg.h0, "Reeb momentum h0");
      sub->add_option("--theta", cfg.theta, "horizontal direction angle");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kInvalidConfig;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  cfg.model.kind = parse_model_kind(model);
  cfg.format = format == "csv" ? cli::Format::Csv : cli::Format::Json;
  return cli::run(cfg);
}
