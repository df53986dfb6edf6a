// confreach solve|validate|export --config <path> [--out <dir>] [--degree d] [--alpha a ...]
#include <iostream>

#include <CLI11.hpp>

#include "confreach/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Alpha-confidence backwards reachable sets via sum-of-squares relaxations"};
  app.require_subcommand(1);

  confreach::CommandOptions opts;
  std::string out;
  int degree = 0;
  std::vector<double> alphas;

  auto add_common = [&](CLI::App* sub, bool with_alpha) {
    sub->add_option("--config", opts.config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "Output directory (overrides output_dir)");
    sub->add_option("--degree", degree, "Relaxation degree (overrides relaxation.degree)");
    if (with_alpha) sub->add_option("--alpha", alphas, "Confidence levels (overrides extraction.alpha)");
  };
  auto* solve = app.add_subcommand("solve", "Assemble and solve the relaxation, extract alpha sets");
  auto* validate = app.add_subcommand("validate", "Check solved alpha sets against Monte Carlo");
  auto* exp = app.add_subcommand("export", "Write the SDP in sparse SDPA format without solving");
  add_common(solve, true);
  add_common(validate, true);
  add_common(exp, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : confreach::kExitConfigError;
  }

  auto* sub = app.get_subcommands().front();
  if (!out.empty()) opts.out_dir = out;
  if (sub->count("--degree")) opts.degree = degree;
  if (sub->get_option_no_throw("--alpha") && sub->count("--alpha")) opts.alphas = alphas;

  if (sub == solve) return confreach::cmd_solve(opts, std::cerr);
  if (sub == validate) return confreach::cmd_validate(opts, std::cerr);
  return confreach::cmd_export(opts, std::cerr);
}
