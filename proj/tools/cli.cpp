#include <iostream>

#include <CLI11.hpp>

#include "ppmc/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"ppmc: gradient-based MCMC over stochastic log-density programs"};
  app.require_subcommand(1);

  ppmc::RunConfig run_cfg;
  CLI::App* run = app.add_subcommand(
      "run", "Sample one model/variant/sampler combination");
  ppmc::attach_run_options(*run, run_cfg);

  ppmc::CompareConfig cmp_cfg;
  CLI::App* compare = app.add_subcommand(
      "compare", "Check two sample files for consistent posterior means");
  ppmc::attach_compare_options(*compare, cmp_cfg);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      ppmc::validate(run_cfg);
      return ppmc::run_command(run_cfg);
    }
    return ppmc::compare_command(cmp_cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
