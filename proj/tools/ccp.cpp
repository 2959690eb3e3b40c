#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ccp/io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Chance-constrained stochastic LP toolkit"};
  app.require_subcommand(1);

  ccp::RunConfig config;
  std::vector<std::string> alpha_tokens;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--spec", config.spec_path, "problem spec file");
    sub->add_option("--samples", config.sample_paths, "sample data files");
    sub->add_option("--alpha", alpha_tokens,
                    "risk level override: one value or one per constraint")
        ->delimiter(',');
    sub->add_option("--k1", config.k1, "objective weight k1 (k2 = 1 - k1)");
    sub->add_option("--seed", config.seed, "RNG seed");
    sub->add_option("--format", config.format, "output format: table|structured")
        ->check(CLI::IsMember({"table", "structured"}));
    sub->add_option("--tol-feas", config.solver.feasibility_tol, "feasibility tolerance");
    sub->add_option("--tol-kkt", config.solver.kkt_tol, "KKT tolerance");
    sub->add_option("--generator", config.generator,
                    "elliptical generator id, e.g. normal, pearson7(5)");
    sub->add_option("--reps", config.replications, "Monte Carlo replications");
    sub->add_option("--per-sample-n", config.per_sample_n, "per-replication sample size");
  };

  for (const std::string name :
       {"estimate", "transform", "solve", "pareto", "validate", "reproduce"}) {
    CLI::App* sub = app.add_subcommand(name);
    add_common(sub);
    if (name == "solve")
      sub->add_option("--warm-check", config.warm_check_path,
                      "prior structured report to re-verify instead of solving");
    if (name == "reproduce") {
      sub->add_option("target", config.reproduce_target, "example1..example4")->required();
      sub->add_option("--data", config.data_dir, "fixtures directory");
      sub->add_flag("--pareto", config.pareto, "sweep the weight grid for this example");
    }
  }

  CLI11_PARSE(app, argc, argv);
  config.subcommand = app.get_subcommands().front()->get_name();
  for (const auto& tok : alpha_tokens) {
    try {
      config.alphas.push_back(std::stod(tok));
    } catch (const std::exception&) {
      std::cerr << "--alpha: invalid number '" << tok << "'\n";
      return 1;
    }
  }
  return ccp::run(config, std::cout, std::cerr);
}
