#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hjive/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"jive: joint subspace estimation for multi-view data"};
  app.require_subcommand(1);

  std::string config, out_dir;
  auto* generate = app.add_subcommand("generate", "Synthesize a dataset and its ground truth");
  generate->add_option("--config", config, "Experiment config (JSON)")->required();
  generate->add_option("--out", out_dir, "Output directory")->required();

  hjive::EstimateRequest req;
  std::string est_out = ".";
  auto* estimate = app.add_subcommand("estimate", "Estimate the joint subspace from view files");
  estimate->add_option("--views", req.views, "View CSV files or glob patterns")->required();
  estimate->add_option("--ranks", req.ranks, "r,r1,...,rK")->required();
  estimate->add_option("--method", req.method, "heterojive, ajive or stacksvd")->capture_default_str();
  std::string weights;
  estimate->add_option("--weights", weights, "Fixed weights w1,...,wK");
  std::string truth;
  estimate->add_option("--truth", truth, "Directory holding U.csv");
  estimate->add_option("--out", est_out, "Output directory")->capture_default_str();

  hjive::EstimateRequest wreq;
  std::string w_out = ".";
  auto* weights_cmd = app.add_subcommand("weights", "Data-driven weights only");
  weights_cmd->add_option("--views", wreq.views, "View CSV files or glob patterns")->required();
  weights_cmd->add_option("--ranks", wreq.ranks, "r,r1,...,rK")->required();
  weights_cmd->add_option("--out", w_out, "Output directory")->capture_default_str();

  for (auto* cmd : {estimate, weights_cmd}) {
    auto& target = cmd == estimate ? req : wreq;
    cmd->add_option("--t-max", target.iteration.t_max, "Reweighting iterations")->capture_default_str();
    cmd->add_option("--tol", target.iteration.tol, "Reweighting l1 tolerance")->capture_default_str();
    cmd->add_flag("--refresh-each-iter", target.refresh_each_iter, "Re-fit the plug-in geometry every iterate");
  }

  std::string sim_config, sim_out;
  unsigned jobs = 1;
  auto* simulate = app.add_subcommand("simulate", "Run a replicated simulation grid");
  simulate->add_option("--config", sim_config, "Experiment config (JSON)")->required();
  simulate->add_option("--out", sim_out, "Output directory")->required();
  simulate->add_option("--jobs", jobs, "Worker threads")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*generate) return hjive::cmd_generate(config, out_dir, std::cout, std::cerr);
  if (*estimate) {
    if (!weights.empty()) req.weights = weights;
    if (!truth.empty()) req.truth = truth;
    req.out_dir = est_out;
    return hjive::cmd_estimate(req, std::cout, std::cerr);
  }
  if (*weights_cmd) {
    wreq.out_dir = w_out;
    return hjive::cmd_weights(wreq, std::cout, std::cerr);
  }
  return hjive::cmd_simulate(sim_config, sim_out, jobs, std::cout, std::cerr);
}
