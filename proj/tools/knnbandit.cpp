#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "knnb/commands.hpp"
#include "knnb/emit.hpp"

int main(int argc, char** argv) {
  CLI::App app{"k-nearest-neighbour contextual bandit simulator"};
  app.set_version_flag("--version", std::string(knnb::kArtifactVersion));
  app.require_subcommand(1);

  knnb::RunOptions run_opts;
  CLI::App* run = app.add_subcommand("run", "simulate one configured experiment");
  run->add_option("-c,--config", run_opts.config_path, "run-config JSON file")
      ->required();
  std::int64_t horizon_flag = 0;
  std::uint64_t seed_flag = 0;
  double theta_flag = 0.0;
  std::string out_flag;
  CLI::Option* horizon_opt =
      run->add_option("--horizon", horizon_flag, "override config horizon");
  CLI::Option* seed_opt =
      run->add_option("--seed", seed_flag, "override config master_seed");
  CLI::Option* theta_opt =
      run->add_option("--theta", theta_flag, "override policy theta");
  CLI::Option* out_opt =
      run->add_option("--out", out_flag, "output directory (overrides config)");

  knnb::SweepOptions sweep_opts;
  CLI::App* sweep =
      app.add_subcommand("sweep", "regret-vs-horizon curves for one or more policies");
  sweep->add_option("-c,--config", sweep_opts.config_path, "run-config JSON file")
      ->required();
  sweep->add_option("--horizons", sweep_opts.horizons, "ascending horizons")
      ->required()
      ->delimiter(',');
  sweep->add_option("--policies", sweep_opts.policies,
                    "policy kinds (default: the config's policy)")
      ->delimiter(',');
  std::uint64_t sweep_seed_flag = 0;
  std::string sweep_out_flag;
  CLI::Option* sweep_seed_opt =
      sweep->add_option("--seed", sweep_seed_flag, "override config master_seed");
  CLI::Option* sweep_out_opt =
      sweep->add_option("--out", sweep_out_flag, "output directory (overrides config)");

  knnb::ConcentrationOptions conc_opts;
  CLI::App* conc = app.add_subcommand(
      "concentration", "Monte Carlo falsification of the self-normalized tail bound");
  conc->add_option("--envelope", conc_opts.envelope,
                   "gaussian | bernoulli | quarter_square")
      ->capture_default_str();
  double xi_max_flag = 0.0;
  double p_flag = 0.0;
  CLI::Option* xi_opt =
      conc->add_option("--xi-max", xi_max_flag, "bernoulli envelope parameter");
  CLI::Option* p_opt =
      conc->add_option("--p", p_flag, "bernoulli summand mean (default: xi-max)");
  conc->add_option("--n", conc_opts.n, "rounds per trajectory")->capture_default_str();
  conc->add_option("--delta", conc_opts.deltas, "tail levels, each > 1")
      ->required()
      ->delimiter(',');
  conc->add_option("--schemes", conc_opts.schemes,
                   "always_on | iid_coin | adaptive_sign | adaptive_count "
                   "(default: all)")
      ->delimiter(',');
  conc->add_option("--replications", conc_opts.replications, "Monte Carlo replications")
      ->capture_default_str();
  conc->add_option("--seed", conc_opts.seed, "master seed")->capture_default_str();
  conc->add_option("--coin-q", conc_opts.coin_q, "iid_coin inclusion probability")
      ->capture_default_str();
  std::string conc_out_flag;
  CLI::Option* conc_out_opt =
      conc->add_option("--out", conc_out_flag, "report file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? knnb::kExitOk : knnb::kExitValidation;
  }

  if (run->parsed()) {
    if (*horizon_opt) run_opts.horizon = horizon_flag;
    if (*seed_opt) run_opts.seed = seed_flag;
    if (*theta_opt) run_opts.theta = theta_flag;
    if (*out_opt) run_opts.out_dir = out_flag;
    return knnb::cmd_run(run_opts, std::cerr);
  }
  if (sweep->parsed()) {
    if (*sweep_seed_opt) sweep_opts.seed = sweep_seed_flag;
    if (*sweep_out_opt) sweep_opts.out_dir = sweep_out_flag;
    return knnb::cmd_sweep(sweep_opts, std::cerr);
  }
  if (conc->parsed()) {
    if (*xi_opt) conc_opts.xi_max = xi_max_flag;
    if (*p_opt) conc_opts.p = p_flag;
    if (*conc_out_opt) conc_opts.out_path = conc_out_flag;
    return knnb::cmd_concentration(conc_opts, std::cout, std::cerr);
  }
  return knnb::kExitValidation;
}
