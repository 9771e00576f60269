#include "knnb/emit.hpp"

#include <charconv>

namespace knnb {

std::string format_double(double v) {
  char buf[40];
  const auto res =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string rounds_csv(std::span<const RoundRecord> rounds) {
  std::string out =
      "t,chosen_arm,k_chosen,reward,oracle_arm,oracle_reward,regret,"
      "pseudo_regret,cum_regret,cum_pseudo_regret\n";
  for (const RoundRecord& r : rounds) {
    out += std::to_string(r.t);
    out += ',';
    out += std::to_string(r.chosen_arm);
    out += ',';
    out += std::to_string(r.k_chosen);
    out += ',';
    out += format_double(r.reward);
    out += ',';
    out += std::to_string(r.oracle_arm);
    out += ',';
    out += format_double(r.oracle_reward);
    out += ',';
    out += format_double(r.regret);
    out += ',';
    out += format_double(r.pseudo_regret);
    out += ',';
    out += format_double(r.cum_regret);
    out += ',';
    out += format_double(r.cum_pseudo_regret);
    out += '\n';
  }
  return out;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::string out = "horizon,policy,mean_regret,stderr,mean_pseudo_regret\n";
  for (const SweepRow& r : rows) {
    out += std::to_string(r.horizon);
    out += ',';
    out += r.policy;
    out += ',';
    out += format_double(r.mean_regret);
    out += ',';
    out += format_double(r.std_error);
    out += ',';
    out += format_double(r.mean_pseudo_regret);
    out += '\n';
  }
  return out;
}

nlohmann::ordered_json summary_json(const RunConfig& run, const RunSummary& summary) {
  nlohmann::ordered_json reps = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < summary.final_regret.size(); ++r)
    reps.push_back({{"replication", r},
                    {"final_regret", summary.final_regret[r]},
                    {"final_pseudo_regret", summary.final_pseudo_regret[r]}});

  nlohmann::ordered_json trajectory = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < summary.checkpoint_t.size(); ++i)
    trajectory.push_back({{"t", summary.checkpoint_t[i]},
                          {"mean_cum_regret", summary.checkpoint_mean_regret[i]},
                          {"mean_cum_pseudo_regret",
                           summary.checkpoint_mean_pseudo_regret[i]}});

  return nlohmann::ordered_json{
      {"artifact", {{"name", kArtifactName}, {"version", kArtifactVersion}}},
      {"config", resolved_config_json(run)},
      {"seeds",
       {{"master_seed", run.master_seed},
        {"stream_rule", "env=2*rep, policy=2*rep+1"}}},
      {"replications", reps},
      {"aggregate",
       {{"mean_regret", summary.mean_regret},
        {"stderr_regret", summary.stderr_regret},
        {"mean_pseudo_regret", summary.mean_pseudo_regret},
        {"stderr_pseudo_regret", summary.stderr_pseudo_regret}}},
      {"trajectory", trajectory},
  };
}

nlohmann::ordered_json concentration_json(std::span<const ViolationReport> reports) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const ViolationReport& r : reports)
    out.push_back({{"envelope", r.envelope},
                   {"z", r.z_dist},
                   {"scheme", r.scheme},
                   {"delta", r.delta},
                   {"n", r.n},
                   {"replications", r.replications},
                   {"violations", r.violations},
                   {"rate", r.rate},
                   {"bound", r.bound},
                   {"three_sigma", r.three_sigma},
                   {"pass", r.pass}});
  return out;
}

}  // namespace knnb
