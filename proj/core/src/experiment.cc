#include "slateq/experiment.h"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace slateq {
namespace {

std::string fmt(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string header_line(const ExperimentConfig& config) {
  return "# config_hash=" + config.hash() + " seed=" + std::to_string(config.seed) +
         "\n";
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::string timing_csv(const ExperimentConfig& config,
                       const std::vector<MetricsRow>& rows) {
  std::string out = header_line(config);
  out += "agent_name,wall_clock_s,seconds_per_step,train_steps,gradient_steps\n";
  for (const MetricsRow& r : rows) {
    out += r.agent_name + "," + fmt(r.wall_clock_s) + "," + fmt(r.seconds_per_step) +
           "," + std::to_string(r.train_steps) + "," +
           std::to_string(r.gradient_steps) + "\n";
  }
  return out;
}

std::string curve_csv(const ExperimentConfig& config,
                      const std::vector<CurvePoint>& curve) {
  std::string out = header_line(config);
  out += "step,smoothed_return\n";
  for (const CurvePoint& p : curve) {
    out += std::to_string(p.step) + "," + fmt(p.smoothed_return) + "\n";
  }
  return out;
}

}  // namespace

std::uint64_t final_eval_seed(std::uint64_t seed) { return derive_seed(seed, 7); }

std::uint64_t training_seed(std::uint64_t seed, const std::string& agent_name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : agent_name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return derive_seed(seed, h);
}

std::string metrics_csv(const ExperimentConfig& config,
                        const std::vector<MetricsRow>& rows) {
  std::string out = header_line(config);
  out +=
      "agent_name,avg_return,avg_quality,pct_return_vs_baseline,"
      "pct_quality_vs_baseline,train_steps,seed\n";
  for (const MetricsRow& r : rows) {
    out += r.agent_name + "," + fmt(r.avg_return) + "," + fmt(r.avg_quality) + "," +
           fmt(r.pct_return_vs_baseline) + "," + fmt(r.pct_quality_vs_baseline) +
           "," + std::to_string(r.train_steps) + "," + std::to_string(r.seed) + "\n";
  }
  return out;
}

SuiteResult run_suite(const ExperimentConfig& config,
                      const std::filesystem::path& out_dir) {
  config.validate();
  std::vector<std::string> order = {"RANDOM"};
  for (const std::string& name : config.variants) {
    if (name != "RANDOM") order.push_back(name);
  }
  const bool write = !out_dir.empty();
  if (write) std::filesystem::create_directories(out_dir);

  SuiteResult suite;
  const std::uint64_t eval_seed = final_eval_seed(config.seed);
  for (const std::string& name : order) {
    const AgentConfig agent_cfg =
        AgentConfig::from_name(name, config.gamma, config.epsilon);
    TrainingResult trained =
        run_training(agent_cfg, config.qmodel, config.env, config.schedule,
                     training_seed(config.seed, name));
    const Metrics m = evaluate(trained.agent, config.schedule.final_eval_users,
                               config.env, eval_seed);

    MetricsRow row;
    row.agent_name = name;
    row.avg_return = m.avg_return;
    row.avg_quality = m.avg_quality;
    row.train_steps = trained.counters.env_steps;
    row.seed = config.seed;
    row.wall_clock_s = trained.train_seconds;
    row.seconds_per_step =
        row.train_steps > 0 ? trained.train_seconds / static_cast<double>(row.train_steps)
                            : 0.0;
    row.gradient_steps = trained.counters.gradient_steps;
    const MetricsRow& base = suite.rows.empty() ? row : suite.rows.front();
    row.pct_return_vs_baseline = percent_improvement(row.avg_return, base.avg_return);
    row.pct_quality_vs_baseline =
        percent_improvement(row.avg_quality, base.avg_quality);
    suite.rows.push_back(row);

    if (write) {
      write_file(out_dir / ("curve_" + name + ".csv"),
                 curve_csv(config, trained.curve));
      write_file(out_dir / (name + ".ckpt.json"), agent_to_json(trained.agent));
      write_file(out_dir / "metrics.csv", metrics_csv(config, suite.rows));
      write_file(out_dir / "timing.csv", timing_csv(config, suite.rows));
    }
  }
  return suite;
}

}  // namespace slateq
