#include "slateq/config.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace slateq {
namespace {

namespace pt = boost::property_tree;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double x = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (!t.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, last, x);
  if (t.empty() || res.ec != std::errc() || res.ptr != last) {
    throw std::invalid_argument("key '" + key + "': expected a number, got '" +
                                text + "'");
  }
  return x;
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  Int x = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), x);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw std::invalid_argument("key '" + key + "': expected an integer, got '" +
                                text + "'");
  }
  return x;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += items[i];
  }
  return out;
}

std::string join_doubles(const std::vector<double>& xs) {
  std::vector<std::string> parts;
  for (double x : xs) parts.push_back(fmt_double(x));
  return join(parts);
}

std::string join_ints(const std::vector<int>& xs) {
  std::vector<std::string> parts;
  for (int x : xs) parts.push_back(std::to_string(x));
  return join(parts);
}

// Reads known keys out of one section and rejects leftovers.
class Section {
 public:
  Section(std::string name, const pt::ptree* tree)
      : name_(std::move(name)), tree_(tree) {}

  const std::string* get(const std::string& key) {
    consumed_.insert(key);
    if (tree_ == nullptr) return nullptr;
    const auto it = tree_->find(key);
    if (it == tree_->not_found()) return nullptr;
    return &it->second.data();
  }

  std::string qualified(const std::string& key) const {
    return name_.empty() ? key : name_ + "." + key;
  }

  void read(const std::string& key, double& out) {
    if (const auto* v = get(key)) out = parse_double(qualified(key), *v);
  }
  template <typename Int>
  void read_int(const std::string& key, Int& out) {
    if (const auto* v = get(key)) out = parse_int<Int>(qualified(key), *v);
  }

  void finish() const {
    if (tree_ == nullptr) return;
    for (const auto& [key, child] : *tree_) {
      if (!child.empty()) continue;  // sections handled by the caller
      if (!consumed_.count(key)) {
        throw std::invalid_argument("unknown config key '" + qualified(key) + "'");
      }
    }
  }

 private:
  std::string name_;
  const pt::ptree* tree_;
  std::set<std::string> consumed_;
};

ChoiceModel parse_choice_model(const std::string& s) {
  if (s == "conditional") return ChoiceModel::kConditional;
  if (s == "cascade") return ChoiceModel::kCascade;
  throw std::invalid_argument("env.choice_model: expected conditional|cascade, got '" +
                              s + "'");
}

CascadeMode parse_cascade_mode(const std::string& s) {
  if (s == "sequential") return CascadeMode::kSequential;
  if (s == "marginal") return CascadeMode::kMarginal;
  throw std::invalid_argument("env.cascade_mode: expected sequential|marginal, got '" +
                              s + "'");
}

NudgeRule parse_nudge_rule(const std::string& s) {
  if (s == "entrenchment") return NudgeRule::kEntrenchment;
  if (s == "literal") return NudgeRule::kLiteral;
  throw std::invalid_argument("env.nudge_rule: expected entrenchment|literal, got '" +
                              s + "'");
}

void read_env(Section& sec, EnvParams& env) {
  // Catalog: either explicit per-topic means or the generator parameters.
  int num_low = 14, num_high = 6;
  double low_min = -3.0, high_max = 3.0;
  double stddev = env.catalog.quality_stddev;
  bool generated = false;
  auto mark = [&](const std::string& key, auto& out) {
    if (const auto* v = sec.get(key)) {
      generated = true;
      if constexpr (std::is_same_v<std::decay_t<decltype(out)>, int>) {
        out = parse_int<int>(sec.qualified(key), *v);
      } else {
        out = parse_double(sec.qualified(key), *v);
      }
    }
  };
  mark("num_low_topics", num_low);
  mark("num_high_topics", num_high);
  mark("low_quality_min", low_min);
  mark("high_quality_max", high_max);
  sec.read("quality_stddev", stddev);
  const std::string* means = sec.get("topic_means");
  if (means != nullptr && generated) {
    throw std::invalid_argument(
        "env.topic_means cannot be combined with the topic generator keys");
  }
  if (means != nullptr) {
    env.catalog.mean_quality.clear();
    for (const std::string& m : split_list(*means)) {
      env.catalog.mean_quality.push_back(parse_double("env.topic_means", m));
    }
    env.catalog.quality_stddev = stddev;
  } else {
    const double clamp = env.catalog.quality_clamp;
    env.catalog = TopicCatalog::make_default(num_low, num_high, low_min, high_max,
                                             stddev);
    env.catalog.quality_clamp = clamp;
  }
  sec.read("quality_clamp", env.catalog.quality_clamp);

  DynamicsParams& d = env.dynamics;
  sec.read("initial_budget", d.initial_budget);
  sec.read("doc_length", d.doc_length);
  sec.read("no_click_cost", d.no_click_cost);
  sec.read("bonus_coeff", d.bonus_coeff);
  sec.read("alpha", d.alpha);
  sec.read("nudge_fraction", d.nudge_fraction);
  sec.read("click_reward", d.click_reward);
  if (const auto* v = sec.get("nudge_rule")) d.nudge_rule = parse_nudge_rule(trim(*v));

  if (const auto* v = sec.get("choice_model")) {
    env.choice_model = parse_choice_model(trim(*v));
  }
  if (const auto* v = sec.get("cascade_mode")) {
    env.cascade_mode = parse_cascade_mode(trim(*v));
  }
  sec.read("cascade_base_inspect", env.cascade.base_inspect);
  sec.read("cascade_decay", env.cascade.decay);
  sec.read("null_score", env.null_score);
  sec.read("score_offset", env.score_offset);
  sec.read_int("num_candidates", env.num_candidates);
  sec.read_int("slate_size", env.slate_size);
}

}  // namespace

void ExperimentConfig::validate() const {
  env.validate();
  qmodel.validate();
  schedule.validate();
  if (variants.empty()) throw std::invalid_argument("agent.variants is empty");
  std::set<std::string> seen;
  for (const std::string& name : variants) {
    AgentConfig::from_name(name, gamma, epsilon);
    if (!seen.insert(name).second) {
      throw std::invalid_argument("agent variant '" + name + "' listed twice");
    }
  }
}

std::string ExperimentConfig::serialize() const {
  std::ostringstream out;
  out << "seed = " << seed << "\n\n";
  out << "[env]\n";
  out << "topic_means = " << join_doubles(env.catalog.mean_quality) << "\n";
  out << "quality_stddev = " << fmt_double(env.catalog.quality_stddev) << "\n";
  out << "quality_clamp = " << fmt_double(env.catalog.quality_clamp) << "\n";
  const DynamicsParams& d = env.dynamics;
  out << "initial_budget = " << fmt_double(d.initial_budget) << "\n";
  out << "doc_length = " << fmt_double(d.doc_length) << "\n";
  out << "no_click_cost = " << fmt_double(d.no_click_cost) << "\n";
  out << "bonus_coeff = " << fmt_double(d.bonus_coeff) << "\n";
  out << "alpha = " << fmt_double(d.alpha) << "\n";
  out << "nudge_fraction = " << fmt_double(d.nudge_fraction) << "\n";
  out << "click_reward = " << fmt_double(d.click_reward) << "\n";
  out << "nudge_rule = "
      << (d.nudge_rule == NudgeRule::kEntrenchment ? "entrenchment" : "literal")
      << "\n";
  out << "choice_model = "
      << (env.choice_model == ChoiceModel::kConditional ? "conditional" : "cascade")
      << "\n";
  out << "cascade_mode = "
      << (env.cascade_mode == CascadeMode::kSequential ? "sequential" : "marginal")
      << "\n";
  out << "cascade_base_inspect = " << fmt_double(env.cascade.base_inspect) << "\n";
  out << "cascade_decay = " << fmt_double(env.cascade.decay) << "\n";
  out << "null_score = " << fmt_double(env.null_score) << "\n";
  out << "score_offset = " << fmt_double(env.score_offset) << "\n";
  out << "num_candidates = " << env.num_candidates << "\n";
  out << "slate_size = " << env.slate_size << "\n\n";
  out << "[agent]\n";
  out << "variants = " << join(variants) << "\n";
  out << "gamma = " << fmt_double(gamma) << "\n";
  out << "epsilon = " << fmt_double(epsilon) << "\n";
  out << "hidden = " << join_ints(qmodel.hidden) << "\n";
  out << "learning_rate = " << fmt_double(qmodel.learning_rate) << "\n";
  out << "batch_size = " << qmodel.batch_size << "\n";
  out << "buffer_capacity = " << qmodel.buffer_capacity << "\n";
  out << "label_sync_period = " << qmodel.label_sync_period << "\n";
  out << "update_period = " << qmodel.update_period << "\n";
  out << "min_replay = " << qmodel.min_replay << "\n\n";
  out << "[schedule]\n";
  out << "train_steps = " << schedule.train_steps << "\n";
  out << "eval_every = " << schedule.eval_every << "\n";
  out << "eval_users = " << schedule.eval_users << "\n";
  out << "final_eval_users = " << schedule.final_eval_users << "\n";
  out << "smoothing = " << fmt_double(schedule.smoothing) << "\n";
  return out.str();
}

std::string ExperimentConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void ExperimentConfig::apply_full_scale() {
  schedule.train_steps = 300'000;
  schedule.final_eval_users = 5'000;
}

ExperimentConfig parse_config(const std::string& text) {
  // '#' comments are accepted in addition to the INI parser's ';'.
  std::string cleaned;
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    const std::string t = trim(line);
    if (!t.empty() && t[0] == '#') continue;
    cleaned += line;
    cleaned += '\n';
  }
  pt::ptree tree;
  try {
    std::istringstream in(cleaned);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::runtime_error(std::string("config syntax error: ") + e.what());
  }

  for (const auto& [key, child] : tree) {
    if (!child.empty() && key != "env" && key != "agent" && key != "schedule") {
      throw std::invalid_argument("unknown config section [" + key + "]");
    }
  }
  auto section = [&](const std::string& name) -> const pt::ptree* {
    const auto it = tree.find(name);
    return it == tree.not_found() ? nullptr : &it->second;
  };

  ExperimentConfig cfg;
  Section top("", &tree);
  top.read_int("seed", cfg.seed);
  top.get("env");
  top.get("agent");
  top.get("schedule");
  top.finish();

  Section env("env", section("env"));
  read_env(env, cfg.env);
  env.finish();

  Section agent("agent", section("agent"));
  if (const auto* v = agent.get("variants")) cfg.variants = split_list(*v);
  agent.read("gamma", cfg.gamma);
  agent.read("epsilon", cfg.epsilon);
  if (const auto* v = agent.get("hidden")) {
    cfg.qmodel.hidden.clear();
    for (const std::string& h : split_list(*v)) {
      cfg.qmodel.hidden.push_back(parse_int<int>("agent.hidden", h));
    }
  }
  agent.read("learning_rate", cfg.qmodel.learning_rate);
  agent.read_int("batch_size", cfg.qmodel.batch_size);
  agent.read_int("buffer_capacity", cfg.qmodel.buffer_capacity);
  agent.read_int("label_sync_period", cfg.qmodel.label_sync_period);
  agent.read_int("update_period", cfg.qmodel.update_period);
  agent.read_int("min_replay", cfg.qmodel.min_replay);
  agent.finish();

  Section sched("schedule", section("schedule"));
  sched.read_int("train_steps", cfg.schedule.train_steps);
  sched.read_int("eval_every", cfg.schedule.eval_every);
  sched.read_int("eval_users", cfg.schedule.eval_users);
  sched.read_int("final_eval_users", cfg.schedule.final_eval_users);
  sched.read("smoothing", cfg.schedule.smoothing);
  sched.finish();

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace slateq
