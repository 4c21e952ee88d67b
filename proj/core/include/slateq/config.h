#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "slateq/agents.h"
#include "slateq/environment.h"

namespace slateq {

// One experiment suite: a shared environment, the agent variants to train
// and evaluate, and the training schedule.
//
// File format: INI-style key = value lines. `seed` sits at the top level;
// everything else lives under [env], [agent] or [schedule]. Lines starting
// with ';' or '#' are comments. Omitted keys keep their defaults, unknown
// keys are rejected. See README.md for the key list.
struct ExperimentConfig {
  std::uint64_t seed = 1;
  EnvParams env;
  std::vector<std::string> variants = {"RANDOM", "MYOP-TS", "SARSA-TS"};
  double gamma = 1.0;
  double epsilon = 0.1;
  QModelParams qmodel;
  Schedule schedule;

  // Throws std::invalid_argument on inconsistent settings (bad variant
  // names, k > m, ...).
  void validate() const;
  // Canonical text form; parse_config(serialize()) == *this.
  std::string serialize() const;
  // FNV-1a of serialize(), as 16 hex digits.
  std::string hash() const;
  // Switches to the long schedule: 300K training events, 5000 final users.
  void apply_full_scale();

  bool operator==(const ExperimentConfig&) const = default;
};

// Throws std::runtime_error on syntax errors and std::invalid_argument on
// bad keys or values.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace slateq
