// Copyright 2026 The liftsim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Every subcommand accepts --config FILE plus
// --<key> <value> (or --<key>=<value>) overrides; overrides win over the file.

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "liftsim/liftsim.h"

namespace {

struct Subcommand {
  const char* name;
  const char* help;
};

constexpr Subcommand kSubcommands[] = {
    {"generate", "sample a day of traffic into a tape CSV (needs out)"},
    {"run-naive", "run the scripted controller on a tape (needs tape, out_dir)"},
    {"train-dqn", "train a Q-network (needs out_dir; tape optional)"},
    {"infer-dqn", "greedy rollout of a checkpoint (needs tape, checkpoint, out_dir)"},
    {"probe-markov", "check a trace for non-Markov observations (needs trace, out)"},
    {"report", "turn an epoch log into a plot-ready CSV (needs log, out)"},
    {"clone-naive", "fit a network to the scripted controller (needs tape, out_dir)"},
};

int report_failure(liftsim_status status, const char* context) {
  std::fprintf(stderr, "liftsim: %s: %s\n", context, liftsim_last_error());
  return static_cast<int>(status);
}

// Turns leftover "--key value" / "--key=value" tokens into pairs.
bool parse_overrides(const std::vector<std::string>& extras,
                     std::vector<std::pair<std::string, std::string>>& out) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& token = extras[i];
    if (token.rfind("--", 0) != 0 || token.size() == 2) {
      std::fprintf(stderr, "liftsim: unexpected argument '%s'\n", token.c_str());
      return false;
    }
    const std::string body = token.substr(2);
    if (const auto eq = body.find('='); eq != std::string::npos) {
      out.emplace_back(body.substr(0, eq), body.substr(eq + 1));
    } else if (i + 1 < extras.size()) {
      out.emplace_back(body, extras[++i]);
    } else {
      std::fprintf(stderr, "liftsim: option '%s' needs a value\n", token.c_str());
      return false;
    }
  }
  return true;
}

int run(const std::string& command, const std::string& config_path,
        const std::vector<std::string>& extras) {
  std::vector<std::pair<std::string, std::string>> overrides;
  if (!parse_overrides(extras, overrides)) return LIFTSIM_ERR_CONFIG;

  liftsim_config* config = nullptr;
  if (liftsim_status s = liftsim_config_create(&config); s != LIFTSIM_OK) {
    return report_failure(s, "config");
  }
  int code = LIFTSIM_OK;
  if (!config_path.empty()) {
    if (liftsim_status s = liftsim_config_load(config, config_path.c_str()); s != LIFTSIM_OK) {
      code = report_failure(s, config_path.c_str());
    }
  }
  for (const auto& [key, value] : overrides) {
    if (code != LIFTSIM_OK) break;
    if (liftsim_status s = liftsim_config_set(config, key.c_str(), value.c_str());
        s != LIFTSIM_OK) {
      code = report_failure(s, ("--" + key).c_str());
    }
  }
  if (code == LIFTSIM_OK) {
    liftsim_result* result = nullptr;
    const liftsim_status s = liftsim_run(config, command.c_str(), &result);
    if (result != nullptr) {
      std::printf("%s\n", liftsim_result_summary(result));
      for (std::size_t i = 0; i < liftsim_result_output_count(result); ++i) {
        std::fprintf(stderr, "wrote %s\n", liftsim_result_output(result, i));
      }
    }
    if (s != LIFTSIM_OK) code = report_failure(s, command.c_str());
    liftsim_result_destroy(result);
  }
  liftsim_config_destroy(config);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-car elevator simulator and learning harness", "liftsim"};
  app.set_version_flag("--version", std::string(liftsim_version()));
  app.require_subcommand(1);

  std::string config_path;
  for (const auto& sub : kSubcommands) {
    CLI::App* cmd = app.add_subcommand(sub.name, sub.help);
    cmd->add_option("--config", config_path, "key = value config file")
        ->check(CLI::ExistingFile);
    cmd->allow_extras();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : LIFTSIM_ERR_CONFIG;
  }

  CLI::App* chosen = app.get_subcommands().front();
  return run(chosen->get_name(), config_path, chosen->remaining());
}
