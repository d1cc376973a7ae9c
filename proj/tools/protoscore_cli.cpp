// Copyright 2026 The protoscore Authors.
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

// protoscore command-line tool: batch evaluation, single-response scoring,
// the reward service and group advantages.

#include <algorithm>
#include <atomic>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "protoscore/protoscore.hpp"

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop.store(true); }

struct ConfigFlags {
  std::optional<std::string> order_mode, order_combine, scale_combine, reward_range;
  std::optional<double> tau, lambda;
  std::optional<int> max_step_words;

  void attach(CLI::App* app) {
    app->add_option("--order-mode", order_mode, "strict|lcs")->check(CLI::IsMember({"strict", "lcs"}));
    app->add_option("--order-combine", order_combine, "sum|product")->check(CLI::IsMember({"sum", "product"}));
    app->add_option("--scale-combine", scale_combine, "product|sum")->check(CLI::IsMember({"sum", "product"}));
    app->add_option("--reward-range", reward_range, "unit|constant|scaled|shift")
        ->check(CLI::IsMember({"unit", "constant", "scaled", "shift"}));
    app->add_option("--tau", tau, "consistency coverage threshold");
    app->add_option("--max-step-words", max_step_words, "verbosity limit per step");
    app->add_option("--lambda", lambda, "positional decay exponent");
  }

  protoscore::json patch() const {
    protoscore::json j = protoscore::json::object();
    if (order_mode) j["order_mode"] = *order_mode;
    if (order_combine) j["order_combine"] = *order_combine;
    if (scale_combine) j["scale_combine"] = *scale_combine;
    if (reward_range) j["reward_range"] = *reward_range;
    if (tau) j["tau"] = *tau;
    if (lambda) j["decay_lambda"] = *lambda;
    if (max_step_words) j["max_step_words"] = *max_step_words;
    return j;
  }
};

// defaults < PROTOSCORE_CONFIG file < flags
protoscore::ScoreConfig resolve_config(const ConfigFlags& flags) {
  protoscore::ScoreConfig cfg;
  if (const char* path = std::getenv("PROTOSCORE_CONFIG"); path != nullptr && *path != '\0') {
    std::ifstream in(path);
    if (!in) throw protoscore::SchemaError("PROTOSCORE_CONFIG", std::string("cannot read '") + path + "'");
    const auto j = protoscore::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw protoscore::SchemaError("PROTOSCORE_CONFIG", std::string("invalid JSON in '") + path + "'");
    cfg = protoscore::apply_config_patch(cfg, j);
  }
  return protoscore::apply_config_patch(cfg, flags.patch());
}

int run_score(const std::string& gold_path, const std::optional<std::string>& id, const protoscore::ScoreConfig& cfg) {
  std::vector<protoscore::GoldReference> gold;
  try {
    gold = protoscore::load_gold(gold_path);
  } catch (const protoscore::CorpusError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.status();
  }
  const protoscore::GoldReference* ref = nullptr;
  if (id) {
    for (const auto& g : gold) {
      if (g.id == *id) ref = &g;
    }
    if (ref == nullptr) {
      std::cerr << "error: no gold reference with id '" << *id << "'\n";
      return protoscore::kExitIdMismatch;
    }
  } else if (gold.size() == 1) {
    ref = &gold.front();
  } else {
    std::cerr << "error: '" << gold_path << "' holds " << gold.size() << " references; pass --id\n";
    return protoscore::kExitSchema;
  }
  const std::string raw{std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  std::cout << protoscore::report_to_json(protoscore::score(raw, *ref, cfg)).dump(2, ' ', false,
                                                                                   protoscore::json::error_handler_t::replace)
            << '\n';
  return protoscore::kExitOk;
}

int run_advantages() {
  const auto j = protoscore::json::parse(std::cin, nullptr, false);
  if (j.is_discarded() || !j.is_array()) {
    std::cerr << "error: expected a JSON array of numbers on stdin\n";
    return protoscore::kExitSchema;
  }
  std::vector<double> rewards;
  for (const auto& v : j) {
    if (!v.is_number()) {
      std::cerr << "error: expected a JSON array of numbers on stdin\n";
      return protoscore::kExitSchema;
    }
    rewards.push_back(v.get<double>());
  }
  try {
    std::cout << protoscore::json(protoscore::group_advantages(rewards)).dump() << '\n';
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return protoscore::kExitSchema;
  }
  return protoscore::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"protoscore: gated executability scoring for structured protocol outputs"};
  app.require_subcommand(1);

  ConfigFlags eval_flags;
  std::string pred_path, gold_path, out_path;
  unsigned jobs = 1;
  auto* eval = app.add_subcommand("eval", "score an NDJSON prediction corpus against NDJSON gold references");
  eval->add_option("--pred", pred_path, "predictions, one {\"id\",\"output\"} per line")->required();
  eval->add_option("--gold", gold_path, "gold references, one per line")->required();
  eval->add_option("--out", out_path, "per-row NDJSON output; the summary goes to <out>.summary.json")->required();
  eval->add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1u, 256u));
  eval_flags.attach(eval);

  ConfigFlags score_flags;
  std::string score_gold;
  std::optional<std::string> score_id;
  auto* score = app.add_subcommand("score", "score one raw response read from stdin");
  score->add_option("--gold", score_gold, "gold reference NDJSON")->required();
  score->add_option("--id", score_id, "reference id when the file holds several");
  score_flags.attach(score);

  ConfigFlags serve_flags;
  std::string transport = "stdio";
  std::string host = "127.0.0.1";
  std::uint16_t port = 7878;
  unsigned serve_jobs = std::max(1u, std::thread::hardware_concurrency());
  auto* serve = app.add_subcommand("serve", "serve reward requests as newline-delimited JSON");
  serve->add_option("--transport", transport, "stdio|tcp")->check(CLI::IsMember({"stdio", "tcp"}));
  serve->add_option("--port", port, "TCP port");
  serve->add_option("--host", host, "TCP bind address");
  serve->add_option("--jobs", serve_jobs, "worker threads")->check(CLI::Range(1u, 256u));
  serve_flags.attach(serve);

  auto* advantages = app.add_subcommand("advantages", "group-normalize a JSON array of rewards read from stdin");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*eval) {
      return protoscore::run_eval(pred_path, gold_path, out_path, resolve_config(eval_flags), jobs, std::cout,
                                  std::cerr);
    }
    if (*score) return run_score(score_gold, score_id, resolve_config(score_flags));
    if (*advantages) return run_advantages();
    if (*serve) {
      const auto cfg = resolve_config(serve_flags);
      if (transport == "stdio") {
        std::ios::sync_with_stdio(false);
        protoscore::serve_stream(std::cin, std::cout, cfg, serve_jobs);
        if (!std::cout) {
          std::cerr << "error: failed writing to standard output\n";
          return 1;
        }
        return 0;
      }
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      protoscore::serve_tcp({host, port, serve_jobs}, cfg, g_stop, [](std::uint16_t bound) {
        std::cerr << "protoscore: listening on port " << bound << '\n';
      });
      return 0;
    }
  } catch (const protoscore::SchemaError& e) {
    std::cerr << "error: invalid configuration: " << e.what() << '\n';
    return protoscore::kExitSchema;
  } catch (const std::system_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
