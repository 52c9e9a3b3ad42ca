// crowdbench: batch evaluation front end.
//
//   crowdbench run --seed 7 --scenario circular_crossing --episodes 10 --policy orca --out runs/a
//   crowdbench rescore runs/a
//   crowdbench render runs/a/logs/passing/invisible_0000.jsonl --out passing.svg
//   crowdbench sample --scenario passing --seed 3

#include <cstdio>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "crowdbench/bridge.hpp"
#include "crowdbench/episode_io.hpp"
#include "crowdbench/errors.hpp"
#include "crowdbench/render.hpp"
#include "crowdbench/suite.hpp"

namespace cb = crowdbench;

namespace {

std::vector<std::string> split_commas(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const std::string& item : items) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (!part.empty()) out.push_back(part);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crowd navigation benchmark: scenarios, simulation, social-conformity metrics"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run an evaluation suite");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> scenarios;
  std::optional<std::uint32_t> episodes;
  std::optional<std::string> policy;
  std::optional<std::string> out_dir;
  std::optional<unsigned> threads;
  std::optional<std::uint32_t> humans;
  std::optional<double> epsilon;
  std::optional<double> action_timeout_s;
  bool no_visible = false;
  bool quiet = false;
  std::string format = "markdown";
  run->add_option("--config", config_path, "JSON config file; flags override it")->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Master seed");
  run->add_option("--scenario", scenarios, "Scenario kind(s), comma separated or repeated");
  run->add_option("--episodes", episodes, "Episodes per selected scenario kind")->check(CLI::PositiveNumber);
  run->add_option("--policy", policy, "goal_greedy | orca | stationary | stdio:<command> | tcp:<port>");
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--humans", humans, "Humans in multi-human scenarios")->check(CLI::PositiveNumber);
  run->add_option("--epsilon", epsilon, "Personal-space threshold in meters");
  run->add_option("--action-timeout", action_timeout_s, "Seconds to wait for an external action");
  run->add_flag("--no-visible-set", no_visible, "Skip the visible-robot episode set");
  run->add_option("--format", format, "Report printed to stdout: markdown | csv | json");
  run->add_flag("--quiet", quiet, "No progress output");

  // rescore
  auto* rescore = app.add_subcommand("rescore", "Re-score persisted logs and compare with the reports");
  std::string rescore_dir;
  rescore->add_option("dir", rescore_dir, "Run output directory")->required()->check(CLI::ExistingDirectory);

  // render
  auto* render = app.add_subcommand("render", "Render an episode log to SVG");
  std::string log_path;
  std::string svg_path;
  double render_epsilon = cb::MetricConfig{}.epsilon;
  render->add_option("log", log_path, "Episode log (.jsonl)")->required()->check(CLI::ExistingFile);
  render->add_option("--out", svg_path, "SVG path")->required();
  render->add_option("--epsilon", render_epsilon, "Personal-space threshold to highlight");

  // sample
  auto* sample = app.add_subcommand("sample", "Print a sampled scenario as JSON");
  std::string sample_kind = "circular_crossing";
  std::uint64_t sample_seed = 0;
  std::uint32_t sample_humans = 5;
  double sample_sy = -4.0;
  sample->add_option("--scenario", sample_kind, "Scenario kind");
  sample->add_option("--seed", sample_seed, "Seed");
  sample->add_option("--humans", sample_humans, "Humans");
  sample->add_option("--s-y", sample_sy, "Robot start y");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      cb::RunConfig cfg;
      cfg.threads = std::max(1u, std::thread::hardware_concurrency());
      if (!config_path.empty()) {
        cfg = cb::run_config_from_json(cb::Json::parse(cb::read_text_file(config_path)), cfg);
      }
      if (seed) cfg.master_seed = *seed;
      const auto kinds = split_commas(scenarios);
      if (!kinds.empty()) {
        std::vector<cb::KindCount> selected;
        for (const std::string& k : kinds) {
          const cb::ScenarioKind kind = cb::parse_scenario_kind(k);
          std::uint32_t n = cb::is_single_human(kind) ? 200 : 500;
          for (const auto& kc : cfg.scenarios) {
            if (kc.kind == kind) n = kc.episodes;
          }
          selected.push_back({kind, n});
        }
        cfg.scenarios = selected;
      }
      if (episodes) {
        for (auto& kc : cfg.scenarios) kc.episodes = *episodes;
      }
      if (policy) cfg.policy = *policy;
      if (out_dir) cfg.out_dir = *out_dir;
      if (threads) cfg.threads = *threads;
      if (humans) cfg.n_humans = *humans;
      if (epsilon) cfg.metrics.epsilon = *epsilon;
      if (action_timeout_s) {
        cfg.action_timeout = std::chrono::milliseconds(static_cast<long long>(*action_timeout_s * 1000.0));
      }
      if (no_visible) cfg.visible_set = false;
      const cb::ReportFormat fmt = cb::parse_report_format(format);

      if (const auto t = cb::parse_transport(cfg.policy); t && t->kind == cb::Transport::Kind::tcp) {
        std::cerr << "waiting for policy clients on 127.0.0.1:" << t->port << '\n';
      }
      cb::ProgressFn progress;
      if (!quiet) {
        progress = [](std::size_t done, std::size_t total) {
          if (done == total || done % 100 == 0) {
            std::fprintf(stderr, "\r%zu/%zu episodes", done, total);
            if (done == total) std::fputc('\n', stderr);
          }
        };
      }
      const cb::SuiteResult result = cb::run_suite(cfg, progress);
      std::cout << cb::emit_report(result.rows, fmt);
      std::size_t total = result.episodes.size();
      std::cerr << total << " episodes, " << result.aborted << " aborted";
      if (!cfg.out_dir.empty()) std::cerr << ", written to " << cfg.out_dir.string();
      std::cerr << '\n';
      if (result.aborted > 0) {
        for (const auto& e : result.episodes) {
          if (e.metrics.outcome == cb::Outcome::aborted) {
            std::cerr << "  aborted " << e.metrics.episode_id << ": " << e.abort_reason << '\n';
          }
        }
        return 2;
      }
      return 0;
    }

    if (*rescore) {
      const cb::RescoreResult r = cb::rescore_run(rescore_dir);
      for (const std::string& m : r.mismatches) std::cerr << "mismatch: " << m << '\n';
      std::cout << r.episodes << " episodes re-scored, " << r.mismatches.size() << " mismatches\n";
      return r.ok() ? 0 : 1;
    }

    if (*render) {
      cb::MetricConfig mc;
      mc.epsilon = render_epsilon;
      cb::render_trajectory(cb::load_episode_log(log_path), svg_path, mc);
      return 0;
    }

    if (*sample) {
      const auto spec = cb::sample_scenario(cb::parse_scenario_kind(sample_kind), sample_humans,
                                            sample_sy, sample_seed);
      std::cout << cb::to_json(spec).dump(2) << '\n';
      return 0;
    }
  } catch (const cb::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 64;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 64;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
