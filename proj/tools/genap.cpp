#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "genap/config.hpp"
#include "genap/dataset.hpp"
#include "genap/engine.hpp"
#include "genap/errors.hpp"

#include <CLI11.hpp>

namespace fs = std::filesystem;
using namespace genap;

namespace {

struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> parallelism;
  std::optional<std::size_t> generations;
  std::optional<std::string> metric;
};

void apply_overrides(RunConfig& cfg, const CliOverrides& ov) {
  if (ov.seed) cfg.evolution.seed = *ov.seed;
  if (ov.out) cfg.output_dir = *ov.out;
  if (ov.parallelism) cfg.evolution.parallelism = *ov.parallelism;
  if (ov.generations) cfg.evolution.max_generations = *ov.generations;
  if (ov.metric) {
    if (*ov.metric == "codebleu") {
      cfg.metric = GenerationMetric::CodeBleu;
    } else if (*ov.metric == "bleu" || *ov.metric == "accuracy") {
      cfg.metric = GenerationMetric::Bleu;
    } else {
      throw ConfigError("unknown metric: " + *ov.metric);
    }
  }
}

std::string format_prompt(const Prompt& p, const RunConfig& cfg) {
  std::string out = render(p.tmpl, cfg.code_marker, cfg.mask_marker);
  out += '\n';
  if (p.verbalizer) {
    auto join = [](const WordList& ws) {
      std::string s;
      for (const auto& w : ws) {
        if (!s.empty()) s += ',';
        s += w;
      }
      return s;
    };
    out += "positive: " + join(p.verbalizer->positive) + "\n";
    out += "negative: " + join(p.verbalizer->negative) + "\n";
  }
  return out;
}

void write_outputs(const RunConfig& cfg, const EvolveResult& result,
                   const EngineState& final_state) {
  fs::create_directories(cfg.output_dir);
  const fs::path dir(cfg.output_dir);
  write_file((dir / "best_prompt.txt").string(),
             format_prompt(result.best.prompt, cfg));
  write_file((dir / "history.tsv").string(), history_to_csv(result.history));
  write_file((dir / "checkpoint.json").string(), save_checkpoint(final_state));
}

void print_best(const Individual& best, const RunConfig& cfg) {
  std::cout << "best prompt: " << render(best.prompt.tmpl, cfg.code_marker, cfg.mask_marker)
            << "\n";
  if (best.prompt.verbalizer) {
    auto join = [](const WordList& ws) {
      std::string s;
      for (const auto& w : ws) {
        if (!s.empty()) s += ',';
        s += w;
      }
      return s;
    };
    std::cout << "verbalizer: positive:" << join(best.prompt.verbalizer->positive)
              << ";negative:" << join(best.prompt.verbalizer->negative) << "\n";
  }
  std::printf("fitness: %.6f\n", *best.fitness);
}

int cmd_run(const std::string& config_path, const CliOverrides& ov) {
  RunConfig cfg = load_run_config(config_path);
  apply_overrides(cfg, ov);
  auto evaluator = make_evaluator(cfg);
  const WordPool pool = load_word_pool(cfg);

  EngineState last_state;
  auto sink = [&last_state](const EngineState& s) { last_state = s; };
  const EvolveResult result =
      evolve(cfg.evolution, *evaluator, pool, cfg.user_prompts, sink);
  write_outputs(cfg, result, last_state);
  print_best(result.best, cfg);
  return 0;
}

int cmd_resume(const std::string& config_path, const std::string& checkpoint_path,
               std::size_t extra_generations, const CliOverrides& ov) {
  RunConfig cfg = load_run_config(config_path);
  apply_overrides(cfg, ov);
  auto evaluator = make_evaluator(cfg);

  EngineState state = load_checkpoint(read_file(checkpoint_path));
  EngineState last_state = state;
  auto sink = [&last_state](const EngineState& s) { last_state = s; };
  const EvolveResult result =
      resume(std::move(state), *evaluator, extra_generations, sink);
  write_outputs(cfg, result, last_state);
  print_best(result.best, cfg);
  return 0;
}

int cmd_eval(const std::string& config_path, const std::string& prompt_string,
             const std::string& verbalizer_spec, const CliOverrides& ov) {
  RunConfig cfg = load_run_config(config_path);
  apply_overrides(cfg, ov);

  Prompt prompt;
  prompt.tmpl = parse_template(prompt_string, cfg.code_marker, cfg.mask_marker,
                               cfg.evolution.operators.max_prompt_length);
  if (!verbalizer_spec.empty())
    prompt.verbalizer = parse_verbalizer_spec(verbalizer_spec);
  if (cfg.evolution.operators.task_kind == TaskKind::Classification &&
      !prompt.verbalizer)
    throw ConfigError("classification evaluation needs --verbalizer");

  auto evaluator = make_evaluator(cfg);
  const double fitness = evaluator->evaluate(prompt);
  std::printf("%.6f\n", fitness);
  return 0;
}

int cmd_report(const std::string& history_path, const std::string& export_path) {
  const RunHistory history = history_from_csv(read_file(history_path));
  if (history.records.empty())
    throw Error("history contains no generation records");

  std::printf("%-10s  %-12s  %-12s  %-11s  %-10s\n", "generation",
              "best_fitness", "mean_fitness", "evaluations", "cache_hits");
  for (const auto& rec : history.records) {
    std::printf("%-10zu  %-12.6f  %-12.6f  %-11zu  %-10zu\n", rec.generation,
                rec.best_fitness, rec.mean_fitness, rec.evaluations,
                rec.cache_hits);
  }
  const auto& final = history.records.back();
  std::cout << "best prompt key: " << final.best_key << "\n";
  if (!export_path.empty())
    write_file(export_path, history_to_csv(history));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"genap - genetic prompt design for code models"};
  app.require_subcommand(1);

  std::string config_path, checkpoint_path, prompt_string, verbalizer_spec;
  std::string history_path, export_path;
  CliOverrides ov;
  std::size_t extra_generations = 0;

  auto add_overrides = [&](CLI::App* cmd) {
    cmd->add_option("--seed", ov.seed, "override the evolution seed");
    cmd->add_option("--out", ov.out, "override the output directory");
    cmd->add_option("--parallelism", ov.parallelism,
                    "concurrent fitness evaluations");
    cmd->add_option("--metric", ov.metric, "accuracy, bleu or codebleu");
  };

  CLI::App* run = app.add_subcommand("run", "evolve prompts from a config");
  run->add_option("--config", config_path, "run config file")->required();
  run->add_option("--generations", ov.generations, "override max generations");
  add_overrides(run);

  CLI::App* res = app.add_subcommand("resume", "continue a checkpointed run");
  res->add_option("--config", config_path, "run config file")->required();
  res->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();
  res->add_option("--generations", extra_generations,
                  "additional generations to run");
  add_overrides(res);

  CLI::App* ev = app.add_subcommand("eval", "score a single prompt");
  ev->add_option("--config", config_path, "run config file")->required();
  ev->add_option("--prompt", prompt_string, "raw prompt template")->required();
  ev->add_option("--verbalizer", verbalizer_spec,
                 "inline verbalizer, e.g. positive:w1,w2;negative:w3");
  add_overrides(ev);

  CLI::App* rep = app.add_subcommand("report", "print a history summary");
  rep->add_option("history", history_path, "history export file")->required();
  rep->add_option("--out", export_path, "re-export the history here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, ov);
    if (res->parsed())
      return cmd_resume(config_path, checkpoint_path, extra_generations, ov);
    if (ev->parsed())
      return cmd_eval(config_path, prompt_string, verbalizer_spec, ov);
    return cmd_report(history_path, export_path);
  } catch (const ConfigError& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 1;
  } catch (const VersionMismatchError& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 1;
  } catch (const CorruptCheckpointError& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 1;
  } catch (const MissingMarkerError& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 1;
  } catch (const SplitSegmentError& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 1;
  } catch (const OverLengthError& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 1;
  } catch (const EvaluationFailedError& e) {
    std::cerr << "error: eval: " << e.what() << "\n";
    return 2;
  } catch (const TransportError& e) {
    std::cerr << "error: eval: " << e.what() << "\n";
    return 2;
  } catch (const ProtocolError& e) {
    std::cerr << "error: eval: " << e.what() << "\n";
    return 2;
  } catch (const RemoteError& e) {
    std::cerr << "error: eval: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: io: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: io: " << e.what() << "\n";
    return 3;
  }
}
