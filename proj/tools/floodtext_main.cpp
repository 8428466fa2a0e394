#include <cstdio>
#include <exception>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "floodtext/commands.hpp"
#include "floodtext/error.hpp"
#include "floodtext/run_config.hpp"

namespace {

const char* kind_name(floodtext::ErrorKind kind) {
  switch (kind) {
    case floodtext::ErrorKind::config:
      return "config";
    case floodtext::ErrorKind::data:
      return "data";
    case floodtext::ErrorKind::numerics:
      return "numerics";
  }
  return "error";
}

struct Flags {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> preset;
  std::optional<std::string> fractions;
  std::optional<std::string> out;

  floodtext::CliOverrides overrides() const {
    return {config, seed, preset, fractions, out};
  }
};

void add_common_flags(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--config", flags.config, "JSON config file");
  cmd->add_option("--seed", flags.seed, "Run seed");
  cmd->add_option("--preset", flags.preset, "LM preset (desk|paper)")
      ->check(CLI::IsMember({"desk", "paper"}));
  cmd->add_option("--fractions", flags.fractions,
                  "Ablation label fractions, e.g. 5,10,20,50,80");
  cmd->add_option("--out", flags.out, "Output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flood-tweet transfer-learning pipeline"};
  app.require_subcommand(1);

  Flags flags;
  std::vector<std::string> texts;

  using Runner = std::function<int(const floodtext::RunConfig&)>;
  struct Entry {
    const char* name;
    const char* help;
    Runner run;
  };
  const std::vector<Entry> entries = {
      {"stats", "Descriptive corpus statistics", floodtext::cmd_stats},
      {"pretrain", "General-domain LM pretraining", floodtext::cmd_pretrain},
      {"finetune-lm", "Target-corpus LM fine-tuning",
       floodtext::cmd_finetune_lm},
      {"train-clf", "Classifier fine-tuning", floodtext::cmd_train_clf},
      {"eval", "Evaluate the trained classifier", floodtext::cmd_eval},
      {"ablate", "Label-fraction ablation table", floodtext::cmd_ablate},
  };

  Runner selected;
  for (const auto& entry : entries) {
    CLI::App* cmd = app.add_subcommand(entry.name, entry.help);
    add_common_flags(cmd, flags);
    cmd->callback([&selected, &entry] { selected = entry.run; });
  }

  CLI::App* predict = app.add_subcommand("predict", "Classify input texts");
  add_common_flags(predict, flags);
  predict->add_option("text", texts, "Texts to classify")
      ->required()
      ->expected(-1);
  predict->callback([&selected, &texts] {
    selected = [&texts](const floodtext::RunConfig& cfg) {
      return floodtext::cmd_predict(cfg, texts);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "floodtext: config: " << e.what() << "\n";
    return 1;
  }

  try {
    const floodtext::RunConfig cfg =
        floodtext::resolve_run_config(flags.overrides());
    return selected(cfg);
  } catch (const floodtext::Error& e) {
    std::cerr << "floodtext: " << kind_name(e.kind()) << ": " << e.what()
              << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "floodtext: error: " << e.what() << "\n";
    return 1;
  }
}
