#include "floodtext/run_config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include <json.hpp>

#include "floodtext/error.hpp"

namespace floodtext {
namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& section,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) {
    throw ConfigError("config: section '" + section + "' must be an object");
  }
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      const std::string path =
          section.empty() ? item.key() : section + "." + item.key();
      throw ConfigError("config: unknown key '" + path + "'");
    }
  }
}

template <class T>
void read_field(const json& j, const std::string& section, const char* key,
                T& out) {
  if (!j.contains(key)) return;
  try {
    j.at(key).get_to(out);
  } catch (const json::exception&) {
    const std::string path = section.empty() ? key : section + "." + key;
    throw ConfigError("config: bad value for '" + path + "'");
  }
}

void apply_preset(RunConfig& cfg, const std::string& name) {
  if (name == "desk") {
    cfg.lm.config = desk_lm_config();
    cfg.lm.dropout_multiplier = 0.2;
    cfg.finetune_lm.epochs = 8;
    cfg.finetune_lm.base_lr = 0.004;
    cfg.finetune_lm.dropout_multiplier = 0.2;
    cfg.classifier.epochs = 32;
    cfg.classifier.batch_size = 16;
    cfg.classifier.dropout_multiplier = 0.4;
  } else if (name == "paper") {
    cfg.lm.config = paper_lm_config();
    cfg.lm.dropout_multiplier = 0.7;
    cfg.finetune_lm.epochs = 15;
    cfg.finetune_lm.base_lr = 0.01;
    cfg.finetune_lm.dropout_multiplier = 0.7;
    cfg.classifier.epochs = 16;
    cfg.classifier.batch_size = 32;
    cfg.classifier.dropout_multiplier = 0.7;
  } else {
    throw ConfigError("config: unknown preset '" + name + "'");
  }
  cfg.lm.preset = name;
}

void require(bool ok, const char* message) {
  if (!ok) throw ConfigError(std::string("config: ") + message);
}

}  // namespace

std::string RunConfig::checkpoint_dir() const {
  return paths.checkpoint_dir.empty() ? paths.out_dir + "/checkpoints"
                                      : paths.checkpoint_dir;
}

std::string RunConfig::checkpoint_path(Stage stage) const {
  return checkpoint_dir() + "/" + stage_name(stage) + ".ulmfit";
}

void RunConfig::validate() const {
  LMConfig lm_check = lm.config;
  if (lm_check.vocab_size == 0) lm_check.vocab_size = 4;  // set at pretrain time
  lm_check.validate();
  require(lm.min_freq >= 1, "lm.min_freq must be >= 1");
  require(lm.max_vocab > 4, "lm.max_vocab must exceed the special tokens");
  require(lm.cut_frac > 0.0 && lm.cut_frac < 1.0,
          "lm.cut_frac must be in (0, 1)");
  require(lm.ratio > 1.0, "lm.ratio must be > 1");
  require(lm.dropout_multiplier >= 0.0, "lm.dropout_multiplier must be >= 0");

  require(finetune_lm.epochs >= 0, "finetune_lm.epochs must be >= 0");
  require(finetune_lm.base_lr > 0.0, "finetune_lm.base_lr must be positive");
  require(finetune_lm.cut_frac > 0.0 && finetune_lm.cut_frac < 1.0,
          "finetune_lm.cut_frac must be in (0, 1)");
  require(finetune_lm.ratio > 1.0, "finetune_lm.ratio must be > 1");
  require(finetune_lm.disc_factor > 1.0,
          "finetune_lm.disc_factor must be > 1");
  require(finetune_lm.dropout_multiplier >= 0.0,
          "finetune_lm.dropout_multiplier must be >= 0");

  require(classifier.epochs >= 0, "classifier.epochs must be >= 0");
  require(classifier.base_lr > 0.0, "classifier.base_lr must be positive");
  require(classifier.cut_frac > 0.0 && classifier.cut_frac < 1.0,
          "classifier.cut_frac must be in (0, 1)");
  require(classifier.ratio > 1.0, "classifier.ratio must be > 1");
  require(classifier.disc_factor > 1.0, "classifier.disc_factor must be > 1");
  require(classifier.batch_size >= 1, "classifier.batch_size must be >= 1");
  require(classifier.head_hidden >= 1, "classifier.head_hidden must be >= 1");
  require(classifier.dropout_multiplier >= 0.0,
          "classifier.dropout_multiplier must be >= 0");
  require(classifier.label_fraction > 0.0 &&
              classifier.label_fraction <= 100.0,
          "classifier.label_fraction must be in (0, 100]");
  require(classifier.encoder == "lm_finetuned" ||
              classifier.encoder == "pretrained" ||
              classifier.encoder == "scratch",
          "classifier.encoder must be 'lm_finetuned', 'pretrained', or "
          "'scratch'");
  require(classifier.unfreeze == "gradual" ||
              classifier.unfreeze == "all_at_once",
          "classifier.unfreeze must be 'gradual' or 'all_at_once'");
  require(classifier.test_ratio > 0.0 && classifier.test_ratio < 1.0,
          "classifier.test_ratio must be in (0, 1)");

  require(!ablation.fractions.empty(), "ablation.fractions must be nonempty");
  for (double f : ablation.fractions) {
    require(f > 0.0 && f <= 100.0,
            "ablation.fractions entries must be in (0, 100]");
  }
  require(!ablation.seeds.empty(), "ablation.seeds must be nonempty");

  require(stats.top_k >= 1, "stats.top_k must be >= 1");
  require(stats.cleaning == "stats" || stats.cleaning == "model",
          "stats.cleaning must be 'stats' or 'model'");
}

RunConfig parse_run_config(const std::string& json_text,
                           const std::optional<std::string>& preset) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  check_keys(j, "", {"paths", "seed", "lm", "finetune_lm", "classifier",
                     "ablation", "stats"});

  RunConfig cfg;
  std::string preset_name = "desk";
  if (j.contains("lm") && j.at("lm").is_object() &&
      j.at("lm").contains("preset")) {
    read_field(j.at("lm"), "lm", "preset", preset_name);
  }
  if (preset) preset_name = *preset;
  apply_preset(cfg, preset_name);

  read_field(j, "", "seed", cfg.seed);

  if (j.contains("paths")) {
    const json& p = j.at("paths");
    check_keys(p, "paths",
               {"general_corpus", "tweets", "checkpoint_dir", "out_dir"});
    read_field(p, "paths", "general_corpus", cfg.paths.general_corpus);
    read_field(p, "paths", "tweets", cfg.paths.tweets);
    read_field(p, "paths", "checkpoint_dir", cfg.paths.checkpoint_dir);
    read_field(p, "paths", "out_dir", cfg.paths.out_dir);
  }

  if (j.contains("lm")) {
    const json& l = j.at("lm");
    check_keys(l, "lm",
               {"preset", "emb_dim", "hidden_dim", "n_layers", "bptt_len",
                "batch_size", "epochs", "base_lr", "tie_weights",
                "dropout_multiplier", "min_freq", "max_vocab", "cut_frac",
                "ratio"});
    read_field(l, "lm", "emb_dim", cfg.lm.config.emb_dim);
    read_field(l, "lm", "hidden_dim", cfg.lm.config.hidden_dim);
    read_field(l, "lm", "n_layers", cfg.lm.config.n_layers);
    read_field(l, "lm", "bptt_len", cfg.lm.config.bptt_len);
    read_field(l, "lm", "batch_size", cfg.lm.config.batch_size);
    read_field(l, "lm", "epochs", cfg.lm.config.epochs);
    read_field(l, "lm", "base_lr", cfg.lm.config.base_lr);
    read_field(l, "lm", "tie_weights", cfg.lm.config.tie_weights);
    if (l.contains("dropout_multiplier")) {
      read_field(l, "lm", "dropout_multiplier", cfg.lm.dropout_multiplier);
      cfg.lm.config.dropouts = DropoutProfile{}.scaled(cfg.lm.dropout_multiplier);
    }
    read_field(l, "lm", "min_freq", cfg.lm.min_freq);
    read_field(l, "lm", "max_vocab", cfg.lm.max_vocab);
    read_field(l, "lm", "cut_frac", cfg.lm.cut_frac);
    read_field(l, "lm", "ratio", cfg.lm.ratio);
  }

  if (j.contains("finetune_lm")) {
    const json& f = j.at("finetune_lm");
    check_keys(f, "finetune_lm",
               {"epochs", "base_lr", "cut_frac", "ratio", "disc_factor",
                "dropout_multiplier"});
    read_field(f, "finetune_lm", "epochs", cfg.finetune_lm.epochs);
    read_field(f, "finetune_lm", "base_lr", cfg.finetune_lm.base_lr);
    read_field(f, "finetune_lm", "cut_frac", cfg.finetune_lm.cut_frac);
    read_field(f, "finetune_lm", "ratio", cfg.finetune_lm.ratio);
    read_field(f, "finetune_lm", "disc_factor", cfg.finetune_lm.disc_factor);
    read_field(f, "finetune_lm", "dropout_multiplier",
               cfg.finetune_lm.dropout_multiplier);
  }

  if (j.contains("classifier")) {
    const json& c = j.at("classifier");
    check_keys(c, "classifier",
               {"epochs", "base_lr", "cut_frac", "ratio", "disc_factor",
                "batch_size", "head_hidden", "dropout_multiplier",
                "label_fraction", "encoder", "unfreeze", "test_ratio"});
    read_field(c, "classifier", "epochs", cfg.classifier.epochs);
    read_field(c, "classifier", "base_lr", cfg.classifier.base_lr);
    read_field(c, "classifier", "cut_frac", cfg.classifier.cut_frac);
    read_field(c, "classifier", "ratio", cfg.classifier.ratio);
    read_field(c, "classifier", "disc_factor", cfg.classifier.disc_factor);
    read_field(c, "classifier", "batch_size", cfg.classifier.batch_size);
    read_field(c, "classifier", "head_hidden", cfg.classifier.head_hidden);
    read_field(c, "classifier", "dropout_multiplier",
               cfg.classifier.dropout_multiplier);
    read_field(c, "classifier", "label_fraction",
               cfg.classifier.label_fraction);
    read_field(c, "classifier", "encoder", cfg.classifier.encoder);
    read_field(c, "classifier", "unfreeze", cfg.classifier.unfreeze);
    read_field(c, "classifier", "test_ratio", cfg.classifier.test_ratio);
  }

  if (j.contains("ablation")) {
    const json& a = j.at("ablation");
    check_keys(a, "ablation", {"fractions", "seeds"});
    read_field(a, "ablation", "fractions", cfg.ablation.fractions);
    read_field(a, "ablation", "seeds", cfg.ablation.seeds);
  }

  if (j.contains("stats")) {
    const json& s = j.at("stats");
    check_keys(s, "stats", {"top_k", "cleaning"});
    read_field(s, "stats", "top_k", cfg.stats.top_k);
    read_field(s, "stats", "cleaning", cfg.stats.cleaning);
  }

  cfg.validate();
  return cfg;
}

RunConfig resolve_run_config(const CliOverrides& overrides) {
  RunConfig cfg;
  if (overrides.config_path) {
    std::ifstream in(*overrides.config_path);
    if (!in) {
      throw ConfigError("config: cannot open '" + *overrides.config_path + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    cfg = parse_run_config(text.str(), overrides.preset);
  } else {
    apply_preset(cfg, overrides.preset.value_or("desk"));
  }
  if (overrides.seed) cfg.seed = *overrides.seed;
  if (overrides.out) cfg.paths.out_dir = *overrides.out;
  if (overrides.fractions) {
    cfg.ablation.fractions = parse_fraction_list(*overrides.fractions);
  }
  cfg.validate();
  return cfg;
}

std::vector<double> parse_fraction_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string piece;
  while (std::getline(in, piece, ',')) {
    try {
      std::size_t used = 0;
      const double value = std::stod(piece, &used);
      if (used != piece.size()) throw std::invalid_argument(piece);
      out.push_back(value);
    } catch (const std::exception&) {
      throw ConfigError("config: bad fraction '" + piece + "'");
    }
  }
  if (out.empty()) throw ConfigError("config: empty fraction list");
  return out;
}

std::string run_config_json(const RunConfig& cfg) {
  json j;
  j["paths"] = {{"general_corpus", cfg.paths.general_corpus},
                {"tweets", cfg.paths.tweets},
                {"checkpoint_dir", cfg.checkpoint_dir()},
                {"out_dir", cfg.paths.out_dir}};
  j["seed"] = cfg.seed;
  j["lm"] = {{"preset", cfg.lm.preset},
             {"emb_dim", cfg.lm.config.emb_dim},
             {"hidden_dim", cfg.lm.config.hidden_dim},
             {"n_layers", cfg.lm.config.n_layers},
             {"bptt_len", cfg.lm.config.bptt_len},
             {"batch_size", cfg.lm.config.batch_size},
             {"epochs", cfg.lm.config.epochs},
             {"base_lr", cfg.lm.config.base_lr},
             {"tie_weights", cfg.lm.config.tie_weights},
             {"dropout_multiplier", cfg.lm.dropout_multiplier},
             {"min_freq", cfg.lm.min_freq},
             {"max_vocab", cfg.lm.max_vocab},
             {"cut_frac", cfg.lm.cut_frac},
             {"ratio", cfg.lm.ratio}};
  j["finetune_lm"] = {{"epochs", cfg.finetune_lm.epochs},
                      {"base_lr", cfg.finetune_lm.base_lr},
                      {"cut_frac", cfg.finetune_lm.cut_frac},
                      {"ratio", cfg.finetune_lm.ratio},
                      {"disc_factor", cfg.finetune_lm.disc_factor},
                      {"dropout_multiplier", cfg.finetune_lm.dropout_multiplier}};
  j["classifier"] = {{"epochs", cfg.classifier.epochs},
                     {"base_lr", cfg.classifier.base_lr},
                     {"cut_frac", cfg.classifier.cut_frac},
                     {"ratio", cfg.classifier.ratio},
                     {"disc_factor", cfg.classifier.disc_factor},
                     {"batch_size", cfg.classifier.batch_size},
                     {"head_hidden", cfg.classifier.head_hidden},
                     {"dropout_multiplier", cfg.classifier.dropout_multiplier},
                     {"label_fraction", cfg.classifier.label_fraction},
                     {"encoder", cfg.classifier.encoder},
                     {"unfreeze", cfg.classifier.unfreeze},
                     {"test_ratio", cfg.classifier.test_ratio}};
  j["ablation"] = {{"fractions", cfg.ablation.fractions},
                   {"seeds", cfg.ablation.seeds}};
  j["stats"] = {{"top_k", cfg.stats.top_k}, {"cleaning", cfg.stats.cleaning}};
  return j.dump(2) + "\n";
}

}  // namespace floodtext
