#include "floodtext/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "floodtext/error.hpp"

namespace floodtext {

using nlohmann::json;

std::string stage_name(Stage stage) {
  switch (stage) {
    case Stage::pretrained: return "pretrained";
    case Stage::lm_finetuned: return "lm_finetuned";
    case Stage::classifier: return "classifier";
  }
  throw ConfigError("unknown stage value");
}

Stage parse_stage(const std::string& name) {
  if (name == "pretrained") return Stage::pretrained;
  if (name == "lm_finetuned") return Stage::lm_finetuned;
  if (name == "classifier") return Stage::classifier;
  throw FormatError("unknown checkpoint stage '" + name + "'");
}

const Tensor* Checkpoint::find(const std::string& name) const {
  for (const auto& [n, t] : tensors) {
    if (n == name) return &t;
  }
  return nullptr;
}

Checkpoint checkpoint_from_model(const LanguageModel& model, const Vocabulary& vocab,
                                 Stage stage, std::vector<TrainLogEntry> log) {
  Checkpoint c;
  c.stage = stage;
  c.config = model.config;
  c.vocab = vocab;
  c.log = std::move(log);
  for (const auto& [name, tensor] : model.named_params()) {
    Tensor copy = *tensor;
    copy.grad.clear();
    c.tensors.emplace_back(name, std::move(copy));
  }
  return c;
}

LanguageModel model_from_checkpoint(const Checkpoint& ckpt) {
  ckpt.config.validate();
  LanguageModel model;
  model.config = ckpt.config;
  model.lstm.resize(ckpt.config.n_layers);
  for (auto& [name, tensor] : model.named_params()) {
    const Tensor* stored = ckpt.find(name);
    if (!stored) {
      throw ConfigError("checkpoint lacks required tensor '" + name + "'");
    }
    *tensor = *stored;
  }
  const std::size_t v = ckpt.config.vocab_size;
  const std::size_t e = ckpt.config.emb_dim;
  const std::size_t h = ckpt.config.hidden_dim;
  if (model.emb.shape != std::vector<std::size_t>{v, e}) {
    throw ConfigError("checkpoint embedding shape " + model.emb.shape_str() +
                      " does not match config");
  }
  for (int i = 0; i < ckpt.config.n_layers; ++i) {
    const std::size_t in = ckpt.config.layer_in(i);
    const auto& p = model.lstm[i];
    if (p.w_x.shape != std::vector<std::size_t>{in, 4 * h} ||
        p.w_h.shape != std::vector<std::size_t>{h, 4 * h} ||
        p.bias.shape != std::vector<std::size_t>{4 * h}) {
      throw ConfigError("checkpoint lstm" + std::to_string(i) +
                        " shapes do not match config");
    }
  }
  if (model.decoder_b.shape != std::vector<std::size_t>{v}) {
    throw ConfigError("checkpoint decoder bias shape does not match config");
  }
  if (!ckpt.config.tie_weights &&
      model.decoder_w.shape != std::vector<std::size_t>{h, v}) {
    throw ConfigError("checkpoint decoder weight shape does not match config");
  }
  return model;
}

namespace {

void put_u32(std::string& out, std::uint32_t x) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((x >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t x) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((x >> (8 * i)) & 0xff));
}

void put_f32(std::string& out, float x) {
  std::uint32_t bits;
  std::memcpy(&bits, &x, sizeof bits);
  put_u32(out, bits);
}

void put_string(std::string& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.append(s);
}

struct Reader {
  const std::string& buf;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (pos + n > buf.size()) throw FormatError("truncated checkpoint file");
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t x = 0;
    for (int i = 0; i < 4; ++i) {
      x |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    }
    pos += 4;
    return x;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t x = 0;
    for (int i = 0; i < 8; ++i) {
      x |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    }
    pos += 8;
    return x;
  }

  float f32() {
    const std::uint32_t bits = u32();
    float x;
    std::memcpy(&x, &bits, sizeof x);
    return x;
  }

  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s = buf.substr(pos, n);
    pos += n;
    return s;
  }
};

json config_to_json(const Checkpoint& c) {
  const LMConfig& cfg = c.config;
  json d;
  d["output"] = cfg.dropouts.output;
  d["hidden"] = cfg.dropouts.hidden;
  d["input"] = cfg.dropouts.input;
  d["embedding_row"] = cfg.dropouts.embedding_row;
  d["weight_drop"] = cfg.dropouts.weight_drop;
  json j;
  j["stage"] = stage_name(c.stage);
  j["vocab_size"] = cfg.vocab_size;
  j["emb_dim"] = cfg.emb_dim;
  j["hidden_dim"] = cfg.hidden_dim;
  j["n_layers"] = cfg.n_layers;
  j["bptt_len"] = cfg.bptt_len;
  j["batch_size"] = cfg.batch_size;
  j["dropouts"] = d;
  j["tie_weights"] = cfg.tie_weights;
  j["epochs"] = cfg.epochs;
  j["base_lr"] = cfg.base_lr;
  j["head_hidden"] = c.head_hidden;
  j["head_dropout"] = c.head_dropout;
  return j;
}

void config_from_json(const json& j, Checkpoint& c) {
  LMConfig cfg;
  cfg.vocab_size = j.at("vocab_size").get<int>();
  cfg.emb_dim = j.at("emb_dim").get<int>();
  cfg.hidden_dim = j.at("hidden_dim").get<int>();
  cfg.n_layers = j.at("n_layers").get<int>();
  cfg.bptt_len = j.at("bptt_len").get<int>();
  cfg.batch_size = j.at("batch_size").get<int>();
  const json& d = j.at("dropouts");
  cfg.dropouts.output = d.at("output").get<double>();
  cfg.dropouts.hidden = d.at("hidden").get<double>();
  cfg.dropouts.input = d.at("input").get<double>();
  cfg.dropouts.embedding_row = d.at("embedding_row").get<double>();
  cfg.dropouts.weight_drop = d.at("weight_drop").get<double>();
  cfg.tie_weights = j.at("tie_weights").get<bool>();
  cfg.epochs = j.at("epochs").get<int>();
  cfg.base_lr = j.at("base_lr").get<double>();
  c.config = cfg;
  c.stage = parse_stage(j.at("stage").get<std::string>());
  c.head_hidden = j.at("head_hidden").get<int>();
  c.head_dropout = j.at("head_dropout").get<double>();
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::string config_sec = config_to_json(ckpt).dump();

  std::string vocab_sec;
  put_u32(vocab_sec, static_cast<std::uint32_t>(ckpt.vocab.token_of.size()));
  for (const std::string& tok : ckpt.vocab.token_of) put_string(vocab_sec, tok);
  put_u32(vocab_sec, static_cast<std::uint32_t>(ckpt.vocab.min_freq));
  put_u32(vocab_sec, ckpt.vocab.max_size ? static_cast<std::uint32_t>(*ckpt.vocab.max_size)
                                         : 0xffffffffu);

  std::string tensor_sec;
  put_u32(tensor_sec, static_cast<std::uint32_t>(ckpt.tensors.size()));
  for (const auto& [name, t] : ckpt.tensors) {
    put_string(tensor_sec, name);
    put_u32(tensor_sec, static_cast<std::uint32_t>(t.rank()));
    for (std::size_t d : t.shape) put_u64(tensor_sec, d);
    put_u64(tensor_sec, t.numel());
    for (float v : t.values) put_f32(tensor_sec, v);
  }

  json log = json::array();
  for (const TrainLogEntry& e : ckpt.log) {
    log.push_back({{"epoch", e.epoch},
                   {"train_loss", e.train_loss},
                   {"valid_score", e.valid_score}});
  }
  std::string log_sec = log.dump();

  std::string out;
  out.append("ULMF");
  put_u32(out, ckpt.format_version);
  for (const std::string* sec : {&config_sec, &vocab_sec, &tensor_sec, &log_sec}) {
    put_u64(out, sec->size());
    out.append(*sec);
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot open '" + path + "' for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw DataError("write to '" + path + "' failed");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open checkpoint '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  const std::string buf = ss.str();

  Reader r{buf};
  r.need(4);
  if (buf.compare(0, 4, "ULMF") != 0) {
    throw FormatError("'" + path + "' is not a checkpoint file (bad magic)");
  }
  r.pos = 4;
  const std::uint32_t version = r.u32();
  if (version != Checkpoint::kVersion) {
    throw FormatError("checkpoint format version " + std::to_string(version) +
                      ", this build reads version " +
                      std::to_string(Checkpoint::kVersion));
  }

  std::string sections[4];
  for (auto& sec : sections) {
    const std::uint64_t n = r.u64();
    r.need(n);
    sec = buf.substr(r.pos, n);
    r.pos += n;
  }

  Checkpoint c;
  c.format_version = version;

  json cfg_json;
  try {
    cfg_json = json::parse(sections[0]);
    config_from_json(cfg_json, c);
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad checkpoint config section: ") + e.what());
  }

  {
    Reader vr{sections[1]};
    const std::uint32_t count = vr.u32();
    std::vector<std::string> tokens;
    tokens.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) tokens.push_back(vr.str());
    const std::uint32_t min_freq = vr.u32();
    const std::uint32_t max_size = vr.u32();
    c.vocab = vocab_from_token_list(
        std::move(tokens), static_cast<int>(min_freq),
        max_size == 0xffffffffu ? std::nullopt
                                : std::optional<int>(static_cast<int>(max_size)));
  }

  {
    Reader tr{sections[2]};
    const std::uint32_t count = tr.u32();
    std::set<std::string> seen;
    for (std::uint32_t i = 0; i < count; ++i) {
      const std::string name = tr.str();
      if (!seen.insert(name).second) {
        throw FormatError("duplicate tensor name '" + name + "' in checkpoint");
      }
      const std::uint32_t rank = tr.u32();
      std::vector<std::size_t> shape;
      shape.reserve(rank);
      for (std::uint32_t d = 0; d < rank; ++d) {
        shape.push_back(static_cast<std::size_t>(tr.u64()));
      }
      const std::uint64_t numel = tr.u64();
      if (numel != Tensor::numel_of(shape)) {
        throw FormatError("tensor '" + name + "' payload does not match its shape");
      }
      Tensor t(shape);
      for (std::uint64_t k = 0; k < numel; ++k) t.values[k] = tr.f32();
      c.tensors.emplace_back(name, std::move(t));
    }
  }

  try {
    for (const json& e : json::parse(sections[3])) {
      TrainLogEntry entry;
      entry.epoch = e.at("epoch").get<int>();
      entry.train_loss = e.at("train_loss").get<double>();
      entry.valid_score = e.at("valid_score").get<double>();
      c.log.push_back(entry);
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad checkpoint log section: ") + e.what());
  }

  return c;
}

}  // namespace floodtext
