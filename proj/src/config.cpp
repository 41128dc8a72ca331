#include "hiersum/config.hpp"

#include <fstream>

namespace hiersum {

using nlohmann::json;

void TrainConfig::check() const {
  if (d == 0 || d_h == 0 || heads == 0 || layers == 0 || epochs == 0 ||
      patience == 0 || k_extract == 0 || max_oracle_sents == 0)
    throw LogicError("config: size fields must be positive");
  if (d % heads != 0) throw LogicError("config: heads must divide d");
  if (lr <= 0.0 || tau <= 0.0) throw LogicError("config: lr and tau must be > 0");
  if (dropout < 0.0 || dropout >= 1.0)
    throw LogicError("config: dropout must be in [0, 1)");
  if (lambda < 0.0) throw LogicError("config: lambda must be >= 0");
  if (provider != "hash" && provider != "file")
    throw LogicError("config: provider must be 'hash' or 'file'");
  if (provider == "file" && embeddings_path.empty())
    throw LogicError("config: file provider needs embeddings_path");
}

namespace {

uint64_t parse_u64(const std::string& v) { return std::stoull(v); }
double parse_f64(const std::string& v) { return std::stod(v); }
bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw DataError("config: bad boolean value '" + v + "'");
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

void apply_config_kv(TrainConfig& cfg, const std::string& key,
                     const std::string& value) {
  try {
    if (key == "d") cfg.d = parse_u64(value);
    else if (key == "d_h") cfg.d_h = parse_u64(value);
    else if (key == "heads") cfg.heads = parse_u64(value);
    else if (key == "layers") cfg.layers = parse_u64(value);
    else if (key == "lr") cfg.lr = parse_f64(value);
    else if (key == "dropout") cfg.dropout = parse_f64(value);
    else if (key == "lambda") cfg.lambda = parse_f64(value);
    else if (key == "tau") cfg.tau = parse_f64(value);
    else if (key == "epochs") cfg.epochs = parse_u64(value);
    else if (key == "patience") cfg.patience = parse_u64(value);
    else if (key == "k_extract") cfg.k_extract = parse_u64(value);
    else if (key == "max_oracle_sents") cfg.max_oracle_sents = parse_u64(value);
    else if (key == "seed") cfg.seed = parse_u64(value);
    else if (key == "embed_seed") cfg.embed_seed = parse_u64(value);
    else if (key == "provider") cfg.provider = value;
    else if (key == "embeddings_path") cfg.embeddings_path = value;
    else if (key == "leaky_slope") cfg.leaky_slope = parse_f64(value);
    else if (key == "grad_clip") cfg.grad_clip = parse_f64(value);
    else if (key == "weight_decay") cfg.weight_decay = parse_f64(value);
    else if (key == "hierarchical") cfg.hierarchical = parse_bool(value);
    else throw DataError("config: unknown key '" + key + "'");
  } catch (const std::invalid_argument&) {
    throw DataError("config: bad value '" + value + "' for key '" + key + "'");
  } catch (const std::out_of_range&) {
    throw DataError("config: value out of range for key '" + key + "'");
  }
}

TrainConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  TrainConfig cfg;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("config: expected key = value", lineno);
    apply_config_kv(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  cfg.check();
  return cfg;
}

json config_to_json(const TrainConfig& c) {
  return json{{"d", c.d},
              {"d_h", c.d_h},
              {"heads", c.heads},
              {"layers", c.layers},
              {"lr", c.lr},
              {"dropout", c.dropout},
              {"lambda", c.lambda},
              {"tau", c.tau},
              {"epochs", c.epochs},
              {"patience", c.patience},
              {"k_extract", c.k_extract},
              {"max_oracle_sents", c.max_oracle_sents},
              {"seed", c.seed},
              {"embed_seed", c.embed_seed},
              {"provider", c.provider},
              {"embeddings_path", c.embeddings_path},
              {"leaky_slope", c.leaky_slope},
              {"grad_clip", c.grad_clip},
              {"weight_decay", c.weight_decay},
              {"hierarchical", c.hierarchical}};
}

TrainConfig config_from_json(const json& j) {
  TrainConfig c;
  c.d = j.at("d").get<size_t>();
  c.d_h = j.at("d_h").get<size_t>();
  c.heads = j.at("heads").get<size_t>();
  c.layers = j.at("layers").get<size_t>();
  c.lr = j.at("lr").get<double>();
  c.dropout = j.at("dropout").get<double>();
  c.lambda = j.at("lambda").get<double>();
  c.tau = j.at("tau").get<double>();
  c.epochs = j.at("epochs").get<size_t>();
  c.patience = j.at("patience").get<size_t>();
  c.k_extract = j.at("k_extract").get<size_t>();
  c.max_oracle_sents = j.at("max_oracle_sents").get<size_t>();
  c.seed = j.at("seed").get<uint64_t>();
  c.embed_seed = j.at("embed_seed").get<uint64_t>();
  c.provider = j.at("provider").get<std::string>();
  c.embeddings_path = j.at("embeddings_path").get<std::string>();
  c.leaky_slope = j.at("leaky_slope").get<double>();
  c.grad_clip = j.at("grad_clip").get<double>();
  c.weight_decay = j.at("weight_decay").get<double>();
  c.hierarchical = j.at("hierarchical").get<bool>();
  return c;
}

}  // namespace hiersum
