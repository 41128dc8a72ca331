#include "hiersum/checkpoint.hpp"

#include <fstream>

namespace hiersum {

using nlohmann::json;

namespace {

json params_to_json(const ModelParams& p) {
  json arr = json::array();
  for (auto& [name, t] : p.named()) {
    arr.push_back(json{{"name", name},
                       {"shape", json::array({t.rows(), t.cols()})},
                       {"values", t.val()}});
  }
  return arr;
}

ModelDims dims_from_config(const TrainConfig& c, size_t embed_dim) {
  ModelDims d;
  d.d = c.d;
  d.d_h = c.d_h;
  d.heads = c.heads;
  d.layers = c.layers;
  d.embed_dim = embed_dim;
  d.leaky_slope = c.leaky_slope;
  return d;
}

ModelParams params_from_json(const json& arr, const TrainConfig& cfg,
                             size_t embed_dim) {
  // Rebuild the skeleton, then overwrite tensor values by registered name.
  Rng rng(0);
  ModelParams p = ModelParams::init(dims_from_config(cfg, embed_dim), rng);
  auto named = p.named();
  if (arr.size() != named.size())
    throw CheckpointLoadError("checkpoint parameter count " +
                              std::to_string(arr.size()) + " != expected " +
                              std::to_string(named.size()));
  for (size_t i = 0; i < named.size(); ++i) {
    const json& e = arr.at(i);
    if (e.at("name").get<std::string>() != named[i].first)
      throw CheckpointLoadError("checkpoint parameter order mismatch at '" +
                                named[i].first + "'");
    size_t r = e.at("shape").at(0).get<size_t>();
    size_t c = e.at("shape").at(1).get<size_t>();
    Tensor t = named[i].second;
    if (r != t.rows() || c != t.cols())
      throw CheckpointLoadError("checkpoint shape mismatch for '" +
                                named[i].first + "'");
    auto vals = e.at("values").get<std::vector<double>>();
    if (vals.size() != t.size())
      throw CheckpointLoadError("checkpoint value count mismatch for '" +
                                named[i].first + "'");
    t.val_mut() = std::move(vals);
  }
  return p;
}

}  // namespace

void Checkpoint::save(const std::string& path) const {
  json j;
  j["format"] = kFormatTag;
  j["config"] = config_to_json(config);
  j["embed_dim"] = params.dims.embed_dim;
  j["params"] = params_to_json(params);
  j["epochs_done"] = epochs_done;
  j["best_epoch"] = best_epoch;
  j["best_val_r1"] = best_val_r1;
  if (best_params) j["best_params"] = params_to_json(*best_params);
  if (adam) {
    json a;
    a["t"] = adam->t;
    a["m"] = adam->m;
    a["v"] = adam->v;
    j["adam"] = std::move(a);
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  out << j.dump() << '\n';
}

Checkpoint Checkpoint::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CheckpointLoadError("cannot open checkpoint: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw CheckpointLoadError(std::string("malformed checkpoint JSON: ") +
                              e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kFormatTag)
      throw CheckpointLoadError("unsupported checkpoint format tag");
    Checkpoint ck;
    ck.config = config_from_json(j.at("config"));
    size_t embed_dim = j.at("embed_dim").get<size_t>();
    ck.params = params_from_json(j.at("params"), ck.config, embed_dim);
    ck.epochs_done = j.at("epochs_done").get<size_t>();
    ck.best_epoch = j.at("best_epoch").get<size_t>();
    ck.best_val_r1 = j.at("best_val_r1").get<double>();
    if (j.contains("best_params"))
      ck.best_params =
          params_from_json(j.at("best_params"), ck.config, embed_dim);
    if (j.contains("adam")) {
      AdamState st;
      st.t = j.at("adam").at("t").get<long>();
      st.m = j.at("adam").at("m").get<std::vector<std::vector<double>>>();
      st.v = j.at("adam").at("v").get<std::vector<std::vector<double>>>();
      ck.adam = std::move(st);
    }
    return ck;
  } catch (const json::exception& e) {
    throw CheckpointLoadError(std::string("bad checkpoint contents: ") +
                              e.what());
  }
}

}  // namespace hiersum
