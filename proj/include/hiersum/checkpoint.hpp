#pragma once

#include <optional>
#include <string>

#include "hiersum/adam.hpp"
#include "hiersum/config.hpp"
#include "hiersum/model.hpp"

namespace hiersum {

// Self-describing JSON container for a training state: format tag, config,
// parameter tensors with shapes, optimizer moments, and progress counters.
// Serialization is canonical (sorted keys, shortest-round-trip doubles), so
// identical states produce byte-identical files.
struct Checkpoint {
  static constexpr const char* kFormatTag = "hiersum-checkpoint-v1";

  TrainConfig config;
  ModelParams params;
  std::optional<AdamState> adam;
  size_t epochs_done = 0;     // epochs already trained
  size_t best_epoch = 0;      // 1-based; 0 = none yet
  double best_val_r1 = -1.0;
  std::optional<ModelParams> best_params;

  void save(const std::string& path) const;
  static Checkpoint load(const std::string& path);
};

}  // namespace hiersum
