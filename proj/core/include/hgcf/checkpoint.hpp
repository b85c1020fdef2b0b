#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "hgcf/model.hpp"

namespace hgcf {

struct Checkpoint {
  ModelConfig config;
  ModelParams params;
  // Free-form run metadata (epoch, seed, resolved configuration echo).
  std::map<std::string, std::string> metadata;
};

// Plain-text container; every double is written in shortest round-trip form,
// so save followed by load reproduces the parameters bit for bit.
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace hgcf
