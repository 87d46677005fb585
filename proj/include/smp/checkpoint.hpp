#pragma once

#include <filesystem>
#include <string>

#include "smp/models.hpp"

namespace smp {

struct Checkpoint {
  ModelSpec spec;
  ModelParams params;
};

// JSON blob holding the spec and every named matrix. Doubles are written with
// round-trip precision, so a reloaded model reproduces outputs bit for bit.
std::string checkpoint_to_json(const ModelSpec& spec, const ModelParams& params);
Checkpoint checkpoint_from_json(const std::string& text);

void save_checkpoint(const std::filesystem::path& path, const ModelSpec& spec, const ModelParams& params);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace smp
