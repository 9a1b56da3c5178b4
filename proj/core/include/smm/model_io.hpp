#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "smm/dataset.hpp"
#include "smm/model.hpp"

namespace smm {

inline constexpr int kModelFormatVersion = 1;

/// A model plus the provenance stored alongside it.
///
/// JSON layout (keys sorted):
///   format: "smm-model", version: 1, variant, shape (neurons per group),
///   mask (bool per feature), encoding, aux_hidden, aux_activation,
///   param_count, params (hex IEEE-754 bit patterns in declared order),
///   provenance {seed, stream, config_hash, tool_version},
///   normalization (optional; per-input and target affine maps).
struct ModelFile {
    ModelParams params;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::string config_hash;
    std::optional<UnitNormalization> normalization;
};

std::string model_to_json(const ModelFile& model);

/// Throws ArtifactVersionError on a wrong format tag or version and
/// ContractViolation on malformed content.
ModelFile model_from_json(const std::string& text);

void save_model(const std::filesystem::path& path, const ModelFile& model);
ModelFile load_model(const std::filesystem::path& path);

}  // namespace smm
