#pragma once

#include <string>

#include "shapekit/pipeline.hpp"

namespace shapekit {

/// Serialized frozen-reference bundle: for LDA exactly the two class means,
/// the pooled covariance, the priors, RT and the allometric coefficients —
/// the minimal objects an offline classifier needs. kNN artifacts embed the
/// full training coordinates and labels (see the privacy note they carry).
/// The container is versioned and checksummed; loading a tampered or
/// truncated file fails without producing a partial model.
std::string artifact_bytes(const FrozenReference& reference);
FrozenReference artifact_from_bytes(const std::string& bytes);

void save_artifact(const FrozenReference& reference, const std::string& path);
FrozenReference load_artifact(const std::string& path);

inline constexpr int kArtifactVersion = 1;

}  // namespace shapekit
