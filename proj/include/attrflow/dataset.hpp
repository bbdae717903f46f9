#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "attrflow/avatar.hpp"
#include "attrflow/rng.hpp"

namespace attrflow {

enum class TrainingStage { CopyPaste, CrossReference };

// One supervised pair: the target render plus one crop per attribute and
// the index (within the render pool) each crop came from.
struct TrainingExample {
    RenderedSample target;
    int target_index = 0;
    std::array<Image, kAttributeCount> attribute_crops;
    std::array<int, kAttributeCount> source_index{};
    std::array<TextCondition, kAttributeCount> source_conditions{};
    TrainingStage stage = TrainingStage::CopyPaste;
};

// Stage-1 pair: one render supplies both the target and every crop.
TrainingExample sample_copy_paste(const AvatarIdentity& id, Rng& rng);

// Stage-2 pair: a pool of `pool_size` independent renders of the identity;
// the target is drawn uniformly and each attribute crop comes from a
// different non-target render (pairwise distinct when strict_sources).
// Requires pool_size >= 4.
TrainingExample sample_cross_reference(const AvatarIdentity& id, int pool_size, Rng& rng,
                                       bool strict_sources = true);

struct ManifestEntry {
    AvatarIdentity identity;
    TextCondition condition;
    std::string path;  // relative to the manifest's directory
    std::array<CropBox, kAttributeCount> crop_boxes;
};

struct DatasetManifest {
    uint64_t seed = 0;
    int version = 1;
    bool holdout = false;
    std::vector<ManifestEntry> entries;
    std::string root_dir;  // set on load/save, not serialized

    // unique identities in first-appearance order
    std::vector<AvatarIdentity> identities() const;
};

// Train/eval identity-space split: identities with index % 8 == 7 are
// reserved for evaluation and never drawn into training datasets.
bool is_holdout_identity(const AvatarIdentity& id);
AvatarIdentity draw_identity(Rng& rng, bool holdout);

// Renders n_identities x renders_per_identity PNGs plus manifest.json into
// out_dir. Fully reproducible: identity i draws from stream
// hash(seed, i), so generation order cannot change the bytes.
DatasetManifest generate_dataset(int n_identities, int renders_per_identity, uint64_t seed,
                                 const std::string& out_dir, bool holdout = false);

void save_manifest(const DatasetManifest& manifest, const std::string& path);
DatasetManifest load_manifest(const std::string& path);

}  // namespace attrflow
