#include "attrflow/dataset.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace attrflow {

TrainingExample sample_copy_paste(const AvatarIdentity& id, Rng& rng) {
    TrainingExample ex;
    ex.stage = TrainingStage::CopyPaste;
    const TextCondition cond = random_condition(rng);
    ex.target = render_avatar(id, cond);
    ex.target_index = 0;
    for (AttributeKind k : kAllAttributes) {
        const auto i = static_cast<size_t>(k);
        ex.attribute_crops[i] = crop_attribute(ex.target, k);
        ex.source_index[i] = 0;
        ex.source_conditions[i] = cond;
    }
    return ex;
}

TrainingExample sample_cross_reference(const AvatarIdentity& id, int pool_size, Rng& rng,
                                       bool strict_sources) {
    if (pool_size < kAttributeCount + 1)
        throw std::invalid_argument("sample_cross_reference: pool size " +
                                    std::to_string(pool_size) + " < " +
                                    std::to_string(kAttributeCount + 1));
    std::vector<RenderedSample> pool;
    pool.reserve(static_cast<size_t>(pool_size));
    for (int i = 0; i < pool_size; ++i) pool.push_back(render_avatar(id, random_condition(rng)));

    TrainingExample ex;
    ex.stage = TrainingStage::CrossReference;
    ex.target_index = rng.uniform_int(pool_size);
    ex.target = pool[static_cast<size_t>(ex.target_index)];

    std::vector<int> candidates;
    for (int i = 0; i < pool_size; ++i)
        if (i != ex.target_index) candidates.push_back(i);
    for (AttributeKind k : kAllAttributes) {
        const auto a = static_cast<size_t>(k);
        const int pick = rng.uniform_int(static_cast<int>(candidates.size()));
        const int src = candidates[static_cast<size_t>(pick)];
        if (strict_sources) candidates.erase(candidates.begin() + pick);
        ex.source_index[a] = src;
        ex.source_conditions[a] = pool[static_cast<size_t>(src)].condition;
        ex.attribute_crops[a] = crop_attribute(pool[static_cast<size_t>(src)], k);
    }
    return ex;
}

bool is_holdout_identity(const AvatarIdentity& id) { return identity_index(id) % 8 == 7; }

AvatarIdentity draw_identity(Rng& rng, bool holdout) {
    for (;;) {
        const AvatarIdentity id = random_identity(rng);
        if (is_holdout_identity(id) == holdout) return id;
    }
}

std::vector<AvatarIdentity> DatasetManifest::identities() const {
    std::vector<AvatarIdentity> out;
    std::set<int> seen;
    for (const auto& e : entries)
        if (seen.insert(identity_index(e.identity)).second) out.push_back(e.identity);
    return out;
}

namespace {

json identity_to_json(const AvatarIdentity& id) {
    return json{{"face_color", id.face_color},
                {"eye_marker", id.eye_marker},
                {"hair_color", id.hair_color},
                {"hair_style", hair_style_name(id.hair_style)},
                {"clothing_color", id.clothing_color},
                {"clothing_pattern", clothing_pattern_name(id.clothing_pattern)}};
}

AvatarIdentity identity_from_json(const json& j) {
    AvatarIdentity id;
    id.face_color = j.at("face_color").get<int>();
    id.eye_marker = j.at("eye_marker").get<int>();
    id.hair_color = j.at("hair_color").get<int>();
    id.hair_style = parse_hair_style(j.at("hair_style").get<std::string>());
    id.clothing_color = j.at("clothing_color").get<int>();
    id.clothing_pattern = parse_clothing_pattern(j.at("clothing_pattern").get<std::string>());
    return id;
}

json condition_to_json(const TextCondition& c) {
    return json{{"pose", pose_name(c.pose)},
                {"expression", expression_name(c.expression)},
                {"background", c.background}};
}

TextCondition condition_from_json(const json& j) {
    TextCondition c;
    c.pose = parse_pose(j.at("pose").get<std::string>());
    c.expression = parse_expression(j.at("expression").get<std::string>());
    c.background = j.at("background").get<int>();
    return c;
}

json cropbox_to_json(const CropBox& b) {
    return json{{"x0", b.x0}, {"y0", b.y0}, {"w", b.w}, {"h", b.h}};
}

CropBox cropbox_from_json(const json& j) {
    return {j.at("x0").get<int>(), j.at("y0").get<int>(), j.at("w").get<int>(),
            j.at("h").get<int>()};
}

}  // namespace

DatasetManifest generate_dataset(int n_identities, int renders_per_identity, uint64_t seed,
                                 const std::string& out_dir, bool holdout) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("generate_dataset: cannot create " + out_dir + ": " + ec.message());

    DatasetManifest manifest;
    manifest.seed = seed;
    manifest.holdout = holdout;
    manifest.root_dir = out_dir;

    // distinct identities, rejection-sampled from one stream so the outcome
    // is independent of any parallel render schedule
    std::vector<AvatarIdentity> ids;
    std::set<int> used;
    Rng id_rng = Rng(seed).fork(0x1d5);
    while (static_cast<int>(ids.size()) < n_identities) {
        const AvatarIdentity id = draw_identity(id_rng, holdout);
        if (used.insert(identity_index(id)).second) ids.push_back(id);
    }

    for (int i = 0; i < n_identities; ++i) {
        Rng stream = Rng(hash_combine(seed, static_cast<uint64_t>(i)));
        for (int r = 0; r < renders_per_identity; ++r) {
            const TextCondition cond = random_condition(stream);
            const RenderedSample sample = render_avatar(ids[static_cast<size_t>(i)], cond);
            char name[32];
            std::snprintf(name, sizeof(name), "img_%05d_%02d.png", i, r);
            write_png((fs::path(out_dir) / name).string(), sample.image);
            ManifestEntry entry;
            entry.identity = sample.identity;
            entry.condition = sample.condition;
            entry.path = name;
            entry.crop_boxes = sample.crop_boxes;
            manifest.entries.push_back(std::move(entry));
        }
    }

    save_manifest(manifest, (fs::path(out_dir) / "manifest.json").string());
    return manifest;
}

void save_manifest(const DatasetManifest& manifest, const std::string& path) {
    json entries = json::array();
    for (const auto& e : manifest.entries) {
        json je = identity_to_json(e.identity);
        je.update(condition_to_json(e.condition));
        je["path"] = e.path;
        json boxes;
        for (AttributeKind k : kAllAttributes)
            boxes[attribute_name(k)] = cropbox_to_json(e.crop_boxes[static_cast<size_t>(k)]);
        je["crop_boxes"] = boxes;
        entries.push_back(je);
    }
    const json doc{{"seed", manifest.seed},
                   {"version", manifest.version},
                   {"holdout", manifest.holdout},
                   {"entries", entries}};
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("save_manifest: cannot open " + path);
    out << doc.dump(2) << "\n";
    if (!out) throw std::runtime_error("save_manifest: write failed: " + path);
}

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_manifest: cannot open " + path);
    json doc;
    in >> doc;
    DatasetManifest manifest;
    manifest.seed = doc.at("seed").get<uint64_t>();
    manifest.version = doc.at("version").get<int>();
    manifest.holdout = doc.value("holdout", false);
    manifest.root_dir = fs::path(path).parent_path().string();
    for (const auto& je : doc.at("entries")) {
        ManifestEntry e;
        e.identity = identity_from_json(je);
        e.condition = condition_from_json(je);
        e.path = je.at("path").get<std::string>();
        for (AttributeKind k : kAllAttributes)
            e.crop_boxes[static_cast<size_t>(k)] =
                cropbox_from_json(je.at("crop_boxes").at(attribute_name(k)));
        manifest.entries.push_back(std::move(e));
    }
    return manifest;
}

}  // namespace attrflow
