#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace attrflow {

// Frozen-generator architecture knobs. Defaults are the reference
// desk-scale shape; the CI configs shrink d_model/n_blocks.
struct BaseModelConfig {
    int image_size = 64;  // square
    int channels = 3;
    int patch_size = 8;
    int d_model = 128;
    int n_blocks = 8;
    int n_heads = 4;
    std::array<int, 3> text_vocab = {3, 2, 8};  // pose, expression, background
    int inject_from_block = 4;                  // adapter attaches to the latter blocks

    int tokens_per_side() const { return image_size / patch_size; }
    int n_tokens() const { return tokens_per_side() * tokens_per_side(); }
    int patch_dim() const { return channels * patch_size * patch_size; }

    void validate() const {
        if (image_size % patch_size != 0)
            throw std::invalid_argument("config: image_size " + std::to_string(image_size) +
                                        " not divisible by patch_size " + std::to_string(patch_size));
        if (d_model % n_heads != 0)
            throw std::invalid_argument("config: d_model " + std::to_string(d_model) +
                                        " not divisible by n_heads " + std::to_string(n_heads));
        if (inject_from_block < 0 || inject_from_block >= n_blocks)
            throw std::invalid_argument("config: inject_from_block " +
                                        std::to_string(inject_from_block) + " out of [0, " +
                                        std::to_string(n_blocks) + ")");
    }
};

// Attribute tokenizer + merging shapes. Encoder dims differ on purpose:
// the projection to the common dim has to do real work.
struct AdapterConfig {
    int common_dim = 64;                            // D
    std::array<int, 3> encoder_dims = {64, 48, 80};  // D_a for face, hair, clothing
    int encoder_blocks = 2;
    int encoder_heads = 2;
    int max_subjects = 2;  // M_max
    int tokens_per_image = 16;  // 32x32 crop, patch 8

    void validate() const {
        for (int d : encoder_dims)
            if (d % encoder_heads != 0)
                throw std::invalid_argument("config: encoder dim " + std::to_string(d) +
                                            " not divisible by encoder_heads");
        if (max_subjects < 1) throw std::invalid_argument("config: max_subjects must be >= 1");
    }
};

struct ModelConfig {
    BaseModelConfig base;
    AdapterConfig adapter;
};

// JSON round-trip (fields mirror the struct names; missing fields keep
// defaults, inject_from_block defaults to n_blocks/2 when absent).
std::string model_config_to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const std::string& text);

}  // namespace attrflow
