#include "attrflow/config.hpp"

#include "json.hpp"

using nlohmann::json;

namespace attrflow {

std::string model_config_to_json(const ModelConfig& cfg) {
    json j;
    j["base"] = {{"image_size", cfg.base.image_size},
                 {"channels", cfg.base.channels},
                 {"patch_size", cfg.base.patch_size},
                 {"d_model", cfg.base.d_model},
                 {"n_blocks", cfg.base.n_blocks},
                 {"n_heads", cfg.base.n_heads},
                 {"text_vocab", cfg.base.text_vocab},
                 {"inject_from_block", cfg.base.inject_from_block}};
    j["adapter"] = {{"common_dim", cfg.adapter.common_dim},
                    {"encoder_dims", cfg.adapter.encoder_dims},
                    {"encoder_blocks", cfg.adapter.encoder_blocks},
                    {"encoder_heads", cfg.adapter.encoder_heads},
                    {"max_subjects", cfg.adapter.max_subjects},
                    {"tokens_per_image", cfg.adapter.tokens_per_image}};
    return j.dump(2);
}

ModelConfig model_config_from_json(const std::string& text) {
    const json j = json::parse(text);
    ModelConfig cfg;
    if (j.contains("base")) {
        const json& b = j.at("base");
        cfg.base.image_size = b.value("image_size", cfg.base.image_size);
        cfg.base.channels = b.value("channels", cfg.base.channels);
        cfg.base.patch_size = b.value("patch_size", cfg.base.patch_size);
        cfg.base.d_model = b.value("d_model", cfg.base.d_model);
        cfg.base.n_blocks = b.value("n_blocks", cfg.base.n_blocks);
        cfg.base.n_heads = b.value("n_heads", cfg.base.n_heads);
        if (b.contains("text_vocab")) cfg.base.text_vocab = b.at("text_vocab").get<std::array<int, 3>>();
        cfg.base.inject_from_block =
            b.value("inject_from_block", cfg.base.n_blocks / 2);
    }
    if (j.contains("adapter")) {
        const json& a = j.at("adapter");
        cfg.adapter.common_dim = a.value("common_dim", cfg.adapter.common_dim);
        if (a.contains("encoder_dims"))
            cfg.adapter.encoder_dims = a.at("encoder_dims").get<std::array<int, 3>>();
        cfg.adapter.encoder_blocks = a.value("encoder_blocks", cfg.adapter.encoder_blocks);
        cfg.adapter.encoder_heads = a.value("encoder_heads", cfg.adapter.encoder_heads);
        cfg.adapter.max_subjects = a.value("max_subjects", cfg.adapter.max_subjects);
        cfg.adapter.tokens_per_image = a.value("tokens_per_image", cfg.adapter.tokens_per_image);
    }
    cfg.base.validate();
    cfg.adapter.validate();
    return cfg;
}

}  // namespace attrflow
