#include "smm/model_io.hpp"

#include <nlohmann/json.hpp>

#include "smm/error.hpp"
#include "smm/io.hpp"

namespace smm {

using nlohmann::json;

namespace {

json affine_to_json(const AffineMap& m) {
    return json{{"offset", double_to_hex(m.offset)}, {"width", double_to_hex(m.width)}, {"constant", m.constant}};
}

AffineMap affine_from_json(const json& j) {
    AffineMap m;
    m.offset = hex_to_double(j.at("offset").get<std::string>());
    m.width = hex_to_double(j.at("width").get<std::string>());
    m.constant = j.at("constant").get<bool>();
    return m;
}

}  // namespace

std::string model_to_json(const ModelFile& model) {
    const auto& p = model.params;
    const auto& arch = p.architecture();
    json j;
    j["format"] = "smm-model";
    j["version"] = kModelFormatVersion;
    j["variant"] = std::string(to_string(arch.variant));
    j["shape"] = arch.shape.neurons;
    j["mask"] = arch.mask.flags();
    j["encoding"] = std::string(to_string(arch.encoding));
    j["aux_hidden"] = arch.aux_hidden;
    j["aux_activation"] = std::string(to_string(arch.aux_activation));
    j["param_count"] = p.size();
    json params = json::array();
    for (double v : p.values()) params.push_back(double_to_hex(v));
    j["params"] = std::move(params);
    j["provenance"] = {{"seed", model.seed},
                       {"stream", model.stream},
                       {"config_hash", model.config_hash},
                       {"tool_version", std::string(kToolVersion)}};
    if (model.normalization) {
        json inputs = json::array();
        for (const auto& m : model.normalization->inputs) inputs.push_back(affine_to_json(m));
        j["normalization"] = {{"inputs", std::move(inputs)}, {"target", affine_to_json(model.normalization->target)}};
    }
    return j.dump(2) + "\n";
}

ModelFile model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ContractViolation(std::string("model file: ") + e.what());
    }
    if (!j.is_object() || j.value("format", "") != "smm-model")
        throw ArtifactVersionError("model file: not an smm-model document");
    if (!j.contains("version") || !j["version"].is_number_integer() || j["version"].get<int>() != kModelFormatVersion)
        throw ArtifactVersionError("model file: unsupported format version (expected " +
                                   std::to_string(kModelFormatVersion) + ")");
    try {
        Architecture arch;
        arch.variant = parse_variant(j.at("variant").get<std::string>());
        arch.shape = GroupShape(j.at("shape").get<std::vector<int>>());
        arch.mask = MonotonicityMask(j.at("mask").get<std::vector<bool>>());
        arch.encoding = parse_encoding(j.at("encoding").get<std::string>());
        arch.aux_hidden = j.at("aux_hidden").get<int>();
        arch.aux_activation = parse_aux_activation(j.at("aux_activation").get<std::string>());
        std::vector<double> values;
        for (const auto& v : j.at("params")) values.push_back(hex_to_double(v.get<std::string>()));
        if (values.size() != j.at("param_count").get<std::size_t>())
            throw ContractViolation("model file: param_count does not match params");
        ModelFile out{ModelParams(std::move(arch), std::move(values)), 0, 0, {}, std::nullopt};
        const auto& prov = j.at("provenance");
        out.seed = prov.at("seed").get<std::uint64_t>();
        out.stream = prov.at("stream").get<std::uint64_t>();
        out.config_hash = prov.at("config_hash").get<std::string>();
        if (j.contains("normalization")) {
            UnitNormalization norm;
            for (const auto& m : j["normalization"].at("inputs")) norm.inputs.push_back(affine_from_json(m));
            norm.target = affine_from_json(j["normalization"].at("target"));
            out.normalization = std::move(norm);
        }
        return out;
    } catch (const json::exception& e) {
        throw ContractViolation(std::string("model file: ") + e.what());
    }
}

void save_model(const std::filesystem::path& path, const ModelFile& model) {
    write_file_atomic(path, model_to_json(model));
}

ModelFile load_model(const std::filesystem::path& path) { return model_from_json(read_text_file(path)); }

}  // namespace smm
