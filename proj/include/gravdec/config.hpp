// config.hpp — JSON config parsing and whole-model validation

#pragma once

#include <string>

#include <json.hpp>

#include "gravdec/model.hpp"

namespace gravdec {

struct Model {
    Scales scales;
    NoiseSpec noise;
    MassSpec mass;
    Grid1D grid;
};

// Parse and validate the four mandatory config groups.  Throws ValidationError
// listing every violated field at once (missing keys, bad values, non-power-of-
// two grid); extra sections in the document are ignored here.
Model validate_model(const nlohmann::json& raw);

Model load_model_file(const std::string& path);

// Canonical (sorted-key) serialization of the model; used for fingerprints.
nlohmann::json model_to_json(const Model& m);

} // namespace gravdec
