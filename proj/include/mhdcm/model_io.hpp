#pragma once

#include <string>
#include <vector>

#include "mhdcm/model.hpp"

namespace mhdcm {

// Binary model file, little-endian, layout documented in docs/model_format.md.
void save_model(const ProjectionModel& model, const std::string& path);
ProjectionModel load_model(const std::string& path);

// In-memory round of the same format; save/load are thin wrappers around
// these. Useful for byte-level determinism checks.
std::vector<unsigned char> serialize_model(const ProjectionModel& model);
ProjectionModel deserialize_model(const std::vector<unsigned char>& bytes);

}  // namespace mhdcm
