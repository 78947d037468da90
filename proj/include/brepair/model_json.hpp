#pragma once

#include "brepair/primitives.hpp"
#include "brepair/topology.hpp"

#include <string>
#include <vector>

namespace brepair {

/// Model file: {"bodies":[{"id", "faces", "edges", "vertices"}]}. Curves and
/// surfaces are tagged objects {"kind": ..., parameters..., "fitting_error"}.
std::string model_to_json(const std::vector<const Body*>& bodies);
std::vector<Body> model_from_json(const std::string& text);

/// Frame and primitive specs in the same tagged style (used by scenario files).
std::string primitive_to_json(const PrimitiveSpec& s);
PrimitiveSpec primitive_from_json(const std::string& text);

}  // namespace brepair
