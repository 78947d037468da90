#pragma once

#include "brepair/intersect.hpp"
#include "util.hpp"

namespace brepair::detail {

/// Lattice-seeded marching for pairs without a closed form.
GeomIntersectionResult march(const Surface& s1, const Surface& s2, const Box3& region,
                             const SsiOptions& opts);

}  // namespace brepair::detail
