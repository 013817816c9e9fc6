#pragma once

#include <string>

#include "bvae/matrix.hpp"

namespace bvae {

// Binary PGM (P5), one pixel per entry: zeros are black, intensity scales as
// min(1, x / q99) with q99 the 99th percentile of the nonzero entries.
void render_heatmap(const Matrix& x, const std::string& path);

}  // namespace bvae
