#pragma once
#include <string>

#include "skyrm/texture.hpp"

namespace skyrm {

// Static vector image of a texture: diverging s_z colormap background,
// (s_x, s_y) arrow glyphs subsampled to at most 32x32, legend with Q_raw.
// Coordinates are emitted at fixed precision so identical fields give
// byte-identical output.
std::string render_svg(const StokesField& field, Real q_raw);

void save_svg(const StokesField& field, Real q_raw, const std::string& path);

}  // namespace skyrm
