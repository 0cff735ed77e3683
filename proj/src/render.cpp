#include "skyrm/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "skyrm/io.hpp"

namespace skyrm {

namespace {

struct Rgb {
    int r, g, b;
};

// Diverging map: -1 -> cool blue, 0 -> light gray, +1 -> warm red.
Rgb sz_color(Real v) {
    v = std::clamp(v, Real(-1), Real(1));
    const Rgb lo{59, 76, 192}, mid{221, 221, 221}, hi{180, 4, 38};
    auto lerp = [](int a, int b, Real t) { return int(std::lround(a + (b - a) * t)); };
    if (v < 0) {
        const Real t = v + 1;
        return {lerp(lo.r, mid.r, t), lerp(lo.g, mid.g, t), lerp(lo.b, mid.b, t)};
    }
    return {lerp(mid.r, hi.r, v), lerp(mid.g, hi.g, v), lerp(mid.b, hi.b, v)};
}

std::string f2(Real v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

std::string render_svg(const StokesField& field, Real q_raw) {
    const Index m = field.grid.m;
    const int cell = std::max(4, 640 / int(m));
    const int w = cell * int(m);
    const int legend = 28;
    const int h = w + legend;

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n";
    out << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"#ffffff\"/>\n";

    // Row i is x (vertical, increasing downward), column j is x'.
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < m; ++j) {
            Rgb c{128, 128, 128};
            if (field.defined(i, j)) c = sz_color(field.uz(i, j));
            char buf[96];
            std::snprintf(buf, sizeof buf,
                          "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"#%02x%02x%02x\"/>\n",
                          int(j) * cell, int(i) * cell, cell, cell, c.r, c.g, c.b);
            out << buf;
        }

    const int step = int((m + 31) / 32);
    const Real len = 0.45 * cell * step;
    for (Index i = 0; i < m; i += step)
        for (Index j = 0; j < m; j += step) {
            if (!field.defined(i, j)) continue;
            const Real ux = field.ux(i, j), uy = field.uy(i, j);
            const Real mag = std::hypot(ux, uy);
            if (mag < 1e-3) continue;
            const Real cx = (j + 0.5) * cell, cy = (i + 0.5) * cell;
            // SVG y grows downward; flip s_y so the glyph matches math axes.
            const Real dx = len * ux, dy = -len * uy;
            out << "<line x1=\"" << f2(cx - dx) << "\" y1=\"" << f2(cy - dy) << "\" x2=\""
                << f2(cx + dx) << "\" y2=\"" << f2(cy + dy)
                << "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
            out << "<circle cx=\"" << f2(cx + dx) << "\" cy=\"" << f2(cy + dy)
                << "\" r=\"1.5\" fill=\"#000000\"/>\n";
        }

    char label[64];
    std::snprintf(label, sizeof label, "Q_raw = %.6f", q_raw);
    out << "<text x=\"6\" y=\"" << (w + 19)
        << "\" font-family=\"monospace\" font-size=\"14\" fill=\"#000000\">" << label
        << "</text>\n";
    out << "</svg>\n";
    return out.str();
}

void save_svg(const StokesField& field, Real q_raw, const std::string& path) {
    write_text_file(path, render_svg(field, q_raw));
}

}  // namespace skyrm
