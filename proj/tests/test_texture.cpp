#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "skyrm/texture.hpp"

using namespace skyrm;

namespace {

constexpr Real kPi = 3.14159265358979323846;

// Hedgehog texture: Theta = pi*min(r/r0, 1), Phi = l*atan2(x', x) + phi0,
// u = (sin Theta cos Phi, sin Theta sin Phi, cos Theta). Same family the
// auxiliary-matrix construction targets, built directly on the grid.
StokesField hedgehog(const ModeGrid& grid, int l, Real phi0, Real r0 = 0) {
    if (r0 <= 0) r0 = grid.x_max;
    const Index m = grid.m;
    StokesField f;
    f.grid = grid;
    f.sx.resize(m, m);
    f.sy.resize(m, m);
    f.sz.resize(m, m);
    f.s0 = RMat::Ones(m, m);
    f.defined = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(m, m, true);
    f.raw_scale = 1.0;
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < m; ++j) {
            const Real x = grid.x(int(i)), xp = grid.x(int(j));
            const Real r = std::hypot(x, xp);
            const Real theta = kPi * std::min(r / r0, 1.0);
            const Real phi = l * std::atan2(xp, x) + phi0;
            f.sx(i, j) = std::sin(theta) * std::cos(phi);
            f.sy(i, j) = std::sin(theta) * std::sin(phi);
            f.sz(i, j) = std::cos(theta);
        }
    f.ux = f.sx;
    f.uy = f.sy;
    f.uz = f.sz;
    return f;
}

}  // namespace

TEST_CASE("hedgehog carries charge -l") {
    const ModeGrid grid(21, 1.0);
    for (int l : {1, 2, 3}) {
        const TextureReport rep = analyze_texture(hedgehog(grid, l, 0.0));
        CHECK(rep.q_raw == doctest::Approx(-l).epsilon(1e-9));
        CHECK(rep.q_rounded == -l);
        CHECK(rep.integer_residual < 1e-9);
        CHECK(rep.undefined_fraction == 0.0);
    }
    const TextureReport mirror = analyze_texture(hedgehog(grid, -1, 0.0));
    CHECK(mirror.q_rounded == 1);
}

TEST_CASE("helicity windows fix the texture class") {
    const ModeGrid grid(21, 1.0);

    const TextureReport neel = analyze_texture(hedgehog(grid, 1, 0.0));
    CHECK(neel.texture_class == TextureClass::Neel);
    CHECK(neel.helicity == doctest::Approx(0.0).epsilon(1e-10));

    const TextureReport bloch = analyze_texture(hedgehog(grid, 1, kPi / 2));
    CHECK(bloch.texture_class == TextureClass::Bloch);
    CHECK(bloch.helicity == doctest::Approx(kPi / 2).epsilon(1e-10));

    const TextureReport bloch_neg = analyze_texture(hedgehog(grid, 1, -kPi / 2));
    CHECK(bloch_neg.texture_class == TextureClass::Bloch);

    // Reversed in-plane field with Q < 0, and reversed polarity with Q > 0;
    // both land in the anti-Neel family.
    const TextureReport anti = analyze_texture(hedgehog(grid, 1, kPi));
    CHECK(anti.texture_class == TextureClass::AntiNeel);
    StokesField flipped = hedgehog(grid, 1, 0.0);
    flipped.sz = -flipped.sz;
    flipped.uz = -flipped.uz;
    const TextureReport anti2 = analyze_texture(flipped);
    CHECK(anti2.q_rounded == 1);
    CHECK(anti2.texture_class == TextureClass::AntiNeel);

    const TextureReport undet = analyze_texture(hedgehog(grid, 1, kPi / 4));
    CHECK(undet.texture_class == TextureClass::Undetermined);
}

TEST_CASE("boundary deviation reads the rim direction") {
    const ModeGrid grid(21, 1.0);
    // r0 = x_max: every boundary point has r >= x_max, Theta = pi exactly.
    const TextureReport capped = analyze_texture(hedgehog(grid, 1, 0.0));
    CHECK(capped.boundary_deviation == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(!capped.boundary_flag);

    // r0 far beyond the window: the rim never reaches the south pole.
    const TextureReport open = analyze_texture(hedgehog(grid, 1, 0.0, 4.0));
    CHECK(open.boundary_deviation > 0.2);
    CHECK(open.boundary_flag);
}

TEST_CASE("uniform polar field reads Bubble with undefined helicity") {
    const ModeGrid grid(11, 1.0);
    StokesField f = hedgehog(grid, 1, 0.0);
    f.sx.setZero();
    f.sy.setZero();
    f.sz.setOnes();
    f.ux = f.sx;
    f.uy = f.sy;
    f.uz = f.sz;
    const TextureReport rep = analyze_texture(f);
    CHECK(rep.q_rounded == 0);
    CHECK(rep.texture_class == TextureClass::Bubble);
    CHECK(std::isnan(rep.helicity));
    CHECK(rep.degenerate_triangles == 0);
}

TEST_CASE("stokes_from_blocks maps coherences and normalizes") {
    const ModeGrid grid(3, 1.0);
    CMat hh(3, 3), hv(3, 3), vv(3, 3);
    hh.setZero();
    hv.setZero();
    vv.setZero();
    hh(0, 0) = 4.0;
    vv(0, 0) = 1.0;                 // sz = |hh| - |vv| = 3
    hv(0, 1) = Complex(3.0, -4.0);  // sx = 3, sy = -4, s0 = 5
    hh(2, 2) = 2.0;
    vv(2, 2) = 2.0;  // sz = 0 and no coherence: undefined point

    const StokesField f = stokes_from_blocks(hh, hv, vv, grid);
    // max s0 = 5 scales everything.
    CHECK(f.raw_scale == doctest::Approx(5.0));
    CHECK(f.sz(0, 0) == doctest::Approx(0.6));
    CHECK(f.sx(0, 1) == doctest::Approx(0.6));
    CHECK(f.sy(0, 1) == doctest::Approx(-0.8));
    CHECK(f.s0(0, 1) == doctest::Approx(1.0));
    CHECK(f.defined(0, 0));
    CHECK(!f.defined(2, 2));
    CHECK(f.ux(0, 1) == doctest::Approx(0.6));
    CHECK(f.uz(2, 2) == 0.0);
    CHECK(f.undefined_fraction() == doctest::Approx(7.0 / 9.0));
}

TEST_CASE("sz uses elementwise moduli") {
    const ModeGrid grid(3, 1.0);
    CMat hh = CMat::Zero(3, 3), hv = CMat::Zero(3, 3), vv = CMat::Zero(3, 3);
    hh(0, 1) = Complex(0.0, -2.0);  // modulus 2, not real part
    vv(0, 1) = Complex(1.0, 0.0);
    const StokesField f = stokes_from_blocks(hh, hv, vv, grid);
    CHECK(f.sz(0, 1) == doctest::Approx(1.0));  // (2 - 1) / max_s0, max_s0 = 1
}

TEST_CASE("gap fill repairs sparse holes and rejects dense ones") {
    const ModeGrid grid(21, 1.0);
    StokesField f = hedgehog(grid, 1, 0.0);
    // Three interior holes: 3/441 < 1%.
    for (Index k : {5, 9, 14}) {
        f.defined(k, k) = false;
        f.ux(k, k) = f.uy(k, k) = f.uz(k, k) = 0.0;
        f.s0(k, k) = 0.0;
    }
    const UnitField filled = gap_fill(f);
    for (Index k : {5, 9, 14}) {
        const Real norm = std::hypot(std::hypot(filled.ux(k, k), filled.uy(k, k)),
                                     filled.uz(k, k));
        CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
    }
    const TextureReport rep = analyze_texture(f);
    CHECK(rep.q_rounded == -1);
    CHECK(rep.integer_residual < 1e-3);
    CHECK(rep.undefined_fraction == doctest::Approx(3.0 / 441.0));

    // Five holes crosses the 1% limit.
    StokesField g = hedgehog(grid, 1, 0.0);
    for (Index k : {3, 6, 9, 12, 15}) {
        g.defined(k, k) = false;
        g.s0(k, k) = 0.0;
    }
    CHECK_THROWS_AS(gap_fill(g), TooManyUndefinedPoints);
    CHECK_THROWS_AS(analyze_texture(g), TooManyUndefinedPoints);
}

TEST_CASE("analyze aliases agree") {
    const ModeGrid grid(15, 1.0);
    const StokesField f = hedgehog(grid, 2, kPi / 2);
    const TextureReport a = analyze_texture(f);
    const TextureReport b = skyrmion_number(f);
    const TextureReport c = classify_texture(f);
    CHECK(a.q_raw == b.q_raw);
    CHECK(a.q_raw == c.q_raw);
    CHECK(a.texture_class == c.texture_class);
    CHECK(a.helicity == c.helicity);
}

TEST_CASE("gradient estimator tracks the charge smoothly") {
    // Unlike the lattice sum it is not integer-rigid; on a clean fine-grid
    // hedgehog it lands near -l but not exactly on it.
    const ModeGrid fine(64, 1.0);
    const Real q_fd = gradient_charge_estimate(hedgehog(fine, 1, 0.0));
    CHECK(q_fd == doctest::Approx(-1.0).epsilon(0.05));
    CHECK(q_fd != -1.0);

    const Real q_fd2 = gradient_charge_estimate(hedgehog(fine, 2, 0.0));
    CHECK(q_fd2 == doctest::Approx(-2.0).epsilon(0.05));
}

TEST_CASE("charge is stable under uniform rescaling of s") {
    const ModeGrid grid(17, 1.0);
    StokesField f = hedgehog(grid, 1, 0.0);
    StokesField g = f;
    g.sx *= 0.25;
    g.sy *= 0.25;
    g.sz *= 0.25;
    g.s0 *= 0.25;  // unit arrays unchanged
    const TextureReport fa = analyze_texture(f);
    const TextureReport ga = analyze_texture(g);
    CHECK(fa.q_raw == ga.q_raw);
    CHECK(fa.helicity == ga.helicity);
}

TEST_CASE("texture class strings round trip") {
    for (TextureClass c : {TextureClass::Neel, TextureClass::AntiNeel, TextureClass::Bloch,
                           TextureClass::Bubble, TextureClass::Undetermined}) {
        CHECK(texture_class_from_string(to_string(c)) == c);
    }
}
