#include "skyrm/texture.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "skyrm/util.hpp"

namespace skyrm {

namespace {
constexpr Real kPi = 3.14159265358979323846;
}

std::string to_string(TextureClass c) {
    switch (c) {
        case TextureClass::Neel: return "Neel";
        case TextureClass::AntiNeel: return "AntiNeel";
        case TextureClass::Bloch: return "Bloch";
        case TextureClass::Bubble: return "Bubble";
        default: return "Undetermined";
    }
}

TextureClass texture_class_from_string(const std::string& s) {
    if (s == "Neel") return TextureClass::Neel;
    if (s == "AntiNeel") return TextureClass::AntiNeel;
    if (s == "Bloch") return TextureClass::Bloch;
    if (s == "Bubble") return TextureClass::Bubble;
    if (s == "Undetermined") return TextureClass::Undetermined;
    throw ShapeMismatch("unknown texture class '" + s + "'");
}

Real StokesField::undefined_fraction() const {
    const Index n = defined.size();
    Index bad = 0;
    for (Index i = 0; i < n; ++i)
        if (!defined(i)) ++bad;
    return n ? Real(bad) / Real(n) : 1.0;
}

StokesField stokes_from_blocks(const CMat& hh, const CMat& hv, const CMat& vv,
                               const ModeGrid& grid) {
    const Index m = grid.m;
    if (hh.rows() != m || hh.cols() != m || hv.rows() != m || hv.cols() != m ||
        vv.rows() != m || vv.cols() != m)
        throw ShapeMismatch("pseudospin blocks must be M x M");
    StokesField f;
    f.grid = grid;
    f.sx = hv.real();
    f.sy = hv.imag();
    f.sz = hh.cwiseAbs() - vv.cwiseAbs();
    f.s0 = (f.sx.cwiseAbs2() + f.sy.cwiseAbs2() + f.sz.cwiseAbs2()).cwiseSqrt();
    f.raw_scale = f.s0.maxCoeff();
    if (f.raw_scale > 0) {
        f.sx /= f.raw_scale;
        f.sy /= f.raw_scale;
        f.sz /= f.raw_scale;
        f.s0 /= f.raw_scale;
    }
    f.defined = f.s0.array() >= 1e-12;
    f.ux = RMat::Zero(m, m);
    f.uy = RMat::Zero(m, m);
    f.uz = RMat::Zero(m, m);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < m; ++j)
            if (f.defined(i, j)) {
                f.ux(i, j) = f.sx(i, j) / f.s0(i, j);
                f.uy(i, j) = f.sy(i, j) / f.s0(i, j);
                f.uz(i, j) = f.sz(i, j) / f.s0(i, j);
            }
    return f;
}

namespace {

// Returns rho reordered as [pseudospin, mode]; checks factor kinds.
DensityMatrix as_spin_major(const DensityMatrix& rho) {
    if (rho.factors.size() != 2) throw WrongFactorShape("need exactly two factors");
    const FactorLabel *spin = nullptr, *mode = nullptr;
    for (const auto& f : rho.factors)
        (f.kind == FactorKind::pseudospin ? spin : mode) = &f;
    if (!spin || !mode || spin->kind != FactorKind::pseudospin || mode->kind != FactorKind::mode)
        throw WrongFactorShape("need one pseudospin and one mode factor");
    if (spin->dim != 2) throw WrongFactorShape("pseudospin dim must be 2");
    if (rho.factors[0].kind == FactorKind::pseudospin) return rho;
    return reorder_factors(rho, {*spin, *mode});
}

}  // namespace

StokesField stokes_from_density(const DensityMatrix& rho, const ModeGrid& grid) {
    const DensityMatrix sm = as_spin_major(rho);
    const Index m = sm.factors[1].dim;
    if (grid.m != m) throw ShapeMismatch("grid size != mode dimension");
    const CMat d = sm.to_dense();
    return stokes_from_blocks(d.block(0, 0, m, m), d.block(0, m, m, m), d.block(m, m, m, m),
                              grid);
}

StokesField stokes_from_density(const DensityMatrix& rho) {
    const DensityMatrix sm = as_spin_major(rho);
    return stokes_from_density(sm, ModeGrid(int(sm.factors[1].dim), 1.0));
}

StokesField stokes_from_wavefunction(const LabeledState& psi, const ModeGrid& grid) {
    if (!psi.is_pure()) throw WrongFactorShape("wavefunction texture needs a pure state");
    psi.validate();
    std::vector<std::size_t> spins, modes;
    for (std::size_t p = 0; p < psi.factors.size(); ++p)
        (psi.factors[p].kind == FactorKind::pseudospin ? spins : modes).push_back(p);
    if (psi.factors.size() != 4 || spins.size() != 2 || modes.size() != 2)
        throw WrongFactorShape("need two (pseudospin, mode) parties");
    // Pair each pseudospin with its party's mode; party order = spin order.
    if (psi.factors[modes[0]].party != psi.factors[spins[0]].party) std::swap(modes[0], modes[1]);
    for (int p = 0; p < 2; ++p)
        if (psi.factors[modes[std::size_t(p)]].party != psi.factors[spins[std::size_t(p)]].party)
            throw WrongFactorShape("each pseudospin needs a mode factor of the same party");
    const Index m = psi.factors[modes[0]].dim;
    if (psi.factors[modes[1]].dim != m) throw WrongFactorShape("mode dimensions differ");
    if (grid.m != m) throw ShapeMismatch("grid size != mode dimension");
    const auto st = factor_strides(psi.factors);
    const Index sa = st[spins[0]], sb = st[spins[1]], xa = st[modes[0]], xb = st[modes[1]];
    CMat hh(m, m), hv(m, m), vv(m, m);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < m; ++j) {
            const Index base = i * xa + j * xb;
            hh(i, j) = psi.amplitudes[base];
            hv(i, j) = psi.amplitudes[base + sb];
            vv(i, j) = psi.amplitudes[base + sa + sb];
        }
    return stokes_from_blocks(hh, hv, vv, grid);
}

StokesField stokes_from_wavefunction(const LabeledState& psi) {
    for (const auto& f : psi.factors)
        if (f.kind == FactorKind::mode) return stokes_from_wavefunction(psi, ModeGrid(int(f.dim), 1.0));
    throw WrongFactorShape("no mode factor present");
}

UnitField gap_fill(const StokesField& field) {
    if (field.undefined_fraction() >= 0.01)
        throw TooManyUndefinedPoints("undefined fraction " + std::to_string(field.undefined_fraction()));
    const Index m = field.grid.m;
    UnitField u{field.ux, field.uy, field.uz};
    BMat have = field.defined;
    for (int pass = 0; pass < 10; ++pass) {
        if ((have.array() == true).all()) break;
        const UnitField snap = u;
        const BMat snap_have = have;
        for (Index i = 0; i < m; ++i)
            for (Index j = 0; j < m; ++j) {
                if (snap_have(i, j)) continue;
                Real ax = 0, ay = 0, az = 0;
                const Index ni[4] = {i - 1, i + 1, i, i};
                const Index nj[4] = {j, j, j - 1, j + 1};
                for (int k = 0; k < 4; ++k) {
                    if (ni[k] < 0 || ni[k] >= m || nj[k] < 0 || nj[k] >= m) continue;
                    if (!snap_have(ni[k], nj[k])) continue;
                    ax += snap.ux(ni[k], nj[k]);
                    ay += snap.uy(ni[k], nj[k]);
                    az += snap.uz(ni[k], nj[k]);
                }
                const Real nrm = std::sqrt(ax * ax + ay * ay + az * az);
                if (nrm < 1e-12) continue;
                u.ux(i, j) = ax / nrm;
                u.uy(i, j) = ay / nrm;
                u.uz(i, j) = az / nrm;
                have(i, j) = true;
            }
    }
    if (!(have.array() == true).all())
        throw TooManyUndefinedPoints("isolated undefined region survived gap filling");
    return u;
}

namespace {

struct V3 {
    Real x, y, z;
};

inline Real dot(const V3& a, const V3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Real triple(const V3& a, const V3& b, const V3& c) {
    return a.x * (b.y * c.z - b.z * c.y) + a.y * (b.z * c.x - b.x * c.z) +
           a.z * (b.x * c.y - b.y * c.x);
}

// Signed solid angle of the spherical triangle (a, b, c).
inline Real solid_angle(const V3& a, const V3& b, const V3& c) {
    return 2.0 * std::atan2(triple(a, b, c), 1.0 + dot(a, b) + dot(b, c) + dot(c, a));
}

inline bool near_antipodal(const V3& a, const V3& b, const V3& c) {
    return dot(a, b) < -1.0 + 1e-9 || dot(b, c) < -1.0 + 1e-9 || dot(c, a) < -1.0 + 1e-9;
}

Real wrap_pi(Real a) {
    a = std::fmod(a + kPi, 2.0 * kPi);
    if (a < 0) a += 2.0 * kPi;
    return a - kPi;
}

}  // namespace

TextureReport analyze_texture(const StokesField& field) {
    const Index m = field.grid.m;
    TextureReport rep;
    rep.undefined_fraction = field.undefined_fraction();
    const UnitField u = gap_fill(field);
    auto at = [&](Index i, Index j) { return V3{u.ux(i, j), u.uy(i, j), u.uz(i, j)}; };

    std::vector<Real> omega;
    omega.reserve(std::size_t(2 * (m - 1) * (m - 1)));
    long degen = 0;
    for (Index i = 0; i + 1 < m; ++i)
        for (Index j = 0; j + 1 < m; ++j) {
            const V3 v00 = at(i, j), v10 = at(i + 1, j), v11 = at(i + 1, j + 1), v01 = at(i, j + 1);
            if (near_antipodal(v00, v10, v11)) ++degen;
            if (near_antipodal(v00, v11, v01)) ++degen;
            omega.push_back(solid_angle(v00, v10, v11));
            omega.push_back(solid_angle(v00, v11, v01));
        }
    rep.q_raw = -pairwise_sum(omega) / (4.0 * kPi);
    rep.q_rounded = std::lround(rep.q_raw);
    rep.integer_residual = std::abs(rep.q_raw - Real(rep.q_rounded));
    rep.degenerate_triangles = degen;

    Real bdev = 0;
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < m; ++j) {
            if (i != 0 && i != m - 1 && j != 0 && j != m - 1) continue;
            const Real c = std::min(Real(1), std::max(Real(-1), -u.uz(i, j)));
            bdev = std::max(bdev, std::acos(c));
        }
    rep.boundary_deviation = bdev;
    rep.boundary_flag = bdev > 0.2;

    // Equatorial band statistics on the filled unit field.
    std::vector<Real> csum, ssum;
    Index band = 0, hi = 0;
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < m; ++j) {
            const Real z = u.uz(i, j);
            if (std::abs(z) > 0.9) ++hi;
            if (std::abs(z) >= 0.5) continue;
            ++band;
            const Real delta =
                std::atan2(u.uy(i, j), u.ux(i, j)) - std::atan2(field.grid.x(int(j)), field.grid.x(int(i)));
            csum.push_back(std::cos(delta));
            ssum.push_back(std::sin(delta));
        }
    const Real band_frac = Real(band) / Real(m * m);
    const Real hi_frac = Real(hi) / Real(m * m);
    rep.helicity = band ? std::atan2(pairwise_sum(ssum), pairwise_sum(csum))
                        : std::numeric_limits<Real>::quiet_NaN();

    // Area rule first: a collapsed equatorial band is a Bubble regardless of
    // any residual in-band helicity.
    const Real tol = kPi / 8.0;
    if (band_frac < 0.05) {
        rep.texture_class = hi_frac > 0.80 ? TextureClass::Bubble : TextureClass::Undetermined;
    } else if (std::abs(rep.helicity) < tol && rep.q_raw < 0) {
        rep.texture_class = TextureClass::Neel;
    } else if (std::abs(wrap_pi(rep.helicity - kPi)) < tol ||
               (std::abs(rep.helicity) < tol && rep.q_raw > 0)) {
        rep.texture_class = TextureClass::AntiNeel;
    } else if (std::abs(std::abs(rep.helicity) - kPi / 2.0) < tol) {
        rep.texture_class = TextureClass::Bloch;
    } else {
        rep.texture_class = TextureClass::Undetermined;
    }
    return rep;
}

TextureReport skyrmion_number(const StokesField& field) { return analyze_texture(field); }
TextureReport classify_texture(const StokesField& field) { return analyze_texture(field); }

Real gradient_charge_estimate(const StokesField& field) {
    const Index m = field.grid.m;
    const UnitField u = gap_fill(field);
    const Real h = field.grid.spacing();
    auto ddx = [&](const RMat& a, Index i, Index j) {
        if (i == 0) return (a(1, j) - a(0, j)) / h;
        if (i == m - 1) return (a(m - 1, j) - a(m - 2, j)) / h;
        return (a(i + 1, j) - a(i - 1, j)) / (2.0 * h);
    };
    auto ddy = [&](const RMat& a, Index i, Index j) {
        if (j == 0) return (a(i, 1) - a(i, 0)) / h;
        if (j == m - 1) return (a(i, m - 1) - a(i, m - 2)) / h;
        return (a(i, j + 1) - a(i, j - 1)) / (2.0 * h);
    };
    std::vector<Real> f;
    f.reserve(std::size_t(m * m));
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < m; ++j) {
            const V3 s{u.ux(i, j), u.uy(i, j), u.uz(i, j)};
            const V3 dx{ddx(u.ux, i, j), ddx(u.uy, i, j), ddx(u.uz, i, j)};
            const V3 dy{ddy(u.ux, i, j), ddy(u.uy, i, j), ddy(u.uz, i, j)};
            f.push_back(triple(s, dx, dy));
        }
    return -pairwise_sum(f) * h * h / (4.0 * kPi);
}

}  // namespace skyrm
