#pragma once
#include <string>

#include "skyrm/qstate.hpp"

namespace skyrm {

using BMat = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

enum class TextureClass { Neel, AntiNeel, Bloch, Bubble, Undetermined };

std::string to_string(TextureClass c);
TextureClass texture_class_from_string(const std::string& s);

// Coherence-Stokes field on the (x, x') grid; row index i is x, column j is
// x'. Arrays are scaled so max(s0) == 1 (raw_scale preserves the original
// magnitude); the unit field u is zero where the mask is false.
struct StokesField {
    ModeGrid grid;
    RMat sx, sy, sz, s0;
    RMat ux, uy, uz;
    BMat defined;
    Real raw_scale = 0;

    Real undefined_fraction() const;
};

struct UnitField {
    RMat ux, uy, uz;
};

struct TextureReport {
    Real q_raw = 0;
    long q_rounded = 0;
    Real integer_residual = 0;
    Real helicity = 0;  // NaN when the equatorial band is empty
    TextureClass texture_class = TextureClass::Undetermined;
    Real undefined_fraction = 0;
    Real boundary_deviation = 0;  // max angle between boundary s and (0,0,-1)
    bool boundary_flag = false;   // boundary_deviation > 0.2 rad
    long degenerate_triangles = 0;
};

// S_x + iS_y = rho_HV(x,x'); S_z = |rho_HH| - |rho_VV| elementwise;
// S_0 = |(S_x,S_y,S_z)|; points with S_0 < 1e-12 * max(S_0) are undefined.
StokesField stokes_from_density(const DensityMatrix& rho);
StokesField stokes_from_density(const DensityMatrix& rho, const ModeGrid& grid);

// Same mapping with Psi_{sigma_A sigma_B}(x_A, x_B) in place of rho_{ss'}(x,x').
StokesField stokes_from_wavefunction(const LabeledState& psi);
StokesField stokes_from_wavefunction(const LabeledState& psi, const ModeGrid& grid);

// Assembles a field from the three pseudospin blocks directly.
StokesField stokes_from_blocks(const CMat& hh, const CMat& hv, const CMat& vv,
                               const ModeGrid& grid);

// Fills undefined points by normalized averages of defined 4-neighbors
// (at most 10 sweeps); throws TooManyUndefinedPoints at >= 1% undefined.
UnitField gap_fill(const StokesField& field);

// Lattice charge: two spherical triangles per plaquette, (v00,v10,v11) and
// (v00,v11,v01), signed solid angle 2*atan2(a.(bxc), 1+a.b+b.c+c.a), summed
// with a fixed-tree pairwise reduction. Sign convention fixed so the
// auxiliary-matrix texture with winding l carries Q = -l.
TextureReport analyze_texture(const StokesField& field);
TextureReport skyrmion_number(const StokesField& field);
TextureReport classify_texture(const StokesField& field);

// Plaquette-difference estimator (central differences of the unit field,
// one-sided at edges). Not used for reported charges; diagnostic only, for
// comparing against estimates that degrade smoothly under noise.
Real gradient_charge_estimate(const StokesField& field);

}  // namespace skyrm
