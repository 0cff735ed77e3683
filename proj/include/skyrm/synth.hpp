#pragma once
#include <string>
#include <utility>

#include "skyrm/qstate.hpp"

namespace skyrm {

// Target texture: winding l (charge -l), in-plane offset phi0 (0 Neel,
// pi/2 Bloch), radius r0 (<= 0 means x_max), truncation rank d (<= 0 means
// |l|+1), optional explicit weights (else the default rule).
struct SkyrmionSpec {
    int l = 1;
    Real phi0 = 0;
    Real r0 = 0;
    ModeGrid grid{16, 1.0};
    int d = 0;
    RVec weights;

    int rank() const { return d > 0 ? d : std::abs(l) + 1; }
    Real radius() const { return r0 > 0 ? r0 : grid.x_max; }
    void validate() const;
};

enum class SynthMethod { analytic_q1, spectral };

std::string to_string(SynthMethod m);
SynthMethod synth_method_from_string(const std::string& s);

// 2M x 2M Hermitian map of the target texture: HH = cos^2(Theta/2),
// VV = sin^2(Theta/2), HV = sin(Theta) e^{i Phi}, VH = HV^dagger, with
// Theta = pi * min(r/R0, 1), r = sqrt(x^2 + x'^2), Phi = l*atan2(x', x) + phi0.
// Generally not PSD; spectral truncation repairs that.
CMat auxiliary_matrix(const SkyrmionSpec& spec);

// Keeps the d leading eigenvectors as an equal-weight (or caller-weighted)
// ensemble. Requires d eigenvalues above 1e-10.
DensityMatrix truncate_to_density(const CMat& a, int d, RVec weights = RVec(),
                                  const std::string& party = "A");
// Same, with weights proportional to the kept eigenvalues.
DensityMatrix truncate_to_density_eigenweighted(const CMat& a, int d,
                                                const std::string& party = "A");

// Analytic |Q| = 1 mode pair on the grid, unit-normalized; sign -1 gives the
// charge -1 pair, +1 its charge +1 mirror. Orthogonal to machine precision on
// the sign-symmetric grid.
std::pair<LabeledState, LabeledState> analytic_modes_q1(const ModeGrid& grid, int sign,
                                                        const std::string& party = "A");

DensityMatrix build_single_photon_skyrmion(const SkyrmionSpec& spec,
                                           SynthMethod method = SynthMethod::spectral,
                                           const std::string& party = "A");

}  // namespace skyrm
