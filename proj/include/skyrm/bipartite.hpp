#pragma once
#include <string>
#include <vector>

#include "skyrm/qstate.hpp"
#include "skyrm/texture.hpp"

namespace skyrm {

// Two-photon state in coefficient form over orthonormal single-party modes:
// rho = sum_mn c_mn |psi_m><psi_n| with psi_m = u_m (x) u_m^* (conjugated)
// or u_m (x) u_m (plain). c is d x d Hermitian PSD with unit trace; dephasing
// acts on c directly, so the (2M)^2-dimensional joint operator never needs to
// be materialized.
struct TwoPhotonCoeffState {
    Index m = 0;              // mode dimension per party
    std::vector<CVec> modes;  // d vectors of length 2M, pseudospin-major
    bool conjugated = true;
    CMat c;
    std::string party_a = "A";
    std::string party_b = "B";

    Index d() const { return Index(modes.size()); }
    std::vector<FactorLabel> factors() const;
    void validate() const;
};

struct FourReductions {
    DensityMatrix rho_a;             // (sigma_A, x_A)
    DensityMatrix rho_b;             // (sigma_B, x_B)
    DensityMatrix nl_spin_a_mode_b;  // (sigma_A, x_B)
    DensityMatrix nl_spin_b_mode_a;  // (sigma_B, x_A)
};

struct NestedReport {
    TextureReport joint;
    TextureReport local_a;
    TextureReport local_b;
    TextureReport nonlocal_spin_a_mode_b;
    TextureReport nonlocal_spin_b_mode_a;
    bool nested = false;
};

// Checks mutual orthonormality of the mode list (throws NonOrthogonalModes).
void check_orthonormal(const std::vector<CVec>& modes, Real tol = 1e-10);

// conjugate_b true: Psi = sum_i a_i |u_i>_A |u_i^*>_B (phase must be 0).
// conjugate_b false: Bell pair (|u1 u1> + e^{i phase} |u2 u2>)/sqrt(2), d = 2.
// Default amplitudes are uniform 1/sqrt(d).
LabeledState build_two_photon(const std::vector<CVec>& modes, Index m, bool conjugate_b,
                              Real phase = 0, CVec amps = CVec());
TwoPhotonCoeffState two_photon_coeff(const std::vector<CVec>& modes, Index m, bool conjugate_b,
                                     Real phase = 0, CVec amps = CVec());

// Ensemble expansion of the coefficient form (spectral split of c). Gauge of
// the ensemble vectors is the eigensolver's; use only where a projector sum
// is consumed, not for joint-wavefunction textures.
LabeledState to_labeled(const TwoPhotonCoeffState& state);

FourReductions reduce_all_subspaces(const LabeledState& psi);
FourReductions reduce_all_subspaces(const DensityMatrix& rho);
FourReductions reduce_all_subspaces(const TwoPhotonCoeffState& state);

NestedReport nested_report(const LabeledState& psi);
NestedReport nested_report(const LabeledState& psi, const ModeGrid& grid);

// At least two of the five reports carry a clean nonzero integer charge.
bool is_nested(const NestedReport& rep);

}  // namespace skyrm
