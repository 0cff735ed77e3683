#pragma once
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "skyrm/bipartite.hpp"
#include "skyrm/qstate.hpp"
#include "skyrm/texture.hpp"

namespace skyrm {

enum class DephasingMode { analytic, monte_carlo };

std::string to_string(DephasingMode m);
DephasingMode dephasing_mode_from_string(const std::string& s);

struct DephasingSpec {
    Real mu = 0;
    Real sigma = 0;
    DephasingMode mode = DephasingMode::analytic;
    long shots = 1000;
    std::uint64_t seed = 0;
};

struct WishartSpec {
    Index dim = 0;
    Index k = 0;
    Real epsilon = 0;
    std::uint64_t seed = 0;
};

// Gaussian random phase on the inter-mode coherences: every off-diagonal
// coefficient picks up <e^{i phi}>, exp(i mu - sigma^2/2) analytically, or
// the mean over `shots` sampled phases (one shared phase per shot). Diagonal
// coefficients are untouched, so local reductions are exactly invariant.
TwoPhotonCoeffState dephase(const TwoPhotonCoeffState& state, const DephasingSpec& spec);

// The sampled (or closed-form) attenuation factor <e^{i phi}> itself.
Complex dephasing_factor(const DephasingSpec& spec);

// rho = G G^dagger / tr, G complex Gaussian D x K (re/im each N(0, 1/sqrt 2)),
// drawn column-major from a counter RNG stream keyed by (D, K). Kept factored.
DensityMatrix wishart_density(const WishartSpec& spec, std::vector<FactorLabel> factors);

// Convex combination (1-eps) a + eps b; factored inputs concatenate.
DensityMatrix mix(const DensityMatrix& a, const DensityMatrix& b, Real epsilon);

// (1-eps) rho + eps I/dim. The Stokes field is invariant: identity shifts
// cancel in S_z and leave coherences scaled uniformly.
DensityMatrix depolarize(const DensityMatrix& rho, Real epsilon);

enum class Observable { local, nonlocal };

std::string to_string(Observable o);
Observable observable_from_string(const std::string& s);

struct SweepRow {
    std::vector<std::pair<std::string, Real>> params;
    TextureReport report;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::string error;  // nonempty when this point failed; report is then blank
};

struct SweepResult {
    std::vector<std::string> param_names;
    std::vector<SweepRow> rows;
};

// One row per sigma; the analyzed reduction is rho_A (local) or the
// (sigma_B, x_A) hybrid (nonlocal). Points run independently.
SweepResult dephasing_sweep(const TwoPhotonCoeffState& base, const std::vector<Real>& sigmas,
                            const DephasingSpec& proto, Observable obs, const ModeGrid& grid,
                            int threads = 1);

// Grid over (K, epsilon) for mixing psi with a Wishart draw.
SweepResult wishart_sweep(const LabeledState& psi, const std::vector<Index>& ks,
                          const std::vector<Real>& epsilons, std::uint64_t seed, Observable obs,
                          const ModeGrid& grid, int threads = 1);

// Smallest swept sigma whose row has integer_residual > 0.25; NaN when the
// charge never breaks down on the grid.
Real breakdown_sigma(const SweepResult& result, const std::string& param = "sigma");

}  // namespace skyrm
