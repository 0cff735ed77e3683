#pragma once
#include <array>
#include <string>
#include <vector>

#include "skyrm/bipartite.hpp"
#include "skyrm/qstate.hpp"

namespace skyrm {

enum class VarrhoKind { uniform, edge_concentrated };

std::string to_string(VarrhoKind k);
VarrhoKind varrho_kind_from_string(const std::string& s);

// Diagonal single-photon background: uniform I/(2M), or equal weight on the
// edge_bins outermost mode bins at each end for both polarizations
// (2 * 2 * edge_bins occupied levels). edge_bins <= 0 means max(2, M/10).
struct VarrhoSpec {
    VarrhoKind kind = VarrhoKind::uniform;
    int m = 0;
    int edge_bins = 0;

    int bins() const { return edge_bins > 0 ? edge_bins : std::max(2, m / 10); }
};

DensityMatrix single_photon_varrho(const VarrhoSpec& spec, const std::string& party = "A");

// Bipartite reduction of the N-photon biseparable mixture: for any photon
// pair the reduced state is
//   w1 |Psi0><Psi0| + w2 (rho0 (x) varrho) + w2 (varrho (x) rho0)
//     + w3 (varrho (x) varrho),
// w1 = 2/(N(N-1)), w2 = (N-2)/(N(N-1)) on each cross term twice... see
// weights(); rho0 = (|u1><u1| + |u2><u2|)/2 from the Bell modes. The four
// terms are kept symbolic; the (2M)^2-dim operator is never assembled, since
// every reduction of a product term factorizes into single-party marginals.
struct PairMixture {
    Real w_bell = 1;          // 2/(N(N-1))
    Real w_cross = 0;         // 2(N-2)/(N(N-1)), applied to each cross term
    Real w_background = 0;    // (N-2)(N-3)/(N(N-1))
    LabeledState bell;        // pure two-photon component
    DensityMatrix rho0_a, rho0_b;      // single-party Bell marginal per side
    DensityMatrix varrho_a, varrho_b;  // background per side
};

PairMixture reduced_pair_state(long n, const LabeledState& bell, const DensityMatrix& varrho);

// Exact mixture weights (w_bell, w_cross, w_background); the total
// w_bell + 2 w_cross + w_background is identically 1.
std::array<Real, 3> multiphoton_weights(long n);

FourReductions reduce_all_subspaces(const PairMixture& state);

// Dense (2M)^2 x (2M)^2 assembly for small-M cross-checks.
DensityMatrix pair_mixture_dense(const PairMixture& state);

// Nested report of the reduced pair; the joint slot reports the Bell
// component's wavefunction texture (the mixture itself has no wavefunction).
NestedReport multiphoton_nested_report(long n, const VarrhoSpec& varrho,
                                       const std::vector<CVec>& modes, const ModeGrid& grid);

}  // namespace skyrm
