#pragma once
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "skyrm/errors.hpp"
#include "skyrm/grid.hpp"

namespace skyrm {

using Real = double;
using Complex = std::complex<Real>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;
using Index = Eigen::Index;

enum class FactorKind { pseudospin, mode };

// One tensor factor: party id + kind + dimension. (party, kind) pairs are
// unique within a state, so the pair doubles as the lookup key.
struct FactorLabel {
    std::string party;
    FactorKind kind = FactorKind::pseudospin;
    Index dim = 2;

    bool same_id(const FactorLabel& o) const { return party == o.party && kind == o.kind; }
    bool operator==(const FactorLabel& o) const { return same_id(o) && dim == o.dim; }
};

std::string to_string(FactorKind k);
FactorKind factor_kind_from_string(const std::string& s);

inline FactorLabel spin_factor(const std::string& party) {
    return {party, FactorKind::pseudospin, 2};
}
inline FactorLabel mode_factor(const std::string& party, Index dim) {
    return {party, FactorKind::mode, dim};
}

Index total_dim(const std::vector<FactorLabel>& factors);
void check_unique_labels(const std::vector<FactorLabel>& factors);
// Index of the factor matching `id` (dim ignored); throws UnknownFactor.
std::size_t find_factor(const std::vector<FactorLabel>& factors, const FactorLabel& id);

// Composite indexing is row-major over the factor list: the leftmost factor is
// most significant. A [pseudospin, mode] party therefore indexes as sigma*M + x,
// giving the 2x2 block layout [HH HV; VH VV] of M x M blocks.
std::vector<Index> factor_strides(const std::vector<FactorLabel>& factors);

struct LabeledState {
    std::vector<FactorLabel> factors;
    CVec amplitudes;     // pure form (size == total_dim), or empty
    RVec weights;        // ensemble form: rho = sum_k w_k |v_k><v_k|
    CMat vectors;        // ensemble columns, total_dim x rank

    bool is_pure() const { return amplitudes.size() > 0; }
    Index dim() const { return total_dim(factors); }
    void validate() const;  // norm / weight invariants
};

struct ValidationReport {
    Real hermiticity = 0;      // max elementwise |rho - rho^dagger|
    Real min_eigenvalue = 0;
    Real trace_deviation = 0;  // |tr(rho) - 1|

    bool pass(Real tol) const {
        return hermiticity <= tol && min_eigenvalue >= -tol && trace_deviation <= tol;
    }
};

// Hermitian PSD unit-trace operator over labeled factors. Storage is dense
// XOR factored (weights + stacked vectors); factored vectors need not be
// orthogonal, only the weights must be nonnegative.
struct DensityMatrix {
    std::vector<FactorLabel> factors;
    CMat rho;      // dense storage when size() > 0
    RVec weights;  // factored storage otherwise
    CMat vectors;  // total_dim x rank, columns paired with weights

    bool is_factored() const { return rho.size() == 0; }
    Index dim() const { return total_dim(factors); }
    Index rank() const { return is_factored() ? weights.size() : rho.rows(); }
    CMat to_dense() const;
    Real trace() const;
};

DensityMatrix density_from_dense(std::vector<FactorLabel> factors, CMat rho);
// Clamps weights in [-1e-10, 0) to zero and renormalizes the trace; weights
// below -1e-10 throw InsufficientPositiveSpectrum.
DensityMatrix density_from_factored(std::vector<FactorLabel> factors, RVec weights, CMat vectors);
DensityMatrix density_from_pure(std::vector<FactorLabel> factors, CVec amplitudes);

// Eigenpairs sorted descending; each eigenvector is phase-fixed so that its
// largest-modulus component is real positive (first such component on ties).
std::pair<RVec, CMat> spectral_decompose(const CMat& h, Real herm_tol = 1e-8);

ValidationReport validate_density(const DensityMatrix& rho);

// Contracts away every factor not in `keep`; result factors follow the order
// requested in `keep`. Pure and factored inputs contract vector-by-vector
// without materializing the joint density matrix.
DensityMatrix partial_trace(const LabeledState& state, const std::vector<FactorLabel>& keep);
DensityMatrix partial_trace(const DensityMatrix& state, const std::vector<FactorLabel>& keep);

DensityMatrix reorder_factors(const DensityMatrix& state, const std::vector<FactorLabel>& order);

DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace skyrm
