#include "skyrm/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <unsupported/Eigen/KroneckerProduct>

namespace skyrm {

std::string to_string(FactorKind k) {
    return k == FactorKind::pseudospin ? "pseudospin" : "mode";
}

FactorKind factor_kind_from_string(const std::string& s) {
    if (s == "pseudospin") return FactorKind::pseudospin;
    if (s == "mode") return FactorKind::mode;
    throw WrongFactorShape("unknown factor kind '" + s + "'");
}

Index total_dim(const std::vector<FactorLabel>& factors) {
    Index d = 1;
    for (const auto& f : factors) {
        if (f.dim < 1) throw WrongFactorShape("factor '" + f.party + "' has dim < 1");
        d *= f.dim;
    }
    return d;
}

void check_unique_labels(const std::vector<FactorLabel>& factors) {
    for (std::size_t i = 0; i < factors.size(); ++i)
        for (std::size_t j = i + 1; j < factors.size(); ++j)
            if (factors[i].same_id(factors[j]))
                throw LabelCollision("duplicate factor (" + factors[i].party + ", " +
                                     to_string(factors[i].kind) + ")");
}

std::size_t find_factor(const std::vector<FactorLabel>& factors, const FactorLabel& id) {
    for (std::size_t i = 0; i < factors.size(); ++i)
        if (factors[i].same_id(id)) return i;
    throw UnknownFactor("(" + id.party + ", " + to_string(id.kind) + ") not present");
}

std::vector<Index> factor_strides(const std::vector<FactorLabel>& factors) {
    std::vector<Index> s(factors.size(), 1);
    for (std::size_t i = factors.size(); i-- > 1;) s[i - 1] = s[i] * factors[i].dim;
    return s;
}

void LabeledState::validate() const {
    check_unique_labels(factors);
    const Index d = dim();
    if (is_pure()) {
        if (amplitudes.size() != d) throw ShapeMismatch("amplitude length != product of dims");
        if (std::abs(amplitudes.norm() - 1.0) > 1e-12)
            throw NonOrthonormalInput("pure amplitudes not unit norm");
        return;
    }
    if (vectors.rows() != d || vectors.cols() != weights.size())
        throw ShapeMismatch("ensemble vector block mismatched with weights");
    Real wsum = 0;
    for (Index k = 0; k < weights.size(); ++k) {
        if (weights[k] < -1e-12) throw InsufficientPositiveSpectrum("negative ensemble weight");
        if (std::abs(vectors.col(k).norm() - 1.0) > 1e-10)
            throw NonOrthonormalInput("ensemble vector not unit norm");
        wsum += weights[k];
    }
    if (std::abs(wsum - 1.0) > 1e-12) throw ShapeMismatch("ensemble weights do not sum to 1");
}

CMat DensityMatrix::to_dense() const {
    if (!is_factored()) return rho;
    return vectors * weights.cast<Complex>().asDiagonal() * vectors.adjoint();
}

Real DensityMatrix::trace() const {
    if (!is_factored()) return rho.trace().real();
    Real t = 0;
    for (Index k = 0; k < weights.size(); ++k) t += weights[k] * vectors.col(k).squaredNorm();
    return t;
}

DensityMatrix density_from_dense(std::vector<FactorLabel> factors, CMat rho) {
    check_unique_labels(factors);
    const Index d = total_dim(factors);
    if (rho.rows() != d || rho.cols() != d) throw ShapeMismatch("dense block != product of dims");
    const Real herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-10) throw NonHermitian("residual " + std::to_string(herm));
    rho = 0.5 * (rho + rho.adjoint()).eval();
    const Real tr = rho.trace().real();
    if (tr <= 0) throw InsufficientPositiveSpectrum("nonpositive trace");
    rho /= tr;
    DensityMatrix out;
    out.factors = std::move(factors);
    out.rho = std::move(rho);
    return out;
}

DensityMatrix density_from_factored(std::vector<FactorLabel> factors, RVec weights, CMat vectors) {
    check_unique_labels(factors);
    const Index d = total_dim(factors);
    if (vectors.rows() != d || vectors.cols() != weights.size())
        throw ShapeMismatch("factored block mismatched with weights");
    for (Index k = 0; k < weights.size(); ++k) {
        if (weights[k] < -1e-10)
            throw InsufficientPositiveSpectrum("weight " + std::to_string(weights[k]));
        if (weights[k] < 0) weights[k] = 0;
    }
    Real tr = 0;
    for (Index k = 0; k < weights.size(); ++k) tr += weights[k] * vectors.col(k).squaredNorm();
    if (tr <= 0) throw InsufficientPositiveSpectrum("zero total weight");
    weights /= tr;
    DensityMatrix out;
    out.factors = std::move(factors);
    out.weights = std::move(weights);
    out.vectors = std::move(vectors);
    return out;
}

DensityMatrix density_from_pure(std::vector<FactorLabel> factors, CVec amplitudes) {
    const Real nrm = amplitudes.norm();
    if (std::abs(nrm - 1.0) > 1e-9) throw NonOrthonormalInput("pure amplitudes not unit norm");
    RVec w(1);
    w[0] = 1.0;
    CMat v(amplitudes.size(), 1);
    v.col(0) = amplitudes / nrm;
    return density_from_factored(std::move(factors), std::move(w), std::move(v));
}

std::pair<RVec, CMat> spectral_decompose(const CMat& h, Real herm_tol) {
    if (h.rows() != h.cols()) throw ShapeMismatch("spectral_decompose needs a square matrix");
    const Real herm = (h - h.adjoint()).cwiseAbs().maxCoeff();
    if (herm > herm_tol) throw NonHermitian("residual " + std::to_string(herm));
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (h + h.adjoint()));
    const Index n = h.rows();
    RVec vals(n);
    CMat vecs(n, n);
    // Eigen returns ascending order; flip to descending.
    for (Index i = 0; i < n; ++i) {
        vals[i] = es.eigenvalues()[n - 1 - i];
        vecs.col(i) = es.eigenvectors().col(n - 1 - i);
    }
    // Phase gauge: largest-modulus component (first on ties) made real positive.
    for (Index i = 0; i < n; ++i) {
        Index imax = 0;
        Real amax = -1;
        for (Index r = 0; r < n; ++r) {
            const Real a = std::abs(vecs(r, i));
            if (a > amax + 1e-15) {
                amax = a;
                imax = r;
            }
        }
        if (amax > 0) vecs.col(i) *= std::conj(vecs(imax, i)) / amax;
    }
    return {std::move(vals), std::move(vecs)};
}

ValidationReport validate_density(const DensityMatrix& state) {
    ValidationReport rep;
    const CMat d = state.to_dense();
    rep.hermiticity = (d - d.adjoint()).cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
    rep.min_eigenvalue = es.eigenvalues().minCoeff();
    rep.trace_deviation = std::abs(d.trace().real() - 1.0);
    return rep;
}

namespace {

// Index bookkeeping for keep x trace splits: orig(k, t) is the composite index
// in the original factor order for kept digit-block k and traced digit-block t.
struct SplitMap {
    Index keep_dim = 1;
    Index trace_dim = 1;
    std::vector<Index> keep_stub;   // keep_stub[k]  = sum of kept digits * original strides
    std::vector<Index> trace_stub;  // trace_stub[t] = sum of traced digits * original strides
    Index orig(Index k, Index t) const { return keep_stub[std::size_t(k)] + trace_stub[std::size_t(t)]; }
};

std::vector<Index> digit_stubs(const std::vector<Index>& dims, const std::vector<Index>& strides) {
    Index total = 1;
    for (Index d : dims) total *= d;
    std::vector<Index> stub(static_cast<std::size_t>(total), 0);
    for (Index flat = 0; flat < total; ++flat) {
        Index rem = flat, acc = 0;
        for (std::size_t j = dims.size(); j-- > 0;) {
            acc += (rem % dims[j]) * strides[j];
            rem /= dims[j];
        }
        stub[std::size_t(flat)] = acc;
    }
    return stub;
}

SplitMap split_map(const std::vector<FactorLabel>& factors, const std::vector<FactorLabel>& keep) {
    if (keep.empty()) throw UnknownFactor("keep set is empty");
    check_unique_labels(keep);
    const auto strides = factor_strides(factors);
    std::vector<bool> kept(factors.size(), false);
    std::vector<Index> keep_dims, keep_strides, trace_dims, trace_strides;
    for (const auto& id : keep) {
        const std::size_t p = find_factor(factors, id);
        kept[p] = true;
        keep_dims.push_back(factors[p].dim);
        keep_strides.push_back(strides[p]);
    }
    for (std::size_t p = 0; p < factors.size(); ++p)
        if (!kept[p]) {
            trace_dims.push_back(factors[p].dim);
            trace_strides.push_back(strides[p]);
        }
    SplitMap m;
    for (Index d : keep_dims) m.keep_dim *= d;
    for (Index d : trace_dims) m.trace_dim *= d;
    m.keep_stub = digit_stubs(keep_dims, keep_strides);
    m.trace_stub = digit_stubs(trace_dims, trace_strides);
    return m;
}

std::vector<FactorLabel> kept_labels(const std::vector<FactorLabel>& factors,
                                     const std::vector<FactorLabel>& keep) {
    std::vector<FactorLabel> out;
    out.reserve(keep.size());
    for (const auto& id : keep) out.push_back(factors[find_factor(factors, id)]);
    return out;
}

// psi reshaped to keep x trace, then rho_keep = Psi Psi^dagger.
void accumulate_pure(CMat& acc, const CVec& psi, const SplitMap& m, Real w) {
    CMat block(m.keep_dim, m.trace_dim);
    for (Index k = 0; k < m.keep_dim; ++k)
        for (Index t = 0; t < m.trace_dim; ++t) block(k, t) = psi[m.orig(k, t)];
    acc.noalias() += w * (block * block.adjoint());
}

}  // namespace

DensityMatrix partial_trace(const LabeledState& state, const std::vector<FactorLabel>& keep) {
    const SplitMap m = split_map(state.factors, keep);
    CMat acc = CMat::Zero(m.keep_dim, m.keep_dim);
    if (state.is_pure()) {
        accumulate_pure(acc, state.amplitudes, m, 1.0);
    } else {
        for (Index k = 0; k < state.weights.size(); ++k)
            accumulate_pure(acc, state.vectors.col(k), m, state.weights[k]);
    }
    return density_from_dense(kept_labels(state.factors, keep), std::move(acc));
}

DensityMatrix partial_trace(const DensityMatrix& state, const std::vector<FactorLabel>& keep) {
    const SplitMap m = split_map(state.factors, keep);
    if (state.is_factored()) {
        CMat acc = CMat::Zero(m.keep_dim, m.keep_dim);
        for (Index k = 0; k < state.weights.size(); ++k)
            accumulate_pure(acc, state.vectors.col(k), m, state.weights[k]);
        return density_from_dense(kept_labels(state.factors, keep), std::move(acc));
    }
    CMat acc(m.keep_dim, m.keep_dim);
    for (Index i = 0; i < m.keep_dim; ++i)
        for (Index j = 0; j < m.keep_dim; ++j) {
            Complex s = 0;
            for (Index t = 0; t < m.trace_dim; ++t) s += state.rho(m.orig(i, t), m.orig(j, t));
            acc(i, j) = s;
        }
    return density_from_dense(kept_labels(state.factors, keep), std::move(acc));
}

DensityMatrix reorder_factors(const DensityMatrix& state, const std::vector<FactorLabel>& order) {
    if (order.size() != state.factors.size())
        throw UnknownFactor("reorder requires a full permutation of factors");
    const SplitMap m = split_map(state.factors, order);  // trace side is empty
    DensityMatrix out;
    out.factors = kept_labels(state.factors, order);
    if (state.is_factored()) {
        out.weights = state.weights;
        out.vectors.resize(state.vectors.rows(), state.vectors.cols());
        for (Index i = 0; i < m.keep_dim; ++i) out.vectors.row(i) = state.vectors.row(m.orig(i, 0));
    } else {
        out.rho.resize(m.keep_dim, m.keep_dim);
        for (Index i = 0; i < m.keep_dim; ++i)
            for (Index j = 0; j < m.keep_dim; ++j) out.rho(i, j) = state.rho(m.orig(i, 0), m.orig(j, 0));
    }
    return out;
}

DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b) {
    for (const auto& fa : a.factors)
        for (const auto& fb : b.factors)
            if (fa.same_id(fb))
                throw LabelCollision("(" + fa.party + ", " + to_string(fa.kind) + ") on both sides");
    std::vector<FactorLabel> factors = a.factors;
    factors.insert(factors.end(), b.factors.begin(), b.factors.end());
    if (a.is_factored() && b.is_factored()) {
        const Index ra = a.weights.size(), rb = b.weights.size();
        RVec w(ra * rb);
        CMat v(a.vectors.rows() * b.vectors.rows(), ra * rb);
        for (Index i = 0; i < ra; ++i)
            for (Index j = 0; j < rb; ++j) {
                w[i * rb + j] = a.weights[i] * b.weights[j];
                v.col(i * rb + j) = Eigen::kroneckerProduct(a.vectors.col(i), b.vectors.col(j));
            }
        return density_from_factored(std::move(factors), std::move(w), std::move(v));
    }
    return density_from_dense(std::move(factors),
                              Eigen::kroneckerProduct(a.to_dense(), b.to_dense()).eval());
}

}  // namespace skyrm
