#include "skyrm/bipartite.hpp"

#include <algorithm>
#include <cmath>

namespace skyrm {

std::vector<FactorLabel> TwoPhotonCoeffState::factors() const {
    return {spin_factor(party_a), mode_factor(party_a, m), spin_factor(party_b),
            mode_factor(party_b, m)};
}

void TwoPhotonCoeffState::validate() const {
    if (m < 1 || modes.empty()) throw ShapeMismatch("empty coefficient state");
    for (const auto& u : modes)
        if (u.size() != 2 * m) throw ShapeMismatch("mode length != 2M");
    check_orthonormal(modes);
    if (c.rows() != d() || c.cols() != d()) throw ShapeMismatch("coefficient matrix != d x d");
    if ((c - c.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
        throw NonHermitian("coefficient matrix");
    if (std::abs(c.trace().real() - 1.0) > 1e-10)
        throw NotCoefficientForm("coefficient trace != 1");
}

void check_orthonormal(const std::vector<CVec>& modes, Real tol) {
    for (std::size_t i = 0; i < modes.size(); ++i)
        for (std::size_t j = i; j < modes.size(); ++j) {
            const Complex g = modes[i].dot(modes[j]);
            const Complex want = i == j ? Complex(1, 0) : Complex(0, 0);
            if (std::abs(g - want) > tol)
                throw NonOrthogonalModes("Gram deviation " + std::to_string(std::abs(g - want)) +
                                         " at (" + std::to_string(i) + "," + std::to_string(j) + ")");
        }
}

namespace {

// Validates the construction inputs and returns the normalized literal
// amplitude vector, with the Bell phase folded onto the second term.
CVec normalized_amps(const std::vector<CVec>& modes, Index m, bool conjugate_b, Real phase,
                     CVec amps) {
    if (modes.empty()) throw ShapeMismatch("no modes");
    for (const auto& u : modes)
        if (u.size() != 2 * m) throw ShapeMismatch("mode length != 2M");
    check_orthonormal(modes);
    const Index d = Index(modes.size());
    if (conjugate_b) {
        if (phase != 0) throw PhaseWithConjugation("relative phase requires the Bell form");
    } else {
        if (d != 2) throw ShapeMismatch("Bell form is defined for d = 2");
    }
    if (amps.size() == 0) amps = CVec::Constant(d, Complex(1.0 / std::sqrt(Real(d)), 0));
    if (amps.size() != d) throw ShapeMismatch("amplitude list length != d");
    if (!conjugate_b) amps[1] *= Complex(std::cos(phase), std::sin(phase));
    const Real nrm = amps.norm();
    if (nrm <= 0) throw ShapeMismatch("zero amplitude vector");
    return amps / nrm;
}

// Literal product expansion: Psi = sum_i a_i u_i (x) v_i with v_i = u_i or
// u_i^*. Amplitude gauge is preserved exactly as given.
CVec expand(const std::vector<CVec>& modes, Index m, bool conjugate_b, const CVec& amps) {
    const Index dim = 2 * m;
    CVec psi = CVec::Zero(dim * dim);
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const CVec& u = modes[i];
        const CVec v = conjugate_b ? u.conjugate() : u;
        for (Index p = 0; p < dim; ++p) {
            if (u[p] == Complex(0, 0)) continue;
            psi.segment(p * dim, dim) += (amps[Index(i)] * u[p]) * v;
        }
    }
    return psi;
}

}  // namespace

TwoPhotonCoeffState two_photon_coeff(const std::vector<CVec>& modes, Index m, bool conjugate_b,
                                     Real phase, CVec amps) {
    const CVec a = normalized_amps(modes, m, conjugate_b, phase, std::move(amps));
    TwoPhotonCoeffState s;
    s.m = m;
    s.modes = modes;
    s.conjugated = conjugate_b;
    s.c = a * a.adjoint();
    return s;
}

LabeledState build_two_photon(const std::vector<CVec>& modes, Index m, bool conjugate_b,
                              Real phase, CVec amps) {
    const CVec a = normalized_amps(modes, m, conjugate_b, phase, std::move(amps));
    LabeledState psi;
    psi.factors = {spin_factor("A"), mode_factor("A", m), spin_factor("B"), mode_factor("B", m)};
    psi.amplitudes = expand(modes, m, conjugate_b, a);
    psi.amplitudes /= psi.amplitudes.norm();
    return psi;
}

LabeledState to_labeled(const TwoPhotonCoeffState& state) {
    state.validate();
    auto [vals, vecs] = spectral_decompose(state.c);
    std::vector<Index> kept;
    for (Index k = 0; k < vals.size(); ++k) {
        if (vals[k] < -1e-10) throw InsufficientPositiveSpectrum("coefficient matrix not PSD");
        if (vals[k] > 1e-14) kept.push_back(k);
    }
    LabeledState out;
    out.factors = state.factors();
    const Index dim = 2 * state.m;
    if (kept.size() == 1) {
        CVec a = vecs.col(kept[0]);
        out.amplitudes = expand(state.modes, state.m, state.conjugated, a);
        out.amplitudes /= out.amplitudes.norm();
        return out;
    }
    out.weights.resize(Index(kept.size()));
    out.vectors.resize(dim * dim, Index(kept.size()));
    Real total = 0;
    for (std::size_t k = 0; k < kept.size(); ++k) total += vals[kept[k]];
    for (std::size_t k = 0; k < kept.size(); ++k) {
        out.weights[Index(k)] = vals[kept[k]] / total;
        CVec chi = expand(state.modes, state.m, state.conjugated, vecs.col(kept[k]));
        out.vectors.col(Index(k)) = chi / chi.norm();
    }
    return out;
}

namespace {

struct PartySplit {
    FactorLabel spin_a, mode_a, spin_b, mode_b;
};

PartySplit split_parties(const std::vector<FactorLabel>& factors) {
    if (factors.size() != 4) throw WrongFactorShape("need exactly four factors");
    std::vector<std::string> parties;
    for (const auto& f : factors)
        if (std::find(parties.begin(), parties.end(), f.party) == parties.end())
            parties.push_back(f.party);
    if (parties.size() != 2) throw WrongFactorShape("need exactly two parties");
    PartySplit s;
    auto pick = [&](const std::string& party, FactorKind kind) -> FactorLabel {
        for (const auto& f : factors)
            if (f.party == party && f.kind == kind) return f;
        throw WrongFactorShape("party '" + party + "' lacks a " + to_string(kind) + " factor");
    };
    s.spin_a = pick(parties[0], FactorKind::pseudospin);
    s.mode_a = pick(parties[0], FactorKind::mode);
    s.spin_b = pick(parties[1], FactorKind::pseudospin);
    s.mode_b = pick(parties[1], FactorKind::mode);
    if (s.mode_a.dim != s.mode_b.dim) throw WrongFactorShape("mode dimensions differ");
    return s;
}

template <typename State>
FourReductions reduce_impl(const State& state) {
    const PartySplit s = split_parties(state.factors);
    FourReductions r;
    r.rho_a = partial_trace(state, {s.spin_a, s.mode_a});
    r.rho_b = partial_trace(state, {s.spin_b, s.mode_b});
    r.nl_spin_a_mode_b = partial_trace(state, {s.spin_a, s.mode_b});
    r.nl_spin_b_mode_a = partial_trace(state, {s.spin_b, s.mode_a});
    return r;
}

}  // namespace

FourReductions reduce_all_subspaces(const LabeledState& psi) { return reduce_impl(psi); }
FourReductions reduce_all_subspaces(const DensityMatrix& rho) { return reduce_impl(rho); }

FourReductions reduce_all_subspaces(const TwoPhotonCoeffState& state) {
    return reduce_impl(to_labeled(state));
}

bool is_nested(const NestedReport& rep) {
    const TextureReport* all[5] = {&rep.joint, &rep.local_a, &rep.local_b,
                                   &rep.nonlocal_spin_a_mode_b, &rep.nonlocal_spin_b_mode_a};
    int hits = 0;
    for (const auto* t : all)
        if (t->q_rounded != 0 && t->integer_residual < 0.05) ++hits;
    return hits >= 2;
}

NestedReport nested_report(const LabeledState& psi, const ModeGrid& grid) {
    if (!psi.is_pure()) throw WrongFactorShape("nested report needs a pure two-photon state");
    const FourReductions r = reduce_all_subspaces(psi);
    NestedReport rep;
    rep.joint = analyze_texture(stokes_from_wavefunction(psi, grid));
    rep.local_a = analyze_texture(stokes_from_density(r.rho_a, grid));
    rep.local_b = analyze_texture(stokes_from_density(r.rho_b, grid));
    rep.nonlocal_spin_a_mode_b = analyze_texture(stokes_from_density(r.nl_spin_a_mode_b, grid));
    rep.nonlocal_spin_b_mode_a = analyze_texture(stokes_from_density(r.nl_spin_b_mode_a, grid));
    rep.nested = is_nested(rep);
    return rep;
}

NestedReport nested_report(const LabeledState& psi) {
    const PartySplit s = split_parties(psi.factors);
    return nested_report(psi, ModeGrid(int(s.mode_a.dim), 1.0));
}

}  // namespace skyrm
