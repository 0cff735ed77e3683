#include "skyrm/multiphoton.hpp"

#include <cmath>

namespace skyrm {

std::string to_string(VarrhoKind k) {
    return k == VarrhoKind::uniform ? "uniform" : "edge_concentrated";
}

VarrhoKind varrho_kind_from_string(const std::string& s) {
    if (s == "uniform") return VarrhoKind::uniform;
    if (s == "edge_concentrated" || s == "edge") return VarrhoKind::edge_concentrated;
    throw ShapeMismatch("unknown varrho kind '" + s + "'");
}

DensityMatrix single_photon_varrho(const VarrhoSpec& spec, const std::string& party) {
    if (spec.m < 3) throw ShapeMismatch("varrho needs M >= 3");
    const Index m = spec.m;
    std::vector<FactorLabel> factors{spin_factor(party), mode_factor(party, m)};
    CMat rho = CMat::Zero(2 * m, 2 * m);
    if (spec.kind == VarrhoKind::uniform) {
        rho.diagonal().setConstant(1.0 / Real(2 * m));
        return density_from_dense(std::move(factors), std::move(rho));
    }
    const int eb = spec.bins();
    if (2 * eb > spec.m) throw EdgeBinsTooLarge(std::to_string(eb) + " bins per side, M = " +
                                                std::to_string(spec.m));
    const Real w = 1.0 / Real(4 * eb);
    for (Index s = 0; s < 2; ++s)
        for (Index b = 0; b < eb; ++b) {
            rho(s * m + b, s * m + b) = w;
            rho(s * m + (m - 1 - b), s * m + (m - 1 - b)) = w;
        }
    return density_from_dense(std::move(factors), std::move(rho));
}

std::array<Real, 3> multiphoton_weights(long n) {
    if (n < 2) throw ShapeMismatch("need N >= 2 photons");
    const Real denom = Real(n) * Real(n - 1);
    return {2.0 / denom, 2.0 * Real(n - 2) / denom, Real(n - 2) * Real(n - 3) / denom};
}

namespace {

// Relabels a single-party state onto `party`, normalized to [spin, mode] order.
DensityMatrix relabel_party(const DensityMatrix& rho, const std::string& party) {
    if (rho.factors.size() != 2) throw ShapeMismatch("single-party state needs two factors");
    const FactorLabel *spin = nullptr, *mode = nullptr;
    for (const auto& f : rho.factors)
        (f.kind == FactorKind::pseudospin ? spin : mode) = &f;
    if (!spin || !mode || spin->kind != FactorKind::pseudospin)
        throw WrongFactorShape("need one pseudospin and one mode factor");
    DensityMatrix out =
        rho.factors[0].kind == FactorKind::pseudospin ? rho : reorder_factors(rho, {*spin, *mode});
    out.factors[0].party = party;
    out.factors[1].party = party;
    return out;
}

}  // namespace

PairMixture reduced_pair_state(long n, const LabeledState& bell, const DensityMatrix& varrho) {
    if (!bell.is_pure()) throw ShapeMismatch("Bell component must be pure");
    const auto w = multiphoton_weights(n);
    PairMixture pm;
    pm.w_bell = w[0];
    pm.w_cross = w[1];
    pm.w_background = w[2];
    pm.bell = bell;
    const FourReductions locals = reduce_all_subspaces(bell);
    pm.rho0_a = locals.rho_a;
    pm.rho0_b = locals.rho_b;
    const std::string pa = pm.rho0_a.factors[0].party, pb = pm.rho0_b.factors[0].party;
    pm.varrho_a = relabel_party(varrho, pa);
    pm.varrho_b = relabel_party(varrho, pb);
    if (pm.varrho_a.dim() != pm.rho0_a.dim())
        throw ShapeMismatch("varrho dimension != single-party dimension");
    return pm;
}

namespace {

DensityMatrix spin_marginal(const DensityMatrix& rho) {
    return partial_trace(rho, {rho.factors[0]});
}

DensityMatrix mode_marginal(const DensityMatrix& rho) {
    return partial_trace(rho, {rho.factors[1]});
}

}  // namespace

FourReductions reduce_all_subspaces(const PairMixture& pm) {
    FourReductions bell = reduce_all_subspaces(pm.bell);
    if (pm.w_cross == 0 && pm.w_background == 0) return bell;
    // Every product term X_A (x) Y_B reduces factor-by-factor: the locals are
    // X and Y themselves, the hybrids are spin/mode marginal products.
    auto combine = [&](const CMat& from_bell, const CMat& cross_ab, const CMat& cross_ba,
                       const CMat& background, std::vector<FactorLabel> factors) {
        return density_from_dense(std::move(factors),
                                  pm.w_bell * from_bell + pm.w_cross * (cross_ab + cross_ba) +
                                      pm.w_background * background);
    };
    const DensityMatrix sa_rho0 = spin_marginal(pm.rho0_a), sa_var = spin_marginal(pm.varrho_a);
    const DensityMatrix sb_rho0 = spin_marginal(pm.rho0_b), sb_var = spin_marginal(pm.varrho_b);
    const DensityMatrix xa_rho0 = mode_marginal(pm.rho0_a), xa_var = mode_marginal(pm.varrho_a);
    const DensityMatrix xb_rho0 = mode_marginal(pm.rho0_b), xb_var = mode_marginal(pm.varrho_b);

    FourReductions out;
    out.rho_a = combine(bell.rho_a.to_dense(), pm.rho0_a.to_dense(), pm.varrho_a.to_dense(),
                        pm.varrho_a.to_dense(), pm.rho0_a.factors);
    out.rho_b = combine(bell.rho_b.to_dense(), pm.varrho_b.to_dense(), pm.rho0_b.to_dense(),
                        pm.varrho_b.to_dense(), pm.rho0_b.factors);
    out.nl_spin_a_mode_b = combine(
        bell.nl_spin_a_mode_b.to_dense(),
        tensor_product(sa_rho0, xb_var).to_dense(),
        tensor_product(sa_var, xb_rho0).to_dense(),
        tensor_product(sa_var, xb_var).to_dense(), bell.nl_spin_a_mode_b.factors);
    out.nl_spin_b_mode_a = combine(
        bell.nl_spin_b_mode_a.to_dense(),
        tensor_product(sb_var, xa_rho0).to_dense(),
        tensor_product(sb_rho0, xa_var).to_dense(),
        tensor_product(sb_var, xa_var).to_dense(), bell.nl_spin_b_mode_a.factors);
    return out;
}

DensityMatrix pair_mixture_dense(const PairMixture& pm) {
    const DensityMatrix bell_dm = density_from_pure(pm.bell.factors, pm.bell.amplitudes);
    CMat acc = pm.w_bell * bell_dm.to_dense();
    if (pm.w_cross > 0 || pm.w_background > 0) {
        acc += pm.w_cross * tensor_product(pm.rho0_a, pm.varrho_b).to_dense();
        acc += pm.w_cross * tensor_product(pm.varrho_a, pm.rho0_b).to_dense();
        acc += pm.w_background * tensor_product(pm.varrho_a, pm.varrho_b).to_dense();
    }
    return density_from_dense(pm.bell.factors, std::move(acc));
}

NestedReport multiphoton_nested_report(long n, const VarrhoSpec& varrho,
                                       const std::vector<CVec>& modes, const ModeGrid& grid) {
    const LabeledState bell = build_two_photon(modes, grid.m, /*conjugate_b=*/false, 0.0);
    const DensityMatrix background = single_photon_varrho(varrho, "A");
    const PairMixture pm = reduced_pair_state(n, bell, background);
    const FourReductions r = reduce_all_subspaces(pm);
    NestedReport rep;
    rep.joint = analyze_texture(stokes_from_wavefunction(bell, grid));
    rep.local_a = analyze_texture(stokes_from_density(r.rho_a, grid));
    rep.local_b = analyze_texture(stokes_from_density(r.rho_b, grid));
    rep.nonlocal_spin_a_mode_b = analyze_texture(stokes_from_density(r.nl_spin_a_mode_b, grid));
    rep.nonlocal_spin_b_mode_a = analyze_texture(stokes_from_density(r.nl_spin_b_mode_a, grid));
    rep.nested = is_nested(rep);
    return rep;
}

}  // namespace skyrm
