#include "skyrm/noise.hpp"

#include <cmath>
#include <limits>

#include "skyrm/rng.hpp"
#include "skyrm/util.hpp"

namespace skyrm {

std::string to_string(DephasingMode m) {
    return m == DephasingMode::analytic ? "analytic" : "monte_carlo";
}

DephasingMode dephasing_mode_from_string(const std::string& s) {
    if (s == "analytic") return DephasingMode::analytic;
    if (s == "monte_carlo") return DephasingMode::monte_carlo;
    throw ShapeMismatch("unknown dephasing mode '" + s + "'");
}

std::string to_string(Observable o) { return o == Observable::local ? "local" : "nonlocal"; }

Observable observable_from_string(const std::string& s) {
    if (s == "local") return Observable::local;
    if (s == "nonlocal") return Observable::nonlocal;
    throw ShapeMismatch("unknown observable '" + s + "'");
}

namespace {

std::string dephase_stream_key(const DephasingSpec& spec) {
    return "dephase|mu=" + fmt17(spec.mu) + "|sigma=" + fmt17(spec.sigma) +
           "|shots=" + std::to_string(spec.shots);
}

std::string wishart_stream_key(const WishartSpec& spec) {
    return "wishart|D=" + std::to_string(spec.dim) + "|K=" + std::to_string(spec.k);
}

}  // namespace

Complex dephasing_factor(const DephasingSpec& spec) {
    if (spec.sigma < 0) throw ShapeMismatch("sigma must be nonnegative");
    if (spec.mode == DephasingMode::analytic) {
        const Real damp = std::exp(-0.5 * spec.sigma * spec.sigma);
        return damp * Complex(std::cos(spec.mu), std::sin(spec.mu));
    }
    if (spec.shots < 1) throw ShapeMismatch("monte_carlo needs shots >= 1");
    Philox rng(spec.seed, Philox::stream_of(dephase_stream_key(spec)));
    std::vector<Real> cs, sn;
    cs.reserve(std::size_t(spec.shots));
    sn.reserve(std::size_t(spec.shots));
    for (long s = 0; s < spec.shots; ++s) {
        const Real phi = rng.normal(spec.mu, spec.sigma);
        cs.push_back(std::cos(phi));
        sn.push_back(std::sin(phi));
    }
    return Complex(pairwise_sum(cs), pairwise_sum(sn)) / Real(spec.shots);
}

TwoPhotonCoeffState dephase(const TwoPhotonCoeffState& state, const DephasingSpec& spec) {
    state.validate();
    const Complex z = dephasing_factor(spec);
    TwoPhotonCoeffState out = state;
    for (Index m = 0; m < out.c.rows(); ++m)
        for (Index n = 0; n < out.c.cols(); ++n) {
            if (m == n) continue;
            out.c(m, n) *= m < n ? z : std::conj(z);
        }
    return out;
}

DensityMatrix wishart_density(const WishartSpec& spec, std::vector<FactorLabel> factors) {
    if (spec.dim < 1) throw ShapeMismatch("D must be positive");
    if (spec.k < 1 || spec.k > spec.dim)
        throw RankExceedsDimension("K = " + std::to_string(spec.k) + ", D = " + std::to_string(spec.dim));
    if (total_dim(factors) != spec.dim) throw ShapeMismatch("factor dims do not multiply to D");
    Philox rng(spec.seed, Philox::stream_of(wishart_stream_key(spec)));
    const Real s = 1.0 / std::sqrt(2.0);
    CMat g(spec.dim, spec.k);
    for (Index col = 0; col < spec.k; ++col)
        for (Index row = 0; row < spec.dim; ++row) {
            const Real re = rng.normal(0.0, s);
            const Real im = rng.normal(0.0, s);
            g(row, col) = Complex(re, im);
        }
    return density_from_factored(std::move(factors), RVec::Ones(spec.k), std::move(g));
}

DensityMatrix mix(const DensityMatrix& a, const DensityMatrix& b, Real epsilon) {
    if (epsilon < 0 || epsilon > 1) throw ShapeMismatch("epsilon outside [0, 1]");
    if (a.factors.size() != b.factors.size()) throw ShapeMismatch("factor lists differ");
    const DensityMatrix* bb = &b;
    DensityMatrix reordered;
    for (std::size_t i = 0; i < a.factors.size(); ++i)
        if (!(a.factors[i] == b.factors[i])) {
            reordered = reorder_factors(b, a.factors);
            bb = &reordered;
            break;
        }
    if (epsilon == 0) return a;
    if (epsilon == 1) return *bb;
    if (a.is_factored() && bb->is_factored()) {
        const Index ra = a.weights.size(), rb = bb->weights.size();
        RVec w(ra + rb);
        w.head(ra) = (1 - epsilon) * a.weights;
        w.tail(rb) = epsilon * bb->weights;
        CMat v(a.vectors.rows(), ra + rb);
        v.leftCols(ra) = a.vectors;
        v.rightCols(rb) = bb->vectors;
        return density_from_factored(a.factors, std::move(w), std::move(v));
    }
    return density_from_dense(a.factors,
                              (1 - epsilon) * a.to_dense() + epsilon * bb->to_dense());
}

DensityMatrix depolarize(const DensityMatrix& rho, Real epsilon) {
    if (epsilon < 0 || epsilon >= 1) throw ShapeMismatch("epsilon outside [0, 1)");
    const Index d = rho.dim();
    if (d > 4096) throw ShapeMismatch("depolarize materializes I/dim; dim capped at 4096");
    CMat out = (1 - epsilon) * rho.to_dense();
    out.diagonal().array() += epsilon / Real(d);
    return density_from_dense(rho.factors, std::move(out));
}

namespace {

// Reduction the sweep tracks: rho_A for local, the (sigma_B, x_A) hybrid for
// nonlocal (the texture the dephasing figures follow).
const DensityMatrix& pick(const FourReductions& r, Observable obs) {
    return obs == Observable::local ? r.rho_a : r.nl_spin_b_mode_a;
}

}  // namespace

SweepResult dephasing_sweep(const TwoPhotonCoeffState& base, const std::vector<Real>& sigmas,
                            const DephasingSpec& proto, Observable obs, const ModeGrid& grid,
                            int threads) {
    SweepResult res;
    res.param_names = {"sigma"};
    res.rows.resize(sigmas.size());
    parallel_for(sigmas.size(), threads, [&](std::size_t i) {
        SweepRow& row = res.rows[i];
        row.params = {{"sigma", sigmas[i]}};
        row.seed = proto.seed;
        DephasingSpec spec = proto;
        spec.sigma = sigmas[i];
        if (spec.mode == DephasingMode::monte_carlo)
            row.stream = Philox::stream_of(dephase_stream_key(spec));
        try {
            const TwoPhotonCoeffState noisy = dephase(base, spec);
            const FourReductions r = reduce_all_subspaces(noisy);
            row.report = analyze_texture(stokes_from_density(pick(r, obs), grid));
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });
    return res;
}

SweepResult wishart_sweep(const LabeledState& psi, const std::vector<Index>& ks,
                          const std::vector<Real>& epsilons, std::uint64_t seed, Observable obs,
                          const ModeGrid& grid, int threads) {
    if (!psi.is_pure()) throw WrongFactorShape("wishart sweep mixes a pure state");
    const DensityMatrix pure = density_from_pure(psi.factors, psi.amplitudes);
    SweepResult res;
    res.param_names = {"K", "epsilon"};
    res.rows.resize(ks.size() * epsilons.size());
    parallel_for(res.rows.size(), threads, [&](std::size_t idx) {
        const Index k = ks[idx / epsilons.size()];
        const Real eps = epsilons[idx % epsilons.size()];
        SweepRow& row = res.rows[idx];
        row.params = {{"K", Real(k)}, {"epsilon", eps}};
        row.seed = seed;
        WishartSpec wspec{pure.dim(), k, eps, seed};
        row.stream = Philox::stream_of(wishart_stream_key(wspec));
        try {
            const DensityMatrix noise = wishart_density(wspec, pure.factors);
            const DensityMatrix noisy = mix(pure, noise, eps);
            const FourReductions r = reduce_all_subspaces(noisy);
            row.report = analyze_texture(stokes_from_density(pick(r, obs), grid));
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });
    return res;
}

Real breakdown_sigma(const SweepResult& result, const std::string& param) {
    for (const auto& row : result.rows) {
        if (!row.error.empty()) continue;
        if (row.report.integer_residual <= 0.25) continue;
        for (const auto& [name, value] : row.params)
            if (name == param) return value;
    }
    return std::numeric_limits<Real>::quiet_NaN();
}

}  // namespace skyrm
