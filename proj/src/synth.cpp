#include "skyrm/synth.hpp"

#include <cmath>

namespace skyrm {

namespace {
constexpr Real kPi = 3.14159265358979323846;
}

void SkyrmionSpec::validate() const {
    if (l == 0) throw DimensionMismatch("winding l must be nonzero");
    if (rank() < 1) throw RankExceedsDimension("rank must be >= 1");
    if (weights.size() > 0) {
        if (weights.size() != rank()) throw ShapeMismatch("weights length != rank");
        Real sum = 0;
        for (Index i = 0; i < weights.size(); ++i) {
            if (weights[i] < 0) throw ShapeMismatch("negative weight");
            sum += weights[i];
        }
        if (std::abs(sum - 1.0) > 1e-12) throw ShapeMismatch("weights do not sum to 1");
    }
}

std::string to_string(SynthMethod m) {
    return m == SynthMethod::analytic_q1 ? "analytic_q1" : "spectral";
}

SynthMethod synth_method_from_string(const std::string& s) {
    if (s == "analytic_q1" || s == "analytic") return SynthMethod::analytic_q1;
    if (s == "spectral") return SynthMethod::spectral;
    throw ShapeMismatch("unknown synth method '" + s + "'");
}

CMat auxiliary_matrix(const SkyrmionSpec& spec) {
    spec.validate();
    const Index m = spec.grid.m;
    const Real r0 = spec.radius();
    CMat a(2 * m, 2 * m);
    for (Index i = 0; i < m; ++i) {
        const Real x = spec.grid.x(int(i));
        for (Index j = 0; j < m; ++j) {
            const Real xp = spec.grid.x(int(j));
            const Real r = std::hypot(x, xp);
            const Real theta = kPi * std::min(r / r0, 1.0);
            const Real phi = Real(spec.l) * std::atan2(xp, x) + spec.phi0;
            const Real ch = std::cos(0.5 * theta), sh = std::sin(0.5 * theta);
            a(i, j) = ch * ch;
            a(m + i, m + j) = sh * sh;
            a(i, m + j) = std::sin(theta) * Complex(std::cos(phi), std::sin(phi));
        }
    }
    a.block(m, 0, m, m) = a.block(0, m, m, m).adjoint();
    return a;
}

namespace {

DensityMatrix truncate_impl(const CMat& a, int d, RVec weights, bool eigen_weights,
                            const std::string& party) {
    if (a.rows() != a.cols() || a.rows() % 2 != 0)
        throw ShapeMismatch("auxiliary matrix must be 2M x 2M");
    if (d < 1 || d > a.rows()) throw RankExceedsDimension("rank " + std::to_string(d));
    auto [vals, vecs] = spectral_decompose(a);
    if (vals[d - 1] <= 1e-10)
        throw InsufficientPositiveSpectrum("only " + std::to_string((vals.array() > 1e-10).count()) +
                                           " positive eigenvalues, need " + std::to_string(d));
    if (eigen_weights) {
        weights = vals.head(d) / vals.head(d).sum();
    } else if (weights.size() == 0) {
        weights = RVec::Constant(d, 1.0 / Real(d));
    } else {
        if (weights.size() != d) throw ShapeMismatch("weights length != rank");
        Real sum = 0;
        for (Index i = 0; i < weights.size(); ++i) {
            if (weights[i] < 0) throw ShapeMismatch("negative weight");
            sum += weights[i];
        }
        if (std::abs(sum - 1.0) > 1e-12) throw ShapeMismatch("weights do not sum to 1");
    }
    const Index m = a.rows() / 2;
    std::vector<FactorLabel> factors{spin_factor(party), mode_factor(party, m)};
    return density_from_factored(std::move(factors), std::move(weights), vecs.leftCols(d));
}

}  // namespace

DensityMatrix truncate_to_density(const CMat& a, int d, RVec weights, const std::string& party) {
    return truncate_impl(a, d, std::move(weights), false, party);
}

DensityMatrix truncate_to_density_eigenweighted(const CMat& a, int d, const std::string& party) {
    return truncate_impl(a, d, RVec(), true, party);
}

std::pair<LabeledState, LabeledState> analytic_modes_q1(const ModeGrid& grid, int sign,
                                                        const std::string& party) {
    if (sign != 1 && sign != -1) throw DimensionMismatch("sign must be +1 or -1");
    const Index m = grid.m;
    CVec u1(2 * m), u2(2 * m);
    for (Index k = 0; k < m; ++k) {
        const Real a = kPi * grid.x(int(k)) / grid.x_max;
        const Real s2 = std::sin(0.5 * a) * std::sin(0.5 * a);
        u1[k] = Complex(0, Real(sign) * 0.5 * std::sin(a));
        u1[m + k] = 1.0 + s2;
        u2[k] = 1.0 - s2;
        u2[m + k] = 0.5 * std::sin(a);
    }
    u1 /= u1.norm();
    u2 /= u2.norm();
    std::vector<FactorLabel> factors{spin_factor(party), mode_factor(party, m)};
    LabeledState s1{factors, std::move(u1), {}, {}};
    LabeledState s2{factors, std::move(u2), {}, {}};
    return {std::move(s1), std::move(s2)};
}

DensityMatrix build_single_photon_skyrmion(const SkyrmionSpec& spec, SynthMethod method,
                                           const std::string& party) {
    spec.validate();
    if (method == SynthMethod::analytic_q1) {
        if (std::abs(spec.l) != 1) throw DimensionMismatch("analytic mode pair only covers |l| = 1");
        auto [u1, u2] = analytic_modes_q1(spec.grid, -spec.l, party);
        CMat v(u1.amplitudes.size(), 2);
        v.col(0) = u1.amplitudes;
        v.col(1) = u2.amplitudes;
        return density_from_factored(u1.factors, RVec::Constant(2, 0.5), std::move(v));
    }
    const CMat a = auxiliary_matrix(spec);
    if (spec.weights.size() > 0) return truncate_to_density(a, spec.rank(), spec.weights, party);
    if (std::abs(spec.l) <= 5) return truncate_to_density(a, spec.rank(), RVec(), party);
    return truncate_to_density_eigenweighted(a, spec.rank(), party);
}

}  // namespace skyrm
