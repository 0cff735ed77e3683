#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "skyrm/bipartite.hpp"
#include "skyrm/synth.hpp"

using namespace skyrm;

namespace {

std::vector<CVec> analytic_pair(const ModeGrid& grid, int sign = -1) {
    const auto [u1, u2] = analytic_modes_q1(grid, sign);
    return {u1.amplitudes, u2.amplitudes};
}

}  // namespace

TEST_CASE("orthonormality guard") {
    const ModeGrid grid(8, 1.0);
    auto modes = analytic_pair(grid);
    CHECK_NOTHROW(check_orthonormal(modes));
    modes[1] = modes[0];
    CHECK_THROWS_AS(check_orthonormal(modes), NonOrthogonalModes);
    modes = analytic_pair(grid);
    modes[0] *= 1.01;
    CHECK_THROWS_AS(check_orthonormal(modes), NonOrthogonalModes);
}

TEST_CASE("conjugated expansion is the literal mode sum") {
    const ModeGrid grid(5, 1.0);
    const Index m = grid.m;
    const auto modes = analytic_pair(grid);
    const LabeledState psi = build_two_photon(modes, m, true);
    REQUIRE(psi.factors.size() == 4);
    CHECK(psi.factors[0] == spin_factor("A"));
    CHECK(psi.factors[1] == mode_factor("A", m));
    CHECK(psi.factors[2] == spin_factor("B"));
    CHECK(psi.factors[3] == mode_factor("B", m));
    CHECK(psi.amplitudes.norm() == doctest::Approx(1.0).epsilon(1e-13));

    const Real inv = 1.0 / std::sqrt(2.0);
    for (Index sa = 0; sa < 2; ++sa)
        for (Index xa = 0; xa < m; ++xa)
            for (Index sb = 0; sb < 2; ++sb)
                for (Index xb = 0; xb < m; ++xb) {
                    const Index at = ((sa * m + xa) * 2 + sb) * m + xb;
                    Complex want = 0;
                    for (const auto& u : modes)
                        want += inv * u[sa * m + xa] * std::conj(u[sb * m + xb]);
                    CHECK(std::abs(psi.amplitudes[at] - want) < 1e-14);
                }
}

TEST_CASE("bell expansion carries the relative phase without conjugation") {
    const ModeGrid grid(5, 1.0);
    const Index m = grid.m;
    const auto modes = analytic_pair(grid);
    const Real phase = 1.1;
    const LabeledState psi = build_two_photon(modes, m, false, phase);

    const Complex e = std::exp(Complex(0, phase));
    const Real inv = 1.0 / std::sqrt(2.0);
    for (Index sa = 0; sa < 2; ++sa)
        for (Index xa = 0; xa < m; ++xa)
            for (Index sb = 0; sb < 2; ++sb)
                for (Index xb = 0; xb < m; ++xb) {
                    const Index at = ((sa * m + xa) * 2 + sb) * m + xb;
                    const Complex want =
                        inv * (modes[0][sa * m + xa] * modes[0][sb * m + xb] +
                               e * modes[1][sa * m + xa] * modes[1][sb * m + xb]);
                    CHECK(std::abs(psi.amplitudes[at] - want) < 1e-14);
                }

    CHECK_THROWS_AS(build_two_photon(modes, m, true, 0.5), PhaseWithConjugation);
}

TEST_CASE("coefficient state validates and exposes rank-1 form") {
    const ModeGrid grid(6, 1.0);
    const auto modes = analytic_pair(grid);
    const TwoPhotonCoeffState c = two_photon_coeff(modes, grid.m, true);
    CHECK_NOTHROW(c.validate());
    CHECK(c.d() == 2);
    CHECK(c.c.trace().real() == doctest::Approx(1.0).epsilon(1e-13));
    // c = a a^dagger with uniform a.
    CHECK(std::abs(c.c(0, 1) - Complex(0.5)) < 1e-13);

    TwoPhotonCoeffState bad = c;
    bad.c(0, 1) = Complex(0.9, 0.1);  // breaks hermiticity
    CHECK_THROWS_AS(bad.validate(), NonHermitian);
    bad = c;
    bad.c *= 2.0;  // breaks the trace
    CHECK_THROWS_AS(bad.validate(), NotCoefficientForm);
    bad = c;
    bad.modes[1] = bad.modes[0];
    CHECK_THROWS_AS(bad.validate(), NonOrthogonalModes);
}

TEST_CASE("ensemble expansion reproduces the coefficient reductions") {
    const ModeGrid grid(6, 1.0);
    const auto modes = analytic_pair(grid);
    TwoPhotonCoeffState c = two_photon_coeff(modes, grid.m, true);
    // Mixed coefficient matrix (attenuated off-diagonal).
    c.c(0, 1) *= 0.4;
    c.c(1, 0) *= 0.4;
    const LabeledState ens = to_labeled(c);
    CHECK(!ens.is_pure());
    CHECK(ens.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));

    const FourReductions from_coeff = reduce_all_subspaces(c);
    const FourReductions from_ens = reduce_all_subspaces(
        density_from_factored(c.factors(), ens.weights, ens.vectors));
    CHECK((from_coeff.rho_a.to_dense() - from_ens.rho_a.to_dense()).cwiseAbs().maxCoeff() <
          1e-12);
    CHECK((from_coeff.nl_spin_b_mode_a.to_dense() - from_ens.nl_spin_b_mode_a.to_dense())
              .cwiseAbs()
              .maxCoeff() < 1e-12);

    // Rank-1 coefficient matrix expands to a pure state.
    const LabeledState pure = to_labeled(two_photon_coeff(modes, grid.m, true));
    CHECK(pure.is_pure());
}

TEST_CASE("pure, dense, and coefficient reductions agree") {
    const ModeGrid grid(6, 1.0);
    const auto modes = analytic_pair(grid);
    const LabeledState psi = build_two_photon(modes, grid.m, true);
    const TwoPhotonCoeffState c = two_photon_coeff(modes, grid.m, true);
    const DensityMatrix dense = density_from_pure(psi.factors, psi.amplitudes);

    const FourReductions a = reduce_all_subspaces(psi);
    const FourReductions b = reduce_all_subspaces(dense);
    const FourReductions d = reduce_all_subspaces(c);

    auto close = [](const DensityMatrix& x, const DensityMatrix& y) {
        return (x.to_dense() - y.to_dense()).cwiseAbs().maxCoeff() < 1e-12;
    };
    CHECK(close(a.rho_a, b.rho_a));
    CHECK(close(a.rho_b, b.rho_b));
    CHECK(close(a.nl_spin_a_mode_b, b.nl_spin_a_mode_b));
    CHECK(close(a.nl_spin_b_mode_a, b.nl_spin_b_mode_a));
    CHECK(close(a.rho_a, d.rho_a));
    CHECK(close(a.rho_b, d.rho_b));
    CHECK(close(a.nl_spin_a_mode_b, d.nl_spin_a_mode_b));
    CHECK(close(a.nl_spin_b_mode_a, d.nl_spin_b_mode_a));

    // Reduction labels are spin-major per hybrid.
    CHECK(a.nl_spin_b_mode_a.factors[0] == spin_factor("B"));
    CHECK(a.nl_spin_b_mode_a.factors[1] == mode_factor("A", grid.m));
    CHECK(a.rho_a.factors[0] == spin_factor("A"));
}

TEST_CASE("frozen nested report: conjugated state at M = 80") {
    const ModeGrid grid(80, 1.0);
    const LabeledState psi = build_two_photon(analytic_pair(grid), grid.m, true);
    const NestedReport rep = nested_report(psi, grid);

    CHECK(rep.nested);
    CHECK(is_nested(rep));

    CHECK(rep.joint.q_rounded == -1);
    CHECK(rep.joint.integer_residual < 0.05);
    CHECK(std::abs(rep.joint.helicity - (-1.5557)) < 2e-3);
    CHECK(rep.joint.texture_class == TextureClass::Bloch);

    CHECK(rep.local_a.q_rounded == -1);
    CHECK(std::abs(rep.local_a.helicity - (-1.5557)) < 2e-3);
    CHECK(rep.local_a.texture_class == TextureClass::Bloch);

    CHECK(rep.local_b.q_rounded == 1);
    CHECK(std::abs(rep.local_b.helicity - (-1.8126)) < 2e-3);
    CHECK(rep.local_b.texture_class == TextureClass::Bloch);

    CHECK(rep.nonlocal_spin_a_mode_b.q_rounded == 1);
    CHECK(std::abs(rep.nonlocal_spin_a_mode_b.helicity - (-0.9446)) < 2e-3);
    CHECK(rep.nonlocal_spin_a_mode_b.texture_class == TextureClass::Undetermined);

    CHECK(rep.nonlocal_spin_b_mode_a.q_rounded == -1);
    CHECK(std::abs(rep.nonlocal_spin_b_mode_a.helicity - (-0.0482)) < 2e-3);
    CHECK(rep.nonlocal_spin_b_mode_a.texture_class == TextureClass::Neel);

    // Smooth-estimator diagnostics for the same reductions.
    const FourReductions red = reduce_all_subspaces(psi);
    CHECK(std::abs(gradient_charge_estimate(stokes_from_wavefunction(psi, grid)) -
                   (-0.98662)) < 1e-3);
    CHECK(std::abs(gradient_charge_estimate(stokes_from_density(red.nl_spin_a_mode_b, grid)) -
                   0.99608) < 1e-3);
    CHECK(std::abs(gradient_charge_estimate(stokes_from_density(red.nl_spin_b_mode_a, grid)) -
                   (-0.99608)) < 1e-3);
}

TEST_CASE("frozen nested report: bell state at M = 80") {
    const ModeGrid grid(80, 1.0);
    const LabeledState psi = build_two_photon(analytic_pair(grid), grid.m, false, 0.0);
    const NestedReport rep = nested_report(psi, grid);

    CHECK(rep.nested);

    CHECK(rep.joint.q_rounded == -1);
    CHECK(std::abs(rep.joint.helicity - (-1.5361)) < 2e-3);
    CHECK(rep.joint.texture_class == TextureClass::Bloch);

    for (const TextureReport* local : {&rep.local_a, &rep.local_b}) {
        CHECK(local->q_rounded == -1);
        CHECK(local->integer_residual < 0.05);
        CHECK(std::abs(local->helicity - (-1.5557)) < 2e-3);
        CHECK(local->texture_class == TextureClass::Bloch);
    }

    for (const TextureReport* hy : {&rep.nonlocal_spin_a_mode_b, &rep.nonlocal_spin_b_mode_a}) {
        CHECK(hy->q_rounded == -1);
        CHECK(hy->integer_residual < 0.05);
        CHECK(std::abs(hy->helicity - (-0.1115)) < 2e-3);
        CHECK(hy->texture_class == TextureClass::Neel);
    }

    const FourReductions red = reduce_all_subspaces(psi);
    CHECK(std::abs(gradient_charge_estimate(stokes_from_wavefunction(psi, grid)) -
                   (-0.98469)) < 1e-3);
    CHECK(std::abs(gradient_charge_estimate(stokes_from_density(red.nl_spin_b_mode_a, grid)) -
                   (-0.99113)) < 1e-3);
}

TEST_CASE("nested_report rejects non-pure input") {
    LabeledState ens;
    ens.factors = {spin_factor("A"), mode_factor("A", 4), spin_factor("B"), mode_factor("B", 4)};
    ens.weights = RVec::Constant(1, 1.0);
    ens.vectors = CMat::Zero(64, 1);
    ens.vectors(0, 0) = 1.0;
    CHECK_THROWS_AS(nested_report(ens, ModeGrid(4, 1.0)), WrongFactorShape);
}

TEST_CASE("global phase rotates the joint texture about z, keeping the charge") {
    // The joint field uses Psi as a two-point coherence function, so a global
    // phase alpha rotates (sx, sy) rigidly: sz and Q stay put, helicity shifts
    // by alpha.
    const ModeGrid grid(16, 1.0);
    const auto modes = analytic_pair(grid);
    const Real alpha = 0.7;
    const LabeledState a = build_two_photon(modes, grid.m, false, 0.0);
    LabeledState b = a;
    b.amplitudes *= std::exp(Complex(0, alpha));
    const StokesField fa = stokes_from_wavefunction(a, grid);
    const StokesField fb = stokes_from_wavefunction(b, grid);
    CHECK((fa.sz - fb.sz).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((fa.s0 - fb.s0).cwiseAbs().maxCoeff() < 1e-13);
    const RMat rx = fa.sx * std::cos(alpha) - fa.sy * std::sin(alpha);
    const RMat ry = fa.sx * std::sin(alpha) + fa.sy * std::cos(alpha);
    CHECK((rx - fb.sx).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((ry - fb.sy).cwiseAbs().maxCoeff() < 1e-13);

    const TextureReport ra = analyze_texture(fa);
    const TextureReport rb = analyze_texture(fb);
    CHECK(std::abs(ra.q_raw - rb.q_raw) < 1e-10);
    const Real dh = std::remainder(rb.helicity - ra.helicity - alpha, 2 * M_PI);
    CHECK(std::abs(dh) < 1e-10);

    // The relative Bell phase moves the texture substantively.
    const LabeledState c = build_two_photon(modes, grid.m, false, 3.14159);
    const StokesField fc = stokes_from_wavefunction(c, grid);
    CHECK((fa.sx - fc.sx).cwiseAbs().maxCoeff() > 1e-3);
}
