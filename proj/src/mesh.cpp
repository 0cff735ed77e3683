#include "skyrm/mesh.hpp"

#include <cmath>

#include "skyrm/bipartite.hpp"
#include "skyrm/texture.hpp"
#include "skyrm/util.hpp"

namespace skyrm {

namespace {
constexpr Real kPi = 3.14159265358979323846;

Real wrap_pi(Real a) {
    a = std::fmod(a + kPi, 2.0 * kPi);
    if (a < 0) a += 2.0 * kPi;
    return a - kPi;
}
}  // namespace

void MeshProgram::validate() const {
    if (dim < 1) throw DimensionMismatch("mesh dimension must be positive");
    if (output_phases.size() != dim) throw DimensionMismatch("output phase list != dim");
    for (const auto& e : elements)
        if (e.port < 0 || e.port + 1 >= dim)
            throw DimensionMismatch("element port " + std::to_string(e.port) + " out of range");
}

CMat complete_isometry(const CMat& columns) {
    const Index d = columns.rows(), k = columns.cols();
    if (k < 1 || k > d) throw NonOrthonormalInput("need 1..D columns");
    for (Index i = 0; i < k; ++i)
        for (Index j = i; j < k; ++j) {
            const Complex g = columns.col(i).dot(columns.col(j));
            const Complex want = i == j ? Complex(1, 0) : Complex(0, 0);
            if (std::abs(g - want) > 1e-10)
                throw NonOrthonormalInput("Gram deviation " + std::to_string(std::abs(g - want)));
        }
    CMat u(d, d);
    u.leftCols(k) = columns;
    Index have = k;
    for (Index j = 0; j < d && have < d; ++j) {
        CVec v = CVec::Zero(d);
        v[j] = 1;
        // Two projection passes keep orthogonality near machine precision.
        for (int pass = 0; pass < 2; ++pass)
            v -= u.leftCols(have) * (u.leftCols(have).adjoint() * v);
        const Real nrm = v.norm();
        if (nrm < 1e-6) continue;  // e_j already inside the span
        u.col(have++) = v / nrm;
    }
    if (have != d) throw NonOrthonormalInput("basis completion failed");
    return u;
}

namespace {

void check_unitary(const CMat& u, Real tol) {
    if (u.rows() != u.cols()) throw NotUnitary("matrix not square");
    const Real dev = (u.adjoint() * u - CMat::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
    if (dev > tol) throw NotUnitary("max |U^dagger U - I| = " + std::to_string(dev));
}

// V <- V * T^{-1}(theta, phi) on columns (p, p+1).
void apply_right_inverse(CMat& v, Index p, Real theta, Real phi) {
    const Real c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
    const Complex ep = Complex(std::cos(phi), -std::sin(phi));
    for (Index r = 0; r < v.rows(); ++r) {
        const Complex a = v(r, p), b = v(r, p + 1);
        v(r, p) = a * (ep * c) + b * Complex(0, -s);
        v(r, p + 1) = a * (ep * Complex(0, -s)) + b * c;
    }
}

// V <- T(theta, phi) * V on rows (p, p+1).
void apply_left(CMat& v, Index p, Real theta, Real phi) {
    const Real c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
    const Complex ep = Complex(std::cos(phi), std::sin(phi));
    for (Index col = 0; col < v.cols(); ++col) {
        const Complex a = v(p, col), b = v(p + 1, col);
        v(p, col) = ep * c * a + Complex(0, s) * b;
        v(p + 1, col) = ep * Complex(0, s) * a + c * b;
    }
}

void assign_layers(MeshProgram& prog) {
    std::vector<int> depth(std::size_t(prog.dim), 0);
    for (auto& e : prog.elements) {
        e.layer = std::max(depth[std::size_t(e.port)], depth[std::size_t(e.port) + 1]);
        depth[std::size_t(e.port)] = e.layer + 1;
        depth[std::size_t(e.port) + 1] = e.layer + 1;
    }
}

}  // namespace

MeshProgram mesh_decompose(const CMat& u) {
    check_unitary(u, 1e-8);
    const Index n = u.rows();
    CMat v = u;
    struct Op {
        Index p;
        Real theta, phi;
    };
    std::vector<Op> rights, lefts;  // chronological
    for (Index i = 0; i + 1 < n; ++i) {
        if (i % 2 == 0) {
            for (Index j = 0; j <= i; ++j) {
                const Index r = n - 1 - j, p = i - j;
                const Real mag = std::abs(v(r, p));
                const Real theta = 2.0 * std::atan2(mag, std::abs(v(r, p + 1)));
                const Real phi =
                    mag < 1e-14 ? 0.0
                                : wrap_pi(std::arg(v(r, p)) - std::arg(v(r, p + 1)) - 0.5 * kPi);
                apply_right_inverse(v, p, theta, phi);
                rights.push_back({p, theta, phi});
            }
        } else {
            for (Index j = 0; j <= i; ++j) {
                const Index r = n - 1 - i + j, c = j, p = r - 1;
                const Real mag = std::abs(v(r, c));
                const Real theta = 2.0 * std::atan2(mag, std::abs(v(p, c)));
                const Real phi =
                    mag < 1e-14 ? 0.0
                                : wrap_pi(std::arg(v(r, c)) - std::arg(v(p, c)) + 0.5 * kPi);
                apply_left(v, p, theta, phi);
                lefts.push_back({p, theta, phi});
            }
        }
    }
    // V is now diagonal: U = L_1^{-1}..L_B^{-1} D T_A..T_1. Push each left
    // inverse through the diagonal with
    //   T^{-1}(theta, phi) D(a, b) = D(b - phi + pi, b) T(theta, a - b + pi),
    // turning it into a plain element applied after the right-op chain.
    RVec dphase(n);
    for (Index q = 0; q < n; ++q) dphase[q] = std::arg(v(q, q));
    MeshProgram prog;
    prog.dim = n;
    for (const auto& op : rights) prog.elements.push_back({0, int(op.p), op.theta, op.phi});
    for (std::size_t k = lefts.size(); k-- > 0;) {
        const Op& op = lefts[k];
        const Real a = dphase[op.p], b = dphase[op.p + 1];
        prog.elements.push_back({0, int(op.p), op.theta, wrap_pi(a - b + kPi)});
        dphase[op.p] = wrap_pi(b - op.phi + kPi);
    }
    prog.output_phases = dphase;
    assign_layers(prog);
    return prog;
}

CVec mesh_apply(const MeshProgram& program, const CVec& input) {
    program.validate();
    if (input.size() != program.dim) throw DimensionMismatch("input length != mesh dim");
    CVec v = input;
    for (const auto& e : program.elements) {
        const Real c = std::cos(0.5 * e.theta), s = std::sin(0.5 * e.theta);
        const Complex ep = Complex(std::cos(e.phi), std::sin(e.phi));
        const Complex a = v[e.port], b = v[e.port + 1];
        v[e.port] = ep * c * a + Complex(0, s) * b;
        v[e.port + 1] = ep * Complex(0, s) * a + c * b;
    }
    for (Index q = 0; q < program.dim; ++q)
        v[q] *= Complex(std::cos(program.output_phases[q]), std::sin(program.output_phases[q]));
    return v;
}

CMat mesh_unitary(const MeshProgram& program) {
    CMat u(program.dim, program.dim);
    for (Index j = 0; j < program.dim; ++j) {
        CVec e = CVec::Zero(program.dim);
        e[j] = 1;
        u.col(j) = mesh_apply(program, e);
    }
    return u;
}

std::string to_string(ScanSubspace s) {
    switch (s) {
        case ScanSubspace::joint: return "joint";
        case ScanSubspace::local_a: return "local_A";
        case ScanSubspace::local_b: return "local_B";
        default: return "nonlocal";
    }
}

ScanSubspace scan_subspace_from_string(const std::string& s) {
    if (s == "joint") return ScanSubspace::joint;
    if (s == "local_A" || s == "local_a") return ScanSubspace::local_a;
    if (s == "local_B" || s == "local_b") return ScanSubspace::local_b;
    if (s == "nonlocal") return ScanSubspace::nonlocal;
    throw ShapeMismatch("unknown scan subspace '" + s + "'");
}

SweepResult phase_scan(const std::vector<CVec>& modes, Index m, const std::vector<Real>& phis,
                       ScanSubspace subspace, const ModeGrid& grid, int threads) {
    SweepResult res;
    res.param_names = {"phi"};
    res.rows.resize(phis.size());
    parallel_for(phis.size(), threads, [&](std::size_t i) {
        SweepRow& row = res.rows[i];
        row.params = {{"phi", phis[i]}};
        try {
            const LabeledState psi = build_two_photon(modes, m, /*conjugate_b=*/false, phis[i]);
            if (subspace == ScanSubspace::joint) {
                row.report = analyze_texture(stokes_from_wavefunction(psi, grid));
            } else {
                const FourReductions r = reduce_all_subspaces(psi);
                const DensityMatrix& pickd = subspace == ScanSubspace::local_a ? r.rho_a
                                             : subspace == ScanSubspace::local_b
                                                 ? r.rho_b
                                                 : r.nl_spin_b_mode_a;
                row.report = analyze_texture(stokes_from_density(pickd, grid));
            }
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });
    return res;
}

}  // namespace skyrm
