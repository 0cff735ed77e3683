// skyrm: synthesize skyrmion textures in mixed-light density matrices,
// reduce bipartite states, run noise sweeps, and drive the mesh synthesis.
//
// Exit codes: 0 success, 1 usage or I/O, 2 validation, 3 numerical failure.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <typeinfo>
#include <vector>

#include "CLI11.hpp"
#include "skyrm/bipartite.hpp"
#include "skyrm/io.hpp"
#include "skyrm/mesh.hpp"
#include "skyrm/multiphoton.hpp"
#include "skyrm/noise.hpp"
#include "skyrm/render.hpp"
#include "skyrm/synth.hpp"
#include "skyrm/util.hpp"

namespace fs = std::filesystem;
using namespace skyrm;

namespace {

constexpr Real kTau = 6.283185307179586476925286766559;

struct Common {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    int threads = 1;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config_path, "JSON config file; flags override its fields");
    cmd->add_option("--seed", c.seed, "master seed (default 0)");
    cmd->add_option("--out", c.out_dir, "output directory (default .)");
    cmd->add_option("--threads", c.threads, "worker threads for sweep points (default 1)")
        ->check(CLI::PositiveNumber);
}

Json load_config(const Common& c) {
    if (c.config_path.empty()) return Json::object();
    Json cfg = Json::parse(read_text_file(c.config_path));
    if (!cfg.is_object()) throw Error("config root must be a JSON object");
    return cfg;
}

// Tracks files written under the output directory for the manifest.
struct Outputs {
    std::string dir;
    std::vector<std::string> files;

    explicit Outputs(const std::string& d) : dir(d) { fs::create_directories(d); }
    std::string path(const std::string& name) {
        files.push_back(name);
        return (fs::path(dir) / name).string();
    }
    void note(const std::string& name) { files.push_back(name); }
};

void write_manifest(const Common& c, const std::string& command, const Json& cfg,
                    const Outputs& outs) {
    RunManifest man;
    man.command = command;
    man.config = cfg;
    man.seed = c.seed;
    man.outputs = outs.files;
    write_run_manifest(man, (fs::path(outs.dir) / "manifest.json").string());
}

int run_guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const TooManyUndefinedPoints& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return typeid(e) == typeid(Error) ? 1 : 2;  // bare Error = I/O
    } catch (const Json::exception& e) {
        std::fprintf(stderr, "error: bad config: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

std::vector<Real> real_list(const Json& node) {
    if (node.is_array()) return node.get<std::vector<Real>>();
    if (node.is_object()) {
        const Real start = node.at("start").get<Real>();
        const Real stop = node.at("stop").get<Real>();
        const long count = node.at("count").get<long>();
        if (count < 1) throw Error("grid count must be positive");
        std::vector<Real> v(static_cast<std::size_t>(count), 0.0);
        for (long i = 0; i < count; ++i)
            v[std::size_t(i)] = count == 1 ? start : start + (stop - start) * Real(i) / Real(count - 1);
        return v;
    }
    throw Error("expected an array or {start, stop, count}");
}

ModeGrid grid_from(const Json& cfg, int default_m) {
    return ModeGrid(cfg.value("m", default_m), cfg.value("x_max", 1.0));
}

// Shared two-photon state vocabulary: analytic charge -1/+1 mode pair,
// "conjugated" (B-modes conjugated) or "bell" (relative phase on u2 u2).
std::vector<CVec> modes_from(const Json& cfg, const ModeGrid& grid) {
    const std::string source = cfg.value("modes", "analytic");
    if (source != "analytic") throw Error("unknown mode source '" + source + "'");
    auto pair = analytic_modes_q1(grid, cfg.value("sign", -1));
    return {pair.first.amplitudes, pair.second.amplitudes};
}

bool conjugated_from(const Json& cfg) {
    const std::string state = cfg.value("state", "conjugated");
    if (state == "conjugated") return true;
    if (state == "bell") return false;
    throw Error("unknown state form '" + state + "' (want conjugated|bell)");
}

void save_nested_textures(const LabeledState& psi, const FourReductions& red,
                          const ModeGrid& grid, Outputs& outs) {
    save_stokes_csv(stokes_from_wavefunction(psi, grid), outs.path("joint.stokes.csv"));
    save_stokes_csv(stokes_from_density(red.rho_a, grid), outs.path("local_A.stokes.csv"));
    save_stokes_csv(stokes_from_density(red.rho_b, grid), outs.path("local_B.stokes.csv"));
    save_stokes_csv(stokes_from_density(red.nl_spin_a_mode_b, grid),
                    outs.path("nonlocal_sigmaA_xB.stokes.csv"));
    save_stokes_csv(stokes_from_density(red.nl_spin_b_mode_a, grid),
                    outs.path("nonlocal_sigmaB_xA.stokes.csv"));
}

int sweep_exit(const SweepResult& res) {
    if (res.rows.empty()) return 0;
    for (const auto& row : res.rows)
        if (row.error.empty()) return 0;
    return 3;  // every point failed
}

int cmd_synth(const Common& c, const Json& cfg) {
    SkyrmionSpec spec;
    spec.l = cfg.value("l", 1);
    spec.phi0 = cfg.value("phi0", 0.0);
    spec.r0 = cfg.value("r0", 0.0);
    spec.grid = grid_from(cfg, 64);
    spec.d = cfg.value("d", 0);
    if (cfg.contains("weights")) {
        const auto w = cfg.at("weights").get<std::vector<Real>>();
        spec.weights = Eigen::Map<const RVec>(w.data(), Index(w.size()));
    }
    spec.validate();
    const SynthMethod method = synth_method_from_string(cfg.value("method", "spectral"));

    const DensityMatrix rho = build_single_photon_skyrmion(spec, method);
    const StokesField field = stokes_from_density(rho, spec.grid);
    const TextureReport rep = analyze_texture(field);

    Outputs outs(c.out_dir);
    save_qdm(rho, outs.path("state.qdm"));
    outs.note("state.qdm.bin");
    save_stokes_csv(field, outs.path("texture.stokes.csv"));
    write_text_file(outs.path("report.json"), texture_report_json(rep).dump(2) + "\n");
    write_manifest(c, "synth", cfg, outs);

    std::printf("Q_raw = %s  class = %s\n", fmt17(rep.q_raw).c_str(),
                to_string(rep.texture_class).c_str());
    if (rep.integer_residual >= 0.05 || rep.q_rounded == 0 ||
        rep.undefined_fraction >= 0.01) {
        std::fprintf(stderr, "flagged: texture is not a clean skyrmion (Q_raw = %s)\n",
                     fmt17(rep.q_raw).c_str());
        return 2;
    }
    return 0;
}

int cmd_nested(const Common& c, const Json& cfg) {
    const ModeGrid grid = grid_from(cfg, 80);
    const std::vector<CVec> modes = modes_from(cfg, grid);
    const bool conj = conjugated_from(cfg);
    const Real phase = cfg.value("phase", 0.0);

    const LabeledState psi = build_two_photon(modes, grid.m, conj, phase);
    const NestedReport rep = nested_report(psi, grid);
    const FourReductions red = reduce_all_subspaces(psi);

    Outputs outs(c.out_dir);
    write_text_file(outs.path("nested_report.json"), nested_report_json(rep).dump(2) + "\n");
    save_nested_textures(psi, red, grid, outs);
    write_manifest(c, "nested", cfg, outs);

    std::printf("nested = %s\n", rep.nested ? "true" : "false");
    return 0;
}

int cmd_sweep(const Common& c, const Json& cfg) {
    const std::string family = cfg.value("family", "dephasing");
    const Observable obs = observable_from_string(cfg.value("observable", "nonlocal"));
    Outputs outs(c.out_dir);
    SweepResult res;

    if (family == "dephasing") {
        const ModeGrid grid = grid_from(cfg, 80);
        const TwoPhotonCoeffState base = two_photon_coeff(
            modes_from(cfg, grid), grid.m, conjugated_from(cfg), cfg.value("phase", 0.0));
        DephasingSpec proto;
        proto.mu = cfg.value("mu", 0.0);
        proto.mode = dephasing_mode_from_string(cfg.value("mode", "analytic"));
        proto.shots = cfg.value("shots", 1000L);
        proto.seed = c.seed;
        std::vector<Real> sigmas;
        if (cfg.contains("sigmas")) {
            sigmas = real_list(cfg.at("sigmas"));
        } else {
            for (int i = 0; i <= 24; ++i) sigmas.push_back(0.125 * i);
        }
        res = dephasing_sweep(base, sigmas, proto, obs, grid, c.threads);
    } else if (family == "wishart") {
        const ModeGrid grid = grid_from(cfg, 16);
        const LabeledState psi = build_two_photon(modes_from(cfg, grid), grid.m,
                                                  conjugated_from(cfg), cfg.value("phase", 0.0));
        std::vector<Index> ks;
        if (cfg.contains("ks"))
            for (const auto& k : cfg.at("ks")) ks.push_back(k.get<Index>());
        else
            ks = {16, 64, 256, 1024};
        std::vector<Real> epsilons = cfg.contains("epsilons")
                                         ? real_list(cfg.at("epsilons"))
                                         : std::vector<Real>{0.1, 0.3, 0.5, 0.7, 0.9};
        res = wishart_sweep(psi, ks, epsilons, c.seed, obs, grid, c.threads);
    } else if (family == "depolarize") {
        const ModeGrid grid = grid_from(cfg, 64);
        SkyrmionSpec spec;
        spec.l = cfg.value("l", 1);
        spec.grid = grid;
        const DensityMatrix rho =
            build_single_photon_skyrmion(spec, SynthMethod::analytic_q1);
        const std::vector<Real> epsilons = cfg.contains("epsilons")
                                               ? real_list(cfg.at("epsilons"))
                                               : std::vector<Real>{0.1, 0.5, 0.99};
        res.param_names = {"epsilon"};
        for (const Real eps : epsilons) {
            SweepRow row;
            row.params = {{"epsilon", eps}};
            row.seed = c.seed;
            try {
                row.report = analyze_texture(stokes_from_density(depolarize(rho, eps), grid));
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            res.rows.push_back(std::move(row));
        }
    } else {
        throw Error("unknown sweep family '" + family + "' (want dephasing|wishart|depolarize)");
    }

    write_text_file(outs.path("sweep.csv"), sweep_csv(res));
    write_manifest(c, "sweep", cfg, outs);
    std::printf("%zu points\n", res.rows.size());
    return sweep_exit(res);
}

int cmd_multiphoton(const Common& c, const Json& cfg) {
    const ModeGrid grid = grid_from(cfg, 80);
    const long n = cfg.value("n", 2L);
    VarrhoSpec vs;
    vs.m = grid.m;
    if (cfg.contains("varrho")) {
        const Json& v = cfg.at("varrho");
        vs.kind = varrho_kind_from_string(v.value("kind", "uniform"));
        vs.edge_bins = v.value("edge_bins", 0);
    }
    const std::vector<CVec> modes = modes_from(cfg, grid);

    const NestedReport rep = multiphoton_nested_report(n, vs, modes, grid);
    const LabeledState bell = build_two_photon(modes, grid.m, false, 0.0);
    const PairMixture pm = reduced_pair_state(n, bell, single_photon_varrho(vs));
    const FourReductions red = reduce_all_subspaces(pm);

    Outputs outs(c.out_dir);
    write_text_file(outs.path("nested_report.json"), nested_report_json(rep).dump(2) + "\n");
    save_nested_textures(bell, red, grid, outs);
    write_manifest(c, "multiphoton", cfg, outs);

    std::printf("nonlocal Q_raw = %s\n", fmt17(rep.nonlocal_spin_b_mode_a.q_raw).c_str());
    return 0;
}

int cmd_phase_scan(const Common& c, const Json& cfg) {
    const ModeGrid grid = grid_from(cfg, 11);
    const std::vector<CVec> modes = modes_from(cfg, grid);
    const ScanSubspace subspace = scan_subspace_from_string(cfg.value("subspace", "joint"));
    std::vector<Real> phis;
    if (cfg.contains("phis")) {
        phis = real_list(cfg.at("phis"));
    } else {
        const long points = cfg.value("points", 256L);
        if (points < 1) throw Error("points must be positive");
        for (long i = 0; i < points; ++i) phis.push_back(kTau * Real(i) / Real(points));
    }

    const SweepResult res = phase_scan(modes, grid.m, phis, subspace, grid, c.threads);

    Outputs outs(c.out_dir);
    write_text_file(outs.path("phase_scan.csv"), phase_scan_csv(res));
    write_manifest(c, "phase-scan", cfg, outs);

    long flips = 0;
    for (std::size_t i = 1; i < res.rows.size(); ++i)
        if (res.rows[i].report.q_rounded != res.rows[i - 1].report.q_rounded) ++flips;
    std::printf("%zu points, %ld charge transitions\n", res.rows.size(), flips);
    return sweep_exit(res);
}

int cmd_mesh(const Common& c, const Json& cfg) {
    const ModeGrid grid = grid_from(cfg, 11);
    const std::vector<CVec> modes = modes_from(cfg, grid);
    CMat columns(2 * grid.m, Index(modes.size()));
    for (Index k = 0; k < columns.cols(); ++k) columns.col(k) = modes[std::size_t(k)];

    const CMat u = complete_isometry(columns);
    const MeshProgram prog = mesh_decompose(u);
    const Real err = (mesh_unitary(prog) - u).cwiseAbs().maxCoeff();

    Outputs outs(c.out_dir);
    write_text_file(outs.path("mesh.json"), mesh_program_json(prog).dump(2) + "\n");
    write_manifest(c, "mesh", cfg, outs);

    std::printf("D = %lld, %zu elements, round-trip error = %s\n",
                static_cast<long long>(prog.dim), prog.elements.size(), fmt17(err).c_str());
    return 0;
}

int cmd_render(const Common& c, const Json& cfg) {
    const std::string input = cfg.value("input", "");
    if (input.empty()) throw Error("render needs --input <texture .stokes.csv>");
    StokesField field;
    try {
        field = load_stokes_csv(input);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: unreadable input: %s\n", e.what());
        return 1;
    }
    const TextureReport rep = analyze_texture(field);

    Outputs outs(c.out_dir);
    save_svg(field, rep.q_raw, outs.path(cfg.value("output", "render.svg")));
    write_manifest(c, "render", cfg, outs);
    return 0;
}

int cmd_validate(const Common& c, const Json& cfg) {
    const std::string input = cfg.value("input", "");
    if (input.empty()) throw Error("validate needs --input <state .qdm>");
    const DensityMatrix rho = load_qdm(input);
    const ValidationReport rep = validate_density(rho);
    const Real tol = cfg.value("tol", 1e-8);

    const Json j{{"hermiticity", rep.hermiticity},
                 {"min_eigenvalue", rep.min_eigenvalue},
                 {"trace_deviation", rep.trace_deviation},
                 {"pass", rep.pass(tol)}};
    Outputs outs(c.out_dir);
    write_text_file(outs.path("validation.json"), j.dump(2) + "\n");
    write_manifest(c, "validate", cfg, outs);

    std::printf("%s\n", j.dump(2).c_str());
    return rep.pass(tol) ? 0 : 2;
}

// Copies any flags the user passed over the JSON config (flags win).
template <typename T>
void override_if(const CLI::App* cmd, const std::string& flag, Json& cfg,
                 const std::string& key, const T& value) {
    if (cmd->count(flag)) cfg[key] = value;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"skyrmion textures in mixed-light density matrices"};
    app.require_subcommand(1);

    Common c;
    int l = 1, m = 0, d = 0, sign = -1, edge_bins = 0;
    long n = 2, points = 256, shots = 1000;
    Real phi0 = 0, r0 = 0, x_max = 1.0, phase = 0, mu = 0;
    std::string method = "spectral", state = "conjugated", modes = "analytic";
    std::string family = "dephasing", observable = "nonlocal", varrho = "uniform";
    std::string subspace = "joint", deph_mode = "analytic", input, output = "render.svg";

    CLI::App* synth = app.add_subcommand("synth", "single-photon skyrmion density matrix");
    add_common(synth, c);
    synth->add_option("--l", l, "winding number (charge -l)");
    synth->add_option("--phi0", phi0, "in-plane phase offset");
    synth->add_option("--r0", r0, "skyrmion radius (<= 0: x_max)");
    synth->add_option("--m", m, "grid points per axis");
    synth->add_option("--x-max", x_max, "half-width of the mode window");
    synth->add_option("--d", d, "truncation rank (<= 0: |l|+1)");
    synth->add_option("--method", method, "analytic|spectral")
        ->check(CLI::IsMember({"analytic", "analytic_q1", "spectral"}));

    CLI::App* nested = app.add_subcommand("nested", "two-photon state and all reductions");
    add_common(nested, c);
    nested->add_option("--state", state, "conjugated|bell")
        ->check(CLI::IsMember({"conjugated", "bell"}));
    nested->add_option("--phase", phase, "relative phase (bell form only)");
    nested->add_option("--sign", sign, "analytic mode pair sign (-1|+1)");
    nested->add_option("--m", m, "grid points per axis");
    nested->add_option("--x-max", x_max, "half-width of the mode window");

    CLI::App* sweep = app.add_subcommand("sweep", "noise-channel parameter sweep");
    add_common(sweep, c);
    sweep->add_option("--family", family, "dephasing|wishart|depolarize")
        ->check(CLI::IsMember({"dephasing", "wishart", "depolarize"}));
    sweep->add_option("--observable", observable, "local|nonlocal")
        ->check(CLI::IsMember({"local", "nonlocal"}));
    sweep->add_option("--state", state, "conjugated|bell")
        ->check(CLI::IsMember({"conjugated", "bell"}));
    sweep->add_option("--m", m, "grid points per axis");
    sweep->add_option("--x-max", x_max, "half-width of the mode window");
    sweep->add_option("--sign", sign, "analytic mode pair sign (-1|+1)");
    sweep->add_option("--mu", mu, "dephasing phase mean");
    sweep->add_option("--mode", deph_mode, "analytic|monte_carlo")
        ->check(CLI::IsMember({"analytic", "monte_carlo"}));
    sweep->add_option("--shots", shots, "monte_carlo sample count");
    sweep->add_option("--l", l, "winding number (depolarize family)");

    CLI::App* multi = app.add_subcommand("multiphoton", "N-photon reduced pair analysis");
    add_common(multi, c);
    multi->add_option("--n", n, "photon number (>= 2)");
    multi->add_option("--m", m, "grid points per axis");
    multi->add_option("--x-max", x_max, "half-width of the mode window");
    multi->add_option("--sign", sign, "analytic mode pair sign (-1|+1)");
    multi->add_option("--varrho", varrho, "uniform|edge background")
        ->check(CLI::IsMember({"uniform", "edge", "edge_concentrated"}));
    multi->add_option("--edge-bins", edge_bins, "bins per edge (<= 0: max(2, M/10))");

    CLI::App* scan = app.add_subcommand("phase-scan", "charge vs relative phase");
    add_common(scan, c);
    scan->add_option("--points", points, "uniform phase points on [0, 2pi)");
    scan->add_option("--m", m, "grid points per axis");
    scan->add_option("--x-max", x_max, "half-width of the mode window");
    scan->add_option("--sign", sign, "analytic mode pair sign (-1|+1)");
    scan->add_option("--subspace", subspace, "joint|local_A|local_B|nonlocal")
        ->check(CLI::IsMember({"joint", "local_A", "local_B", "nonlocal"}));

    CLI::App* mesh = app.add_subcommand("mesh", "interferometer mesh for the mode pair");
    add_common(mesh, c);
    mesh->add_option("--modes", modes, "mode source (analytic)")
        ->check(CLI::IsMember({"analytic"}));
    mesh->add_option("--m", m, "grid points per axis");
    mesh->add_option("--x-max", x_max, "half-width of the mode window");
    mesh->add_option("--sign", sign, "analytic mode pair sign (-1|+1)");

    CLI::App* render = app.add_subcommand("render", "texture CSV to SVG image");
    add_common(render, c);
    render->add_option("--input", input, "texture .stokes.csv file");
    render->add_option("--output", output, "image file name (default render.svg)");

    CLI::App* validate = app.add_subcommand("validate", "density-matrix file checks");
    add_common(validate, c);
    validate->add_option("--input", input, "state .qdm file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    return run_guarded([&]() -> int {
        Json cfg = load_config(c);
        if (synth->parsed()) {
            override_if(synth, "--l", cfg, "l", l);
            override_if(synth, "--phi0", cfg, "phi0", phi0);
            override_if(synth, "--r0", cfg, "r0", r0);
            override_if(synth, "--m", cfg, "m", m);
            override_if(synth, "--x-max", cfg, "x_max", x_max);
            override_if(synth, "--d", cfg, "d", d);
            override_if(synth, "--method", cfg, "method", method);
            return cmd_synth(c, cfg);
        }
        if (nested->parsed()) {
            override_if(nested, "--state", cfg, "state", state);
            override_if(nested, "--phase", cfg, "phase", phase);
            override_if(nested, "--sign", cfg, "sign", sign);
            override_if(nested, "--m", cfg, "m", m);
            override_if(nested, "--x-max", cfg, "x_max", x_max);
            return cmd_nested(c, cfg);
        }
        if (sweep->parsed()) {
            override_if(sweep, "--family", cfg, "family", family);
            override_if(sweep, "--observable", cfg, "observable", observable);
            override_if(sweep, "--state", cfg, "state", state);
            override_if(sweep, "--m", cfg, "m", m);
            override_if(sweep, "--x-max", cfg, "x_max", x_max);
            override_if(sweep, "--sign", cfg, "sign", sign);
            override_if(sweep, "--mu", cfg, "mu", mu);
            override_if(sweep, "--mode", cfg, "mode", deph_mode);
            override_if(sweep, "--shots", cfg, "shots", shots);
            override_if(sweep, "--l", cfg, "l", l);
            return cmd_sweep(c, cfg);
        }
        if (multi->parsed()) {
            override_if(multi, "--n", cfg, "n", n);
            override_if(multi, "--m", cfg, "m", m);
            override_if(multi, "--x-max", cfg, "x_max", x_max);
            override_if(multi, "--sign", cfg, "sign", sign);
            if (multi->count("--varrho")) cfg["varrho"]["kind"] = varrho;
            if (multi->count("--edge-bins")) cfg["varrho"]["edge_bins"] = edge_bins;
            return cmd_multiphoton(c, cfg);
        }
        if (scan->parsed()) {
            override_if(scan, "--points", cfg, "points", points);
            override_if(scan, "--m", cfg, "m", m);
            override_if(scan, "--x-max", cfg, "x_max", x_max);
            override_if(scan, "--sign", cfg, "sign", sign);
            override_if(scan, "--subspace", cfg, "subspace", subspace);
            return cmd_phase_scan(c, cfg);
        }
        if (mesh->parsed()) {
            override_if(mesh, "--modes", cfg, "modes", modes);
            override_if(mesh, "--m", cfg, "m", m);
            override_if(mesh, "--x-max", cfg, "x_max", x_max);
            override_if(mesh, "--sign", cfg, "sign", sign);
            return cmd_mesh(c, cfg);
        }
        if (render->parsed()) {
            override_if(render, "--input", cfg, "input", input);
            override_if(render, "--output", cfg, "output", output);
            return cmd_render(c, cfg);
        }
        if (validate->parsed()) {
            override_if(validate, "--input", cfg, "input", input);
            return cmd_validate(c, cfg);
        }
        return 1;
    });
}
