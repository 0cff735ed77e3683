#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "skyrm/io.hpp"
#include "skyrm/rng.hpp"
#include "skyrm/sha256.hpp"
#include "skyrm/synth.hpp"
#include "skyrm/util.hpp"

using namespace skyrm;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag)
        : path(fs::temp_directory_path() / ("skyrm_io_" + tag)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

DensityMatrix sample_density(const ModeGrid& grid) {
    const auto [u1, u2] = analytic_modes_q1(grid, -1);
    RVec w(2);
    w << 0.5, 0.5;
    CMat v(2 * grid.m, 2);
    v.col(0) = u1.amplitudes;
    v.col(1) = u2.amplitudes;
    return density_from_factored({spin_factor("A"), mode_factor("A", grid.m)}, w, v);
}

}  // namespace

TEST_CASE("text files round trip and create parent dirs") {
    const TempDir dir("text");
    const std::string path = dir / "a/b/c.txt";
    const std::string body = "line1\nline2 \xc3\xa9\n";
    write_text_file(path, body);
    CHECK(read_text_file(path) == body);
    CHECK_THROWS_AS(read_text_file(dir / "missing.txt"), Error);
}

TEST_CASE("density container: dense round trip") {
    const TempDir dir("qdm_dense");
    const ModeGrid grid(6, 1.0);
    DensityMatrix rho = sample_density(grid);
    rho = density_from_dense(rho.factors, rho.to_dense());

    const std::string path = dir / "state.qdm";
    save_qdm(rho, path);
    CHECK(fs::exists(dir / "state.qdm"));
    CHECK(fs::exists(dir / "state.qdm.bin"));

    const DensityMatrix back = load_qdm(path);
    CHECK(!back.is_factored());
    REQUIRE(back.factors.size() == 2);
    CHECK(back.factors[0] == rho.factors[0]);
    CHECK(back.factors[1] == rho.factors[1]);
    CHECK((back.to_dense() - rho.to_dense()).cwiseAbs().maxCoeff() == 0.0);

    const Json header = Json::parse(read_text_file(path));
    CHECK(header.at("version") == 1);
    CHECK(header.at("storage") == "dense");
    CHECK(header.at("data_file") == "state.qdm.bin");
}

TEST_CASE("density container: factored round trip infers the rank") {
    const TempDir dir("qdm_fact");
    const DensityMatrix rho = sample_density(ModeGrid(7, 1.0));
    REQUIRE(rho.is_factored());

    const std::string path = dir / "sub/state.qdm";
    save_qdm(rho, path);
    const DensityMatrix back = load_qdm(path);
    CHECK(back.is_factored());
    CHECK(back.rank() == 2);
    CHECK((back.weights - rho.weights).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.vectors - rho.vectors).cwiseAbs().maxCoeff() == 0.0);
    CHECK(Json::parse(read_text_file(path)).at("storage") == "factored");
}

TEST_CASE("density container: corrupted payloads are rejected") {
    const TempDir dir("qdm_bad");
    const DensityMatrix rho = sample_density(ModeGrid(5, 1.0));
    const std::string path = dir / "state.qdm";
    save_qdm(rho, path);

    const std::string bin = dir / "state.qdm.bin";
    const auto bytes = read_text_file(bin);

    // Not a multiple of 8 bytes.
    write_text_file(bin, bytes.substr(0, bytes.size() - 4));
    CHECK_THROWS_AS(load_qdm(path), ShapeMismatch);

    // Multiple of 8 but inconsistent with any rank.
    write_text_file(bin, bytes.substr(0, bytes.size() - 8));
    CHECK_THROWS_AS(load_qdm(path), ShapeMismatch);

    // Header corruption.
    write_text_file(bin, bytes);
    Json j = Json::parse(read_text_file(path));
    j["version"] = 9;
    write_text_file(path, j.dump());
    CHECK_THROWS_AS(load_qdm(path), ShapeMismatch);
    j["version"] = 1;
    j["storage"] = "sparse";
    write_text_file(path, j.dump());
    CHECK_THROWS_AS(load_qdm(path), ShapeMismatch);
}

TEST_CASE("texture table round trips through 17 significant digits") {
    const TempDir dir("stokes");
    const ModeGrid grid(9, 1.0);
    const StokesField field = stokes_from_density(sample_density(grid), grid);

    const std::string path = dir / "t.stokes.csv";
    save_stokes_csv(field, path);
    const std::string text = read_text_file(path);
    CHECK(text.rfind("i,j,x,xp,sx,sy,sz,s0,defined\n", 0) == 0);

    const StokesField back = load_stokes_csv(path);
    CHECK(back.grid.m == 9);
    CHECK(back.grid.x_max == doctest::Approx(1.0).epsilon(1e-15));
    CHECK((back.sx - field.sx).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.sy - field.sy).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.sz - field.sz).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.s0 - field.s0).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.ux - field.ux).cwiseAbs().maxCoeff() < 1e-15);
    for (Index i = 0; i < 9; ++i)
        for (Index j = 0; j < 9; ++j) CHECK(back.defined(i, j) == field.defined(i, j));

    const TextureReport a = analyze_texture(field);
    const TextureReport b = analyze_texture(back);
    CHECK(a.q_raw == b.q_raw);
    CHECK(a.helicity == b.helicity);

    write_text_file(path, "wrong,header\n");
    CHECK_THROWS_AS(load_stokes_csv(path), ShapeMismatch);
}

TEST_CASE("texture report JSON carries null helicity when undefined") {
    TextureReport r;
    r.q_raw = -0.999;
    r.q_rounded = -1;
    r.integer_residual = 0.001;
    r.helicity = std::nan("");
    r.texture_class = TextureClass::Bubble;
    r.boundary_flag = true;
    r.degenerate_triangles = 3;
    const Json j = texture_report_json(r);
    CHECK(j.at("Q_raw") == -0.999);
    CHECK(j.at("Q_rounded") == -1);
    CHECK(j.at("helicity").is_null());
    CHECK(j.at("class") == "Bubble");
    CHECK(j.at("boundary_flag") == true);
    CHECK(j.at("degenerate_triangles") == 3);

    r.helicity = 0.25;
    CHECK(texture_report_json(r).at("helicity") == 0.25);
}

TEST_CASE("nested report JSON lists the five subspaces in order") {
    const ModeGrid grid(8, 1.0);
    const auto [u1, u2] = analytic_modes_q1(grid, -1);
    const LabeledState psi =
        build_two_photon({u1.amplitudes, u2.amplitudes}, grid.m, true);
    const Json j = nested_report_json(nested_report(psi, grid));
    CHECK(j.at("nested").is_boolean());
    const auto& subs = j.at("subspaces");
    REQUIRE(subs.size() == 5);
    const std::vector<std::string> labels = {"joint", "local_A", "local_B",
                                             "nonlocal_sigmaA_xB", "nonlocal_sigmaB_xA"};
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(subs[i].at("label") == labels[i]);
        CHECK(subs[i].contains("Q_raw"));
        CHECK(subs[i].contains("class"));
    }
}

TEST_CASE("sweep table quotes error text and blanks failed rows") {
    SweepResult res;
    res.param_names = {"sigma"};
    res.rows.resize(2);
    res.rows[0].params = {{"sigma", 0.5}};
    res.rows[0].report.q_raw = -1.0;
    res.rows[0].report.q_rounded = -1;
    res.rows[0].report.texture_class = TextureClass::Neel;
    res.rows[0].report.integer_residual = 0.0;
    res.rows[0].seed = 9;
    res.rows[1].params = {{"sigma", 1.5}};
    res.rows[1].seed = 9;
    res.rows[1].error = "bad, \"thing\"";

    const std::string csv = sweep_csv(res);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "sigma,Q_raw,Q_rounded,class,residual,seed,error");
    std::getline(in, line);
    CHECK(line == fmt17(0.5) + "," + fmt17(-1.0) + ",-1,Neel," + fmt17(0.0) + ",9,");
    std::getline(in, line);
    CHECK(line == fmt17(1.5) + ",,,,,9,\"bad, \"\"thing\"\"\"");
    CHECK(!std::getline(in, line));
}

TEST_CASE("phase scan table") {
    SweepResult res;
    res.param_names = {"phi"};
    res.rows.resize(2);
    res.rows[0].params = {{"phi", 0.0}};
    res.rows[0].report.q_raw = -1.0;
    res.rows[0].report.q_rounded = -1;
    res.rows[0].report.texture_class = TextureClass::Bloch;
    res.rows[1].params = {{"phi", 3.0}};
    res.rows[1].error = "boom";

    const std::string csv = phase_scan_csv(res);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "phi,Q_raw,Q_rounded,class");
    std::getline(in, line);
    CHECK(line == fmt17(0.0) + "," + fmt17(-1.0) + ",-1,Bloch");
    std::getline(in, line);
    CHECK(line == fmt17(3.0) + ",,,");
}

TEST_CASE("mesh program JSON round trips bitwise") {
    Philox rng(21, 0);
    CMat g(5, 5);
    for (Index j = 0; j < 5; ++j)
        for (Index i = 0; i < 5; ++i) g(i, j) = Complex(rng.normal(0, 1), rng.normal(0, 1));
    const CMat u = Eigen::HouseholderQR<CMat>(g).householderQ();
    const MeshProgram prog = mesh_decompose(u);

    const Json j = mesh_program_json(prog);
    const MeshProgram back = mesh_program_from_json(Json::parse(j.dump()));
    CHECK(back.dim == prog.dim);
    REQUIRE(back.elements.size() == prog.elements.size());
    for (std::size_t k = 0; k < prog.elements.size(); ++k) {
        CHECK(back.elements[k].layer == prog.elements[k].layer);
        CHECK(back.elements[k].port == prog.elements[k].port);
        CHECK(back.elements[k].theta == prog.elements[k].theta);
        CHECK(back.elements[k].phi == prog.elements[k].phi);
    }
    CHECK((back.output_phases - prog.output_phases).cwiseAbs().maxCoeff() == 0.0);
    CHECK_NOTHROW(back.validate());
    CHECK((mesh_unitary(back) - mesh_unitary(prog)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("run manifest digests every declared output") {
    const TempDir dir("manifest");
    write_text_file(dir / "a.csv", "x,y\n1,2\n");
    write_text_file(dir / "sub/b.json", "{}\n");

    RunManifest man;
    man.command = "sweep";
    man.config = Json{{"family", "dephasing"}, {"m", 16}};
    man.seed = 77;
    man.outputs = {"a.csv", "sub/b.json"};
    write_run_manifest(man, dir / "manifest.json");

    const Json j = Json::parse(read_text_file(dir / "manifest.json"));
    CHECK(j.at("version") == kVersion);
    CHECK(j.at("command") == "sweep");
    CHECK(j.at("config") == man.config);
    CHECK(j.at("seed") == 77);
    REQUIRE(j.at("outputs").size() == 2);
    CHECK(j.at("outputs")[0].at("path") == "a.csv");
    CHECK(j.at("outputs")[0].at("sha256") == Sha256::hex_of_file(dir / "a.csv"));
    CHECK(j.at("outputs")[1].at("sha256") == Sha256::hex_of_file(dir / "sub/b.json"));

    // Digest is over the file bytes: edits show up.
    write_text_file(dir / "a.csv", "x,y\n1,3\n");
    CHECK(j.at("outputs")[0].at("sha256") != Sha256::hex_of_file(dir / "a.csv"));
}
