#include "skyrm/io.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "skyrm/sha256.hpp"
#include "skyrm/util.hpp"

namespace skyrm {

namespace fs = std::filesystem;

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << content;
    if (!out) throw Error("short write to '" + path + "'");
}

namespace {

void write_doubles(std::ofstream& out, const double* v, std::size_t n) {
    out.write(reinterpret_cast<const char*>(v), std::streamsize(n * sizeof(double)));
}

std::vector<double> read_doubles(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw Error("cannot read '" + path + "'");
    const std::streamsize bytes = in.tellg();
    if (bytes % 8 != 0) throw ShapeMismatch("data file size not a multiple of 8");
    std::vector<double> v(std::size_t(bytes) / 8);
    in.seekg(0);
    in.read(reinterpret_cast<char*>(v.data()), bytes);
    if (!in) throw Error("short read from '" + path + "'");
    return v;
}

Json factor_json(const FactorLabel& f) {
    return Json{{"party", f.party}, {"kind", to_string(f.kind)}, {"dim", f.dim}};
}

FactorLabel factor_from_json(const Json& j) {
    return {j.at("party").get<std::string>(),
            factor_kind_from_string(j.at("kind").get<std::string>()),
            j.at("dim").get<Index>()};
}

}  // namespace

void save_qdm(const DensityMatrix& rho, const std::string& path) {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    const std::string data_name = p.filename().string() + ".bin";
    const fs::path data_path = p.parent_path() / data_name;

    Json j;
    j["version"] = 1;
    j["factors"] = Json::array();
    for (const auto& f : rho.factors) j["factors"].push_back(factor_json(f));
    j["storage"] = rho.is_factored() ? "factored" : "dense";
    j["data_file"] = data_name;
    write_text_file(path, j.dump(2) + "\n");

    std::ofstream out(data_path, std::ios::binary);
    if (!out) throw Error("cannot write '" + data_path.string() + "'");
    if (rho.is_factored()) {
        write_doubles(out, rho.weights.data(), std::size_t(rho.weights.size()));
        for (Index k = 0; k < rho.vectors.cols(); ++k)
            for (Index r = 0; r < rho.vectors.rows(); ++r) {
                const double pair[2] = {rho.vectors(r, k).real(), rho.vectors(r, k).imag()};
                write_doubles(out, pair, 2);
            }
    } else {
        for (Index r = 0; r < rho.rho.rows(); ++r)
            for (Index c = 0; c < rho.rho.cols(); ++c) {
                const double pair[2] = {rho.rho(r, c).real(), rho.rho(r, c).imag()};
                write_doubles(out, pair, 2);
            }
    }
    if (!out) throw Error("short write to '" + data_path.string() + "'");
}

DensityMatrix load_qdm(const std::string& path) {
    const Json j = Json::parse(read_text_file(path));
    if (j.at("version").get<int>() != 1) throw ShapeMismatch("unsupported container version");
    std::vector<FactorLabel> factors;
    for (const auto& f : j.at("factors")) factors.push_back(factor_from_json(f));
    const Index dim = total_dim(factors);
    const fs::path data_path =
        fs::path(path).parent_path() / j.at("data_file").get<std::string>();
    const std::vector<double> v = read_doubles(data_path.string());
    const std::string storage = j.at("storage").get<std::string>();
    if (storage == "dense") {
        if (Index(v.size()) != 2 * dim * dim) throw ShapeMismatch("dense payload size mismatch");
        CMat rho(dim, dim);
        std::size_t at = 0;
        for (Index r = 0; r < dim; ++r)
            for (Index c = 0; c < dim; ++c) {
                rho(r, c) = Complex(v[at], v[at + 1]);
                at += 2;
            }
        return density_from_dense(std::move(factors), std::move(rho));
    }
    if (storage != "factored") throw ShapeMismatch("unknown storage '" + storage + "'");
    // Layout is K weights then K columns of dim complex entries:
    // bytes = 8K + 16K*dim, so K is implied by the payload size.
    if (v.size() % std::size_t(1 + 2 * dim) != 0) throw ShapeMismatch("factored payload size mismatch");
    const Index k = Index(v.size() / std::size_t(1 + 2 * dim));
    RVec w(k);
    CMat vectors(dim, k);
    std::size_t at = 0;
    for (Index i = 0; i < k; ++i) w[i] = v[at++];
    for (Index i = 0; i < k; ++i)
        for (Index r = 0; r < dim; ++r) {
            vectors(r, i) = Complex(v[at], v[at + 1]);
            at += 2;
        }
    return density_from_factored(std::move(factors), std::move(w), std::move(vectors));
}

std::string stokes_csv(const StokesField& field) {
    std::ostringstream out;
    out << "i,j,x,xp,sx,sy,sz,s0,defined\n";
    const Index m = field.grid.m;
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < m; ++j)
            out << i << ',' << j << ',' << fmt17(field.grid.x(int(i))) << ','
                << fmt17(field.grid.x(int(j))) << ',' << fmt17(field.sx(i, j)) << ','
                << fmt17(field.sy(i, j)) << ',' << fmt17(field.sz(i, j)) << ','
                << fmt17(field.s0(i, j)) << ',' << (field.defined(i, j) ? 1 : 0) << '\n';
    return out.str();
}

void save_stokes_csv(const StokesField& field, const std::string& path) {
    write_text_file(path, stokes_csv(field));
}

StokesField load_stokes_csv(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line) || line != "i,j,x,xp,sx,sy,sz,s0,defined")
        throw ShapeMismatch("bad texture header in '" + path + "'");
    std::vector<std::array<double, 7>> rows;  // x, xp, sx, sy, sz, s0, defined
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::array<double, 9> f{};
        std::size_t at = 0;
        for (int col = 0; col < 9; ++col) {
            const std::size_t next = line.find(',', at);
            if ((next == std::string::npos) != (col == 8)) throw ShapeMismatch("bad texture row");
            f[std::size_t(col)] = std::stod(line.substr(at, next - at));
            at = next + 1;
        }
        rows.push_back({f[2], f[3], f[4], f[5], f[6], f[7], f[8]});
    }
    const Index m = Index(std::lround(std::sqrt(double(rows.size()))));
    if (m < 3 || m * m != Index(rows.size())) throw ShapeMismatch("texture is not a square grid");
    double x_max = 0;
    for (const auto& r : rows) x_max = std::max(x_max, std::abs(r[0]));
    StokesField field;
    field.grid = ModeGrid(int(m), x_max > 0 ? x_max : 1.0);
    field.sx.resize(m, m);
    field.sy.resize(m, m);
    field.sz.resize(m, m);
    field.s0.resize(m, m);
    field.defined.resize(m, m);
    field.ux = RMat::Zero(m, m);
    field.uy = RMat::Zero(m, m);
    field.uz = RMat::Zero(m, m);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < m; ++j) {
            const auto& r = rows[std::size_t(i * m + j)];
            field.sx(i, j) = r[2];
            field.sy(i, j) = r[3];
            field.sz(i, j) = r[4];
            field.s0(i, j) = r[5];
            field.defined(i, j) = r[6] != 0;
            if (field.defined(i, j) && field.s0(i, j) > 0) {
                field.ux(i, j) = field.sx(i, j) / field.s0(i, j);
                field.uy(i, j) = field.sy(i, j) / field.s0(i, j);
                field.uz(i, j) = field.sz(i, j) / field.s0(i, j);
            }
        }
    field.raw_scale = field.s0.maxCoeff();
    return field;
}

namespace {

Json finite_or_null(Real v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

}  // namespace

Json texture_report_json(const TextureReport& r) {
    return Json{{"Q_raw", r.q_raw},
                {"Q_rounded", r.q_rounded},
                {"integer_residual", r.integer_residual},
                {"helicity", finite_or_null(r.helicity)},
                {"class", to_string(r.texture_class)},
                {"undefined_fraction", r.undefined_fraction},
                {"boundary_deviation", r.boundary_deviation},
                {"boundary_flag", r.boundary_flag},
                {"degenerate_triangles", r.degenerate_triangles}};
}

Json nested_report_json(const NestedReport& rep) {
    auto sub = [](const char* label, const TextureReport& t) {
        Json j = texture_report_json(t);
        j["label"] = label;
        return j;
    };
    return Json{{"nested", rep.nested},
                {"subspaces",
                 Json::array({sub("joint", rep.joint), sub("local_A", rep.local_a),
                              sub("local_B", rep.local_b),
                              sub("nonlocal_sigmaA_xB", rep.nonlocal_spin_a_mode_b),
                              sub("nonlocal_sigmaB_xA", rep.nonlocal_spin_b_mode_a)})}};
}

namespace {

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

std::string sweep_csv(const SweepResult& result) {
    std::ostringstream out;
    for (const auto& name : result.param_names) out << name << ',';
    out << "Q_raw,Q_rounded,class,residual,seed,error\n";
    for (const auto& row : result.rows) {
        for (const auto& [name, value] : row.params) {
            (void)name;
            out << fmt17(value) << ',';
        }
        if (row.error.empty()) {
            out << fmt17(row.report.q_raw) << ',' << row.report.q_rounded << ','
                << to_string(row.report.texture_class) << ',' << fmt17(row.report.integer_residual)
                << ',' << row.seed << ",\n";
        } else {
            out << ",,,," << row.seed << ',' << csv_quote(row.error) << '\n';
        }
    }
    return out.str();
}

std::string phase_scan_csv(const SweepResult& result) {
    std::ostringstream out;
    out << "phi,Q_raw,Q_rounded,class\n";
    for (const auto& row : result.rows) {
        out << fmt17(row.params.at(0).second) << ',';
        if (row.error.empty())
            out << fmt17(row.report.q_raw) << ',' << row.report.q_rounded << ','
                << to_string(row.report.texture_class) << '\n';
        else
            out << ",,\n";
    }
    return out.str();
}

Json mesh_program_json(const MeshProgram& p) {
    Json elems = Json::array();
    for (const auto& e : p.elements)
        elems.push_back(
            Json{{"layer", e.layer}, {"port", e.port}, {"theta", e.theta}, {"phi", e.phi}});
    std::vector<Real> phases(p.output_phases.data(), p.output_phases.data() + p.output_phases.size());
    return Json{{"dim", p.dim}, {"elements", elems}, {"output_phases", phases}};
}

MeshProgram mesh_program_from_json(const Json& j) {
    MeshProgram p;
    p.dim = j.at("dim").get<Index>();
    for (const auto& e : j.at("elements"))
        p.elements.push_back({e.at("layer").get<int>(), e.at("port").get<int>(),
                              e.at("theta").get<Real>(), e.at("phi").get<Real>()});
    const auto phases = j.at("output_phases").get<std::vector<Real>>();
    p.output_phases = Eigen::Map<const RVec>(phases.data(), Index(phases.size()));
    p.validate();
    return p;
}

Json run_manifest_json(const RunManifest& manifest, const std::string& base_dir) {
    Json outputs = Json::array();
    for (const auto& rel : manifest.outputs) {
        const fs::path full = fs::path(base_dir) / rel;
        outputs.push_back(Json{{"path", rel}, {"sha256", Sha256::hex_of_file(full.string())}});
    }
    return Json{{"version", kVersion},
                {"command", manifest.command},
                {"config", manifest.config},
                {"seed", manifest.seed},
                {"outputs", outputs}};
}

void write_run_manifest(const RunManifest& manifest, const std::string& path) {
    const std::string dir = fs::path(path).parent_path().string();
    write_text_file(path, run_manifest_json(manifest, dir.empty() ? "." : dir).dump(2) + "\n");
}

}  // namespace skyrm
