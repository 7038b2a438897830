#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sqzppf/config.hpp"
#include "sqzppf/kernel_cache.hpp"
#include "sqzppf/pipeline.hpp"

using namespace sqzppf;
namespace fs = std::filesystem;

namespace {

std::string cfg_path(const std::string& name) { return std::string(SQZPPF_CONFIG_DIR) + "/" + name; }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("sqzppf_test_" + name);
    fs::remove_all(p);
    return p;
}

const char* kMinimal = R"([jsa]
central_s = 1.6 eV
central_i = 1.6 eV
sigma_plus = 5 meV
sigma_minus = 82.7 meV

[squeeze]
beta = 2.0
)";

ErrorCode code_of(const std::string& text, ParseMode mode = ParseMode::Strict) {
    try {
        parse_config_text(text, mode);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidArgument;
}

std::string message_of(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

RunConfig small_spectrum(const fs::path& out) {
    RunConfig c = parse_config(cfg_path("paper_fig3a.cfg")).config;
    c.grids->vbar_start = 3.15;
    c.grids->vbar_stop = 3.25;
    c.grids->vbar_step = 0.005;
    c.grids->T_stop = 100.0;
    c.grids->T_step = 50.0;
    c.output.directory = out.string();
    return c;
}

}  // namespace

TEST_CASE("shipped configs parse and round-trip") {
    for (const char* name : {"paper_fig1e.cfg", "paper_fig2.cfg", "paper_fig3a.cfg", "paper_fig3b.cfg", "toy_oracle.cfg"}) {
        CAPTURE(name);
        const ParseResult r = parse_config(cfg_path(name));
        CHECK(r.warnings.empty());
        const std::string text = emit_config(r.config);
        const RunConfig back = parse_config_text(text).config;
        CHECK(back == r.config);
        CHECK(emit_config(back) == text);
    }
}

TEST_CASE("unit suffixes are normalised") {
    std::string a = kMinimal, b = kMinimal;
    b.replace(b.find("5 meV"), 5, "0.005eV");
    CHECK(parse_config_text(a).config == parse_config_text(b).config);
    std::string c = kMinimal;
    c.replace(c.find("1.6 eV"), 6, "1600 meV");
    CHECK(parse_config_text(c).config.jsa.params.central_s == 1.6);
    std::string t = std::string(kMinimal) + "[oracle]\nvbar = 3.18 eV\nT = 0.4 ps, 460 fs\n";
    const auto o = parse_config_text(t).config.oracle;
    REQUIRE(o);
    CHECK(o->T[0] == 400.0);
}

TEST_CASE("config errors are named") {
    std::string wrong = kMinimal;
    wrong.replace(wrong.find("5 meV"), 5, "5 fs");
    CHECK(code_of(wrong) == ErrorCode::Config);
    CHECK(message_of(wrong).find("expected") != std::string::npos);
    CHECK(message_of(wrong).find("eV") != std::string::npos);

    std::string bare = kMinimal;
    bare.replace(bare.find("5 meV"), 5, "0.005");
    CHECK(message_of(bare).find("missing unit") != std::string::npos);

    const std::string spectrum = std::string(kMinimal) + "[grids]\nvbar_step = 2 meV\n[run]\nactions = spectrum\n";
    CHECK(message_of(spectrum).find("[exciton]") != std::string::npos);

    CHECK(message_of("[squeeze]\nbeta = 1\n").find("[jsa]") != std::string::npos);
    CHECK(code_of(std::string(kMinimal) + "[run]\nactions = dance\n") == ErrorCode::Config);
    CHECK(code_of(std::string(kMinimal) + "[squeeze]\nbeta = 1\n") == ErrorCode::Config);
    CHECK(code_of(std::string(kMinimal) + "[seed]\nalpha_sq = 1\nalpha_sq = 2\n") == ErrorCode::Config);
    CHECK(code_of(std::string(kMinimal) + "[jsa2]\nx = 1\n") == ErrorCode::Config);

    RunConfig nr = parse_config_text(kMinimal).config;
    nr.nonresonant_background = true;
    try {
        nr.validate();
        FAIL("expected NotImplemented");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotImplemented);
        CHECK(exit_status(e.code()) == 2);
    }
    try {
        parse_config("/nonexistent/dir/x.cfg");
        FAIL("expected Io");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Io);
        CHECK(exit_status(e.code()) == 4);
    }
}

TEST_CASE("lenient mode downgrades unknown keys to warnings") {
    const std::string text = std::string(kMinimal) + "[seed]\nalpha_sq = 4\ncolour = blue\n[extras]\nx = 1\n";
    CHECK(code_of(text) == ErrorCode::Config);
    const ParseResult r = parse_config_text(text, ParseMode::Lenient);
    CHECK(r.warnings.size() == 2);
    CHECK(r.config.seed.alpha_sq == 4.0);
}

TEST_CASE("exit status mapping") {
    CHECK(exit_status(ErrorCode::Config) == 2);
    CHECK(exit_status(ErrorCode::UnitMismatch) == 2);
    CHECK(exit_status(ErrorCode::Numerical) == 3);
    CHECK(exit_status(ErrorCode::GridTooNarrow) == 3);
    CHECK(exit_status(ErrorCode::Io) == 4);
}

TEST_CASE("kernel cache") {
    const fs::path dir = scratch("cache");
    RunConfig c = parse_config(cfg_path("paper_fig2.cfg")).config;
    const JsaParams& p = c.jsa.params;
    const Grid1D g = default_arm_grid(p, 256, 6.0);
    const ComplexField2D h = pair_amplitude_h(schmidt_decompose(build_gaussian_jsa(p, g, g)), c.squeeze);
    const RotatedKernelM k = rotated_kernel(temporal_H(h, 2), extract_scales(h));
    const std::uint64_t key = kernel_key(c);

    cache_kernel(k, key, dir.string());
    const auto back = load_kernel(key, dir.string());
    REQUIRE(back);
    CHECK((back->m_field.values - k.m_field.values).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back->m_field.rows == k.m_field.rows);
    CHECK(back->m_field.cols == k.m_field.cols);
    CHECK(back->tau0 == k.tau0);
    CHECK(back->gamma0 == k.gamma0);

    RunConfig c2 = c;
    c2.squeeze.beta = 2.1;
    CHECK(kernel_key(c2) != key);
    CHECK_FALSE(load_kernel(kernel_key(c2), dir.string()));
    RunConfig c3 = c;
    c3.output.directory = "elsewhere";
    c3.threads = 3;
    CHECK(kernel_key(c3) == key);
    CHECK(config_hash(c3) == config_hash(c));

    const std::string path = kernel_cache_path(dir.string(), key);
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(200);
        f.put('\x5a');
    }
    CHECK_FALSE(load_kernel(key, dir.string()));
    fs::resize_file(path, 10);
    CHECK_FALSE(load_kernel(key, dir.string()));
    fs::remove_all(dir);
}

TEST_CASE("fluxes action on the fig1e config") {
    const fs::path out = scratch("fluxes");
    RunConfig c = parse_config(cfg_path("paper_fig1e.cfg")).config;
    c.output.directory = out.string();
    const RunManifest m = run(c);
    std::ifstream in(out / "fluxes.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "beta,N_s,N_i");
    int rows = 0;
    while (std::getline(in, line)) {
        double b = 0, ns = 0, ni = 0;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &b, &ns, &ni) == 3);
        CHECK(std::abs(ns - ni - 1e4) < 1e-6 * 1e4);
        ++rows;
    }
    CHECK(rows == 31);
    for (const char* key : {"xi", "squeezing_dB", "N_s", "N_i", "Z"}) {
        CAPTURE(key);
        REQUIRE(m.diagnostics.count(key));
        CHECK(std::isfinite(m.diagnostics.at(key)));
    }
    const auto j = nlohmann::json::parse(slurp(out / "manifest.json"));
    CHECK(j["status"] == 0);
    CHECK(j["config_hash"] == hex64(config_hash(c)));
    CHECK(fs::exists(out / "plot_fluxes.py"));
    fs::remove_all(out);
}

TEST_CASE("spectrum run is sized, cached and deterministic") {
    const fs::path out = scratch("spectrum");
    RunConfig c = small_spectrum(out);
    const RunManifest first = run(c);
    const std::string a = slurp(out / "spectrum.csv");
    int lines = 0;
    for (char ch : a) lines += ch == '\n';
    CHECK(lines == 1 + 21 * 3);
    CHECK(a.rfind("vbar_eV,T_fs,intensity\n", 0) == 0);
    for (const char* key : {"xi", "tau0_fs", "gamma0_meV", "tau0_gamma0", "squeezing_dB", "Z"}) {
        CAPTURE(key);
        REQUIRE(first.diagnostics.count(key));
        CHECK(std::isfinite(first.diagnostics.at(key)));
    }
    CHECK(fs::exists(out / "cache" / ("kernel_" + hex64(kernel_key(c)) + ".bin")));

    const RunManifest second = run(c);
    CHECK(slurp(out / "spectrum.csv") == a);
    bool hit = false;
    for (const auto& n : second.notes) hit = hit || n.find("loaded from cache") != std::string::npos;
    CHECK(hit);

    // corrupt the cached kernel; the run silently rebuilds it
    const fs::path kp = out / "cache" / ("kernel_" + hex64(kernel_key(c)) + ".bin");
    fs::resize_file(kp, 64);
    const RunManifest third = run(c);
    CHECK(slurp(out / "spectrum.csv") == a);
    for (const auto& n : third.notes) CHECK(n.find("loaded from cache") == std::string::npos);

    c.output.cache = false;
    c.threads = 1;
    run(c);
    CHECK(slurp(out / "spectrum.csv") == a);
    fs::remove_all(out);
}

TEST_CASE("module errors surface with the action name and a manifest") {
    const fs::path out = scratch("failing");
    RunConfig c = parse_config_text(kMinimal).config;
    c.jsa.expected_xi = 0.5;
    c.actions = {Action::Correlation};
    c.output.directory = out.string();
    try {
        run(c);
        FAIL("expected a numerical error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Numerical);
        CHECK(std::string(e.what()).find("correlation") != std::string::npos);
    }
    const auto j = nlohmann::json::parse(slurp(out / "manifest.json"));
    CHECK(j["status"] == 3);
    CHECK(j["error"].get<std::string>().find("correlation") != std::string::npos);

    RunConfig d = parse_config_text(kMinimal).config;
    d.actions = {Action::Spectrum};
    d.output.directory = out.string();
    try {
        run(d);
        FAIL("expected a config error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Config);
        CHECK(std::string(e.what()).find("[exciton]") != std::string::npos);
    }
    fs::remove_all(out);
}
