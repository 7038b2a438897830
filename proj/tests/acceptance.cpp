// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "sqzppf/config.hpp"
#include "sqzppf/pipeline.hpp"

using namespace sqzppf;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

class Report {
public:
    void add(bool ok, const std::string& what) {
        out_.pass = out_.pass && ok;
        if (!out_.detail.empty()) out_.detail += "; ";
        out_.detail += (ok ? "" : "!") + what;
    }
    void info(const std::string& what) { notes_.push_back(what); }
    Outcome outcome() const { return out_; }
    const std::vector<std::string>& notes() const { return notes_; }

private:
    Outcome out_;
    std::vector<std::string> notes_;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string cfg_path(const std::string& name) { return std::string(SQZPPF_CONFIG_DIR) + "/" + name; }

const JsaParams kFig2 = JsaParams::from_centers(1.6, 1.6, 0.005, 0.0827);

const SchmidtDecomposition& fig2_schmidt() {
    static const SchmidtDecomposition s = [] {
        const Grid1D g = default_arm_grid(kFig2);
        return schmidt_decompose(build_gaussian_jsa(kFig2, g, g), 1e-6);
    }();
    return s;
}

SqueezeSetting squeeze(double b) {
    SqueezeSetting s;
    s.beta = b;
    return s;
}

const RotatedKernelM& fig3_kernel() {
    static const RotatedKernelM k = [] {
        const ComplexField2D h = pair_amplitude_h(fig2_schmidt(), squeeze(2.0));
        return rotated_kernel(temporal_H(h, 4), extract_scales(h), 8.0);
    }();
    return k;
}

std::vector<std::size_t> local_maxima(const Eigen::VectorXd& y, double rel) {
    std::vector<std::size_t> out;
    const double top = y.maxCoeff();
    for (Eigen::Index k = 1; k + 1 < y.size(); ++k)
        if (y(k) > y(k - 1) && y(k) >= y(k + 1) && y(k) > rel * top) out.push_back(static_cast<std::size_t>(k));
    return out;
}

std::string list(const std::vector<std::size_t>& idx, const Grid1D& g) {
    std::string s = "[";
    for (std::size_t k = 0; k < idx.size(); ++k) s += (k ? " " : "") + fmt("%.3f", g[idx[k]]);
    return s + "]";
}

bool peak_near(const std::vector<std::size_t>& idx, const Grid1D& g, double x, double tol) {
    for (std::size_t k : idx)
        if (std::abs(g[k] - x) <= tol) return true;
    return false;
}

std::size_t at(const Grid1D& g, double x) { return static_cast<std::size_t>(std::lround(g.index_of(x))); }

struct QuantumMap {
    ExcitonModel model;
    Grid1D vbar;
    Grid1D T;
    SignalMap map;
};

const QuantumMap& fig3_map() {
    static const QuantumMap q = [] {
        const ExcitonModel m = ExcitonModel::build(ExcitonConfig{});
        const Grid1D v = Grid1D::from_range(3.10, 4.10, 0.001, Unit::ElectronVolt);
        const Grid1D T = Grid1D::from_range(0.0, 1200.0, 10.0, Unit::Femtosecond);
        SignalOptions o;
        o.omega_minus = kFig2.omega_minus;
        SeedSetting seed;
        seed.alpha_sq = 1e4;
        SignalMap s = ppf_signal(m, fig3_kernel(), {}, v, T, amplification(seed), o);
        return QuantumMap{m, v, T, std::move(s)};
    }();
    return q;
}

// 1
void schmidt_ratio(Report& r) {
    const SchmidtDecomposition& s = fig2_schmidt();
    r.add(std::abs(s.mode_ratio - 0.886) <= 0.005, "xi = " + fmt("%.5f", s.mode_ratio) + " (0.886 +- 0.005)");
    const SchmidtDecomposition a = analytic_gaussian_schmidt(kFig2, 10, s.grid_s, s.grid_i);
    double worst = 1.0, wdiff = 0.0;
    for (Eigen::Index k = 0; k < 10; ++k) {
        const double os = std::abs(s.s_modes.col(k).dot(a.s_modes.col(k))) * s.grid_s.step();
        const double oi = std::abs(s.i_modes.col(k).dot(a.i_modes.col(k))) * s.grid_i.step();
        worst = std::min({worst, os, oi});
        wdiff = std::max(wdiff, std::abs(s.weights[static_cast<std::size_t>(k)] - a.weights[static_cast<std::size_t>(k)]));
    }
    r.add(worst > 0.999, "min top-10 overlap = " + fmt("%.6f", worst) + " (> 0.999)");
    r.info("max top-10 weight difference " + fmt("%.2e", wdiff));
}

// 2
void time_energy(Report& r) {
    const auto product = [](const SchmidtDecomposition& s, double b) {
        const KernelScales k = extract_scales(pair_amplitude_h(s, squeeze(b)));
        return k.tau0 * k.gamma0;
    };
    const double weak = product(fig2_schmidt(), 1e-3);
    r.add(std::abs(weak - 0.0605) <= 0.001, "beta->0: " + fmt("%.5f", weak) + " (0.0605 +- 0.001)");
    const double strong = product(fig2_schmidt(), 2.0);
    r.add(std::abs(strong - 0.09) <= 0.3 * 0.09, "beta=2: " + fmt("%.4f", strong) + " (0.09 +- 30%)");
    bool mono = true;
    double last = weak;
    for (int n = 1; n <= 20; ++n) {
        const double p = product(fig2_schmidt(), 0.1 * n);
        mono = mono && p > last;
        last = p;
    }
    r.add(mono, std::string("increasing over beta in [0, 2]: ") + (mono ? "yes" : "no"));
    const JsaParams sym = JsaParams::from_centers(1.6, 1.6, 0.0827, 0.0827);
    const Grid1D g = default_arm_grid(sym, 256);
    const double one = product(schmidt_decompose(build_gaussian_jsa(sym, g, g)), 1.0);
    r.add(std::abs(one - 1.0) <= 1e-3, "symmetric: " + fmt("%.6f", one) + " (1 +- 1e-3)");
}

// 3
void fluxes(Report& r) {
    SeedSetting seed;
    seed.alpha_sq = 1e4;
    double worst = 0.0;
    bool inc = true;
    PhotonFluxes prev;
    for (int n = 0; n <= 30; ++n) {
        const PhotonFluxes f = photon_fluxes(gain_profile(fig2_schmidt(), squeeze(0.1 * n)), seed);
        worst = std::max(worst, std::abs(f.signal - f.idler - 1e4) / 1e4);
        if (n > 0) inc = inc && f.signal > prev.signal && f.idler > prev.idler;
        prev = f;
    }
    r.add(worst <= 1e-9, "max |N_s - N_i - 1e4|/1e4 = " + fmt("%.1e", worst) + " (<= 1e-9)");
    r.add(inc, std::string("N_s, N_i strictly increasing on [0, 3]: ") + (inc ? "yes" : "no"));
}

// 4
void enhancement(Report& r) {
    SeedSetting s0, s1;
    s1.alpha_sq = 1e4;
    const double ratio = amplification(s1) / amplification(s0);
    r.add(ratio == 100020001.0, "Z ratio = " + fmt("%.0f", ratio));
    const double mag = std::floor(std::log10(ratio));
    r.add(mag >= 6.0 && mag <= 8.0, "order of magnitude 1e" + fmt("%.0f", mag) + " (1e6 - 1e8)");

    const ExcitonModel m = ExcitonModel::build(ExcitonConfig{});
    const Grid1D v = Grid1D::from_range(3.10, 4.10, 0.005, Unit::ElectronVolt);
    const Grid1D T = Grid1D::from_range(0.0, 400.0, 100.0, Unit::Femtosecond);
    const SignalMap vac = ppf_signal(m, fig3_kernel(), {}, v, T, amplification(s0));
    const SignalMap seeded = ppf_signal(m, fig3_kernel(), {}, v, T, amplification(s1));
    double worst = 0.0;
    for (Eigen::Index k = 0; k < vac.intensities.size(); ++k)
        if (vac.intensities(k) > 0.0)
            worst = std::max(worst, std::abs(seeded.intensities(k) / vac.intensities(k) / ratio - 1.0));
    r.add(worst <= 4.0 * std::numeric_limits<double>::epsilon(),
          "pointwise signal ratio deviation " + fmt("%.1e", worst) + " (rounding only)");
}

// 5
void peaks(Report& r) {
    const QuantumMap& q = fig3_map();
    const double g0 = fig3_kernel().gamma0;
    const auto pq = local_maxima(q.map.intensities.col(0), 1e-3);
    bool all = true;
    for (double x : {3.180, 3.585, 3.989}) all = all && peak_near(pq, q.vbar, x, g0);
    r.add(all, "quantum T=0 maxima " + list(pq, q.vbar) + " contain 3.180/3.585/3.989 within gamma0 = " +
                   fmt("%.1f", g0 * 1e3) + " meV");

    const Grid1D T = Grid1D::from_range(0.0, 800.0, 350.0, Unit::Femtosecond);  // 0, 350, 700
    const SignalMap c = classical_baseline(q.model, BaselineParams{}, {}, q.vbar, T);
    const auto pc = local_maxima(c.intensities.col(0), 1e-3);
    r.add(pc.size() == 3, "laser T=0 maxima " + list(pc, q.vbar) + " (exactly 3)");
    bool near = pc.size() == 3 && peak_near(pc, q.vbar, 3.18, 0.02) && peak_near(pc, q.vbar, 3.59, 0.02) &&
                peak_near(pc, q.vbar, 3.98, 0.02);
    r.add(near, "laser maxima near 3.18/3.59/3.98 eV");
    bool merged = true;
    std::string counts;
    for (Eigen::Index t = 0; t < c.intensities.cols(); ++t) {
        const auto p = local_maxima(c.intensities.col(t), 1e-3);
        int inside = 0;
        for (std::size_t k : p) inside += q.vbar[k] >= 3.14 && q.vbar[k] <= 3.22;
        merged = merged && inside <= 1;
        counts += (t ? "/" : "") + std::to_string(inside);
    }
    r.add(merged, "laser maxima in [3.14, 3.22] eV at T=0/350/700 fs: " + counts + " (<= 1)");
    const auto p350 = local_maxima(q.map.intensities.col(static_cast<Eigen::Index>(at(q.T, 350.0))), 1e-3);
    const bool split = peak_near(p350, q.vbar, 3.180, g0) && peak_near(p350, q.vbar, 3.206, g0);
    r.add(split, std::string("quantum map at 350 fs resolves 3.180 and 3.206 eV: ") + (split ? "yes" : "no"));
}

// 6
void dynamics(Report& r) {
    const QuantumMap& q = fig3_map();
    const auto trace = [&](double v) { return Eigen::VectorXd(q.map.intensities.row(static_cast<Eigen::Index>(at(q.vbar, v))).transpose()); };
    const Eigen::VectorXd s = trace(3.206);
    bool mono = true;
    for (std::size_t t = 1; t <= at(q.T, 100.0); ++t) mono = mono && s(static_cast<Eigen::Index>(t)) >= s(static_cast<Eigen::Index>(t - 1));
    r.add(mono, std::string("3.206 eV non-decreasing on [0, 100] fs: ") + (mono ? "yes" : "no"));
    const double i800 = s(static_cast<Eigen::Index>(at(q.T, 800.0)));
    r.add(i800 >= 0.9 * s.maxCoeff(), "3.206 eV I(800 fs)/max = " + fmt("%.3f", i800 / s.maxCoeff()) + " (>= 0.9)");

    const double g0 = fig3_kernel().gamma0;
    const auto row350 = Eigen::VectorXd(q.map.intensities.col(static_cast<Eigen::Index>(at(q.T, 350.0))));
    const auto p = local_maxima(row350, 1e-3);
    double height = 0.0;
    for (std::size_t k : p)
        if (std::abs(q.vbar[k] - 3.154) <= g0) height = std::max(height, row350(static_cast<Eigen::Index>(k)) / row350.maxCoeff());
    r.add(height >= 0.05, "3.154 eV maximum at 350 fs, height " + fmt("%.3f", height) + " of row max (>= 0.05)");
    const auto row0 = Eigen::VectorXd(q.map.intensities.col(0));
    const double h0 = row0(static_cast<Eigen::Index>(at(q.vbar, 3.154))) / row0.maxCoeff();
    const bool absent = !peak_near(local_maxima(row0, 1e-3), q.vbar, 3.154, g0);
    r.add(absent, std::string("no 3.154 eV maximum at T=0: ") + (absent ? "yes" : "no"));
    r.info("3.154 eV level at T=0: " + fmt("%.1e", h0) + " of row max");
    const Eigen::VectorXd b = trace(4.010);
    bool mono_b = true;
    for (std::size_t t = 1; t <= at(q.T, 100.0); ++t) mono_b = mono_b && b(static_cast<Eigen::Index>(t)) >= b(static_cast<Eigen::Index>(t - 1));
    r.info(std::string("4.010 eV non-decreasing on [0, 100] fs: ") + (mono_b ? "yes" : "no") + ", I(800)/max = " +
           fmt("%.3f", b(static_cast<Eigen::Index>(at(q.T, 800.0))) / b.maxCoeff()));
}

// 7
void impulsive(Report& r) {
    const ExcitonModel m = ExcitonModel::build(ExcitonConfig{});
    const Grid1D T = Grid1D::from_range(0.0, 1000.0, 20.0, Unit::Femtosecond);
    const auto distances = [&](const Grid1D& v, double T_min) {
        const LineShape ls = LineShape::from_kernel(fig3_kernel());
        const SignalMap imp = ppf_impulsive(m, ls, {}, v, T, 1.0);
        const auto t0 = static_cast<Eigen::Index>(at(T, T_min));
        const Eigen::Index nT = static_cast<Eigen::Index>(T.count()) - t0;
        const Eigen::MatrixXd ref = imp.intensities.rightCols(nT);
        std::vector<double> d;
        for (double f : {1.0, 0.5, 0.25}) {
            const SignalMap s = ppf_signal(m, fig3_kernel().with_tau0_scaled(f), {}, v, T, 1.0);
            d.push_back(unit_peak_distance(s.intensities.rightCols(nT), ref));
        }
        return d;
    };
    const auto dA = distances(Grid1D::from_range(3.10, 3.30, 0.001, Unit::ElectronVolt), 20.0);
    const bool dec = dA[0] > dA[1] && dA[1] > dA[2];
    r.add(dec, "A window 3.10-3.30 eV, T >= 20 fs: distances " + fmt("%.4f", dA[0]) + " > " + fmt("%.4f", dA[1]) + " > " +
                   fmt("%.4f", dA[2]));
    r.add(dA[2] < 0.05, "final distance " + fmt("%.4f", dA[2]) + " (< 0.05)");
    const auto dF = distances(Grid1D::from_range(3.10, 4.10, 0.002, Unit::ElectronVolt), 0.0);
    r.info("full window 3.10-4.10 eV, all T: distances " + fmt("%.3f", dF[0]) + ", " + fmt("%.3f", dF[1]) + ", " +
           fmt("%.3f", dF[2]) + " (not a criterion)");
}

// 8
void oracle(Report& r) {
    RunConfig c = parse_config(cfg_path("toy_oracle.cfg")).config;
    const fs::path out = fs::temp_directory_path() / "sqzppf_acceptance_oracle";
    fs::remove_all(out);
    c.output.directory = out.string();
    const RunManifest m = run(c);
    const double dev = m.diagnostics.at("oracle_max_deviation");
    r.add(dev < 0.10, "max |normalised ratio - 1| over 3x3 probes = " + fmt("%.2e", dev) + " (< 0.10)");
    const double tau0 = fs_to_internal(m.diagnostics.at("tau0_fs"));
    const double expect = std::pow(2.0 * kPi, 4) * tau0 * tau0;
    r.info("raw pipeline/oracle = " + fmt("%.4e", m.diagnostics.at("oracle_raw_ratio")) + ", (2 pi)^4 tau0^2 = " + fmt("%.4e", expect));
    fs::remove_all(out);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// 9
void hygiene(Report& r) {
    const ComplexField2D h = pair_amplitude_h(fig2_schmidt(), squeeze(2.0));
    const ComplexField2D H = temporal_H(h, 4);
    const double lhs = H.values.squaredNorm() * H.rows.step() * H.cols.step();
    const double rhs = h.values.squaredNorm() * h.rows.step() * h.cols.step() / (4.0 * kPi * kPi);
    r.add(std::abs(lhs - rhs) / rhs < 1e-10, "Parseval h -> H rel err " + fmt("%.1e", std::abs(lhs - rhs) / rhs) + " (< 1e-10)");

    ExcitonConfig ec;
    ec.bright_width = ec.dark_width = 0.0;
    const ExcitonModel m = ExcitonModel::build(ec);
    double uerr = 0.0;
    for (double t : {10.0, 100.0, 1000.0}) {
        const ComplexMatrix U = propagate(m, t);
        uerr = std::max(uerr, (U.adjoint() * U - ComplexMatrix::Identity(U.rows(), U.cols())).cwiseAbs().maxCoeff());
    }
    uerr = std::max(uerr, (propagate(m, 0.0) - ComplexMatrix::Identity(8, 8)).cwiseAbs().maxCoeff());
    r.add(uerr < 1e-10, "unitarity |U^H U - I| = " + fmt("%.1e", uerr) + " (< 1e-10)");

    const Grid1D g = default_arm_grid(kFig2);
    const JointSpectralAmplitude j = build_gaussian_jsa(kFig2, g, g);
    const SchmidtDecomposition& s = fig2_schmidt();
    ComplexMatrix rec = s.s_modes * Eigen::Map<const Eigen::VectorXd>(s.weights.data(), static_cast<Eigen::Index>(s.size())).cast<Complex>().asDiagonal() *
                        s.i_modes.transpose();
    const double rerr = (rec - j.field.values).norm() / j.field.values.norm();
    r.add(rerr < 1e-5, "Schmidt reconstruction rel err " + fmt("%.1e", rerr) + " at tol 1e-6 (< 1e-5)");
    const auto n = static_cast<Eigen::Index>(s.size());
    const double oerr = std::max((s.s_modes.adjoint() * s.s_modes * g.step() - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff(),
                                 (s.i_modes.adjoint() * s.i_modes * g.step() - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff());
    r.add(oerr < 1e-8, "mode orthonormality err " + fmt("%.1e", oerr) + " (< 1e-8)");

    RunConfig c = parse_config(cfg_path("paper_fig3a.cfg")).config;
    c.grids->vbar_step = 0.005;
    c.grids->T_step = 50.0;
    c.actions = {Action::Correlation, Action::Fluxes, Action::Spectrum, Action::DumpModel};
    c.output.cache = false;
    const fs::path base = fs::temp_directory_path() / "sqzppf_acceptance_det";
    fs::remove_all(base);
    c.output.directory = (base / "a").string();
    run(c);
    c.output.directory = (base / "b").string();
    c.threads = 1;
    run(c);
    bool same = true;
    int files = 0;
    for (const auto& e : fs::directory_iterator(base / "a")) {
        if (e.path().filename() == "manifest.json") continue;
        same = same && slurp(e.path()) == slurp(base / "b" / e.path().filename());
        ++files;
    }
    r.add(same && files > 0, "byte-identical reruns over " + std::to_string(files) + " data files: " + (same ? "yes" : "no"));
    fs::remove_all(base);
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<void(Report&)> fn;
    };
    const std::vector<Criterion> all = {
        {1, "Schmidt ratio", schmidt_ratio},   {2, "time-energy product", time_energy},
        {3, "flux identity", fluxes},          {4, "enhancement", enhancement},
        {5, "peak positions", peaks},          {6, "dynamics", dynamics},
        {7, "impulsive convergence", impulsive}, {8, "loop-integral oracle", oracle},
        {9, "numerical hygiene", hygiene},
    };
    int failed = 0;
    for (const auto& c : all) {
        Report r;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.fn(r);
        } catch (const std::exception& e) {
            r.add(false, std::string("exception: ") + e.what());
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const Outcome o = r.outcome();
        failed += !o.pass;
        std::printf("[%s] %d %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, dt, o.detail.c_str());
        for (const auto& n : r.notes()) std::printf("       info: %s\n", n.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
    return failed ? 1 : 0;
}
