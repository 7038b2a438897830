#include "sqzppf/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "sqzppf/kernel_cache.hpp"

namespace sqzppf {

namespace fs = std::filesystem;

const char* tool_version() { return "1.0.0"; }

std::string RunManifest::to_json() const {
    nlohmann::json j;
    j["tool"] = "sqzppf";
    j["tool_version"] = tool_version;
    j["config_hash"] = config_hash;
    j["status"] = status;
    if (!error.empty()) j["error"] = error;
    nlohmann::json acts = nlohmann::json::array();
    for (const auto& a : actions) acts.push_back({{"name", a.name}, {"wall_clock_s", a.wall_clock_s}, {"files", a.files}});
    j["actions"] = acts;
    nlohmann::json d = nlohmann::json::object();
    for (const auto& [k, v] : diagnostics) d[k] = v;
    j["diagnostics"] = d;
    j["notes"] = notes;
    return j.dump(2);
}

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

class Writer {
public:
    explicit Writer(std::string dir) : dir_(std::move(dir)) {}

    std::string path(const std::string& name) const { return (fs::path(dir_) / name).string(); }

    void write(const std::string& name, const std::string& body, ActionRecord& rec) const {
        std::ofstream f(path(name), std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorCode::Io, "cannot write " + path(name));
        f << body;
        if (!f) throw Error(ErrorCode::Io, "write failed for " + path(name));
        rec.files.push_back(name);
    }

private:
    std::string dir_;
};

std::string map_plot_script(const std::string& csv, const std::string& xlabel, const std::string& ylabel,
                            const std::string& title) {
    std::ostringstream o;
    o << "import numpy as np\nimport matplotlib\nmatplotlib.use('Agg')\nimport matplotlib.pyplot as plt\n\n"
      << "d = np.loadtxt('" << csv << "', delimiter=',', skiprows=1)\n"
      << "x = np.unique(d[:, 0]); y = np.unique(d[:, 1])\n"
      << "z = d[:, 2].reshape(len(x), len(y))\n"
      << "fig, ax = plt.subplots(figsize=(6, 4.5))\n"
      << "m = ax.pcolormesh(x, y, z.T, shading='auto')\n"
      << "fig.colorbar(m, ax=ax)\n"
      << "ax.set_xlabel('" << xlabel << "'); ax.set_ylabel('" << ylabel << "'); ax.set_title('" << title << "')\n"
      << "fig.tight_layout()\nfig.savefig('" << csv.substr(0, csv.size() - 4) << ".png', dpi=150)\n";
    return o.str();
}

std::string lines_plot_script(const std::string& csv, const std::string& xlabel, const std::string& ylabel) {
    std::ostringstream o;
    o << "import numpy as np\nimport matplotlib\nmatplotlib.use('Agg')\nimport matplotlib.pyplot as plt\n\n"
      << "with open('" << csv << "') as f:\n    names = f.readline().strip().split(',')\n"
      << "d = np.loadtxt('" << csv << "', delimiter=',', skiprows=1, ndmin=2)\n"
      << "fig, ax = plt.subplots(figsize=(6, 4.5))\n"
      << "for k in range(1, d.shape[1]):\n    ax.plot(d[:, 0], d[:, k], label=names[k])\n"
      << "ax.set_xlabel('" << xlabel << "'); ax.set_ylabel('" << ylabel << "'); ax.legend()\n"
      << "fig.tight_layout()\nfig.savefig('" << csv.substr(0, csv.size() - 4) << ".png', dpi=150)\n";
    return o.str();
}

std::string map_csv(const SignalMap& m) {
    std::string s = "vbar_eV,T_fs,intensity\n";
    const Grid1D Ti = to_internal_time(m.T_axis);
    for (std::size_t v = 0; v < m.vbar_axis.count(); ++v)
        for (std::size_t t = 0; t < m.T_axis.count(); ++t) {
            s += num(m.vbar_axis[v]) + "," + num(internal_to_fs(Ti[t])) + "," +
                 num(m.intensities(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(t))) + "\n";
        }
    return s;
}

std::string beta_tag(double b) {
    std::string s = num(b);
    std::replace(s.begin(), s.end(), '.', 'p');
    return s;
}

class Session {
public:
    Session(const RunConfig& c, RunManifest& man) : cfg_(c), man_(man) {}

    const JointSpectralAmplitude& jsa() {
        if (!jsa_) {
            const Grid1D g = default_arm_grid(cfg_.jsa.params, cfg_.jsa.grid_points, cfg_.jsa.span_sigmas);
            jsa_ = build_gaussian_jsa(cfg_.jsa.params, g, g);
        }
        return *jsa_;
    }

    const SchmidtDecomposition& schmidt() {
        if (!schmidt_) {
            schmidt_ = schmidt_decompose(jsa(), cfg_.jsa.schmidt_tol);
            man_.diagnostics["xi"] = schmidt_->mode_ratio;
            man_.diagnostics["schmidt_modes"] = static_cast<double>(schmidt_->size());
            man_.diagnostics["squeezing_dB"] = squeezing_db(*schmidt_, cfg_.squeeze);
            if (cfg_.jsa.expected_xi && std::abs(schmidt_->mode_ratio - *cfg_.jsa.expected_xi) > 0.005) {
                std::ostringstream os;
                os << "Schmidt ratio " << schmidt_->mode_ratio << " differs from expect_xi = " << *cfg_.jsa.expected_xi
                   << " by more than 0.005";
                throw Error(ErrorCode::Numerical, os.str());
            }
        }
        return *schmidt_;
    }

    const ComplexField2D& h() {
        if (!h_) h_ = pair_amplitude_h(schmidt(), cfg_.squeeze);
        return *h_;
    }

    void record_scales(const KernelScales& s) {
        man_.diagnostics["tau0_fs"] = internal_to_fs(s.tau0);
        man_.diagnostics["gamma0_meV"] = s.gamma0 * 1e3;
        man_.diagnostics["tau0_gamma0"] = s.tau0 * s.gamma0;
    }

    const RotatedKernelM& kernel() {
        if (kernel_) return *kernel_;
        const std::uint64_t key = kernel_key(cfg_);
        const std::string dir = cfg_.output.cache_directory.empty()
                                    ? (fs::path(cfg_.output.directory) / "cache").string()
                                    : cfg_.output.cache_directory;
        if (cfg_.output.cache) {
            if (auto k = load_kernel(key, dir)) {
                kernel_ = std::move(*k);
                man_.notes.push_back("kernel loaded from cache " + kernel_cache_path(dir, key));
                record_scales({kernel_->tau0, kernel_->gamma0});
                return *kernel_;
            }
        }
        const KernelScales s = extract_scales(h());
        record_scales(s);
        const ComplexField2D H = temporal_H(h(), cfg_.kernel.pad_factor);
        kernel_ = rotated_kernel(H, s, cfg_.kernel.gate_extent);
        if (cfg_.output.cache) {
            cache_kernel(*kernel_, key, dir);
            man_.notes.push_back("kernel cached at " + kernel_cache_path(dir, key));
        }
        return *kernel_;
    }

    const ExcitonModel& model() {
        if (!model_) model_ = ExcitonModel::build(*cfg_.exciton);
        return *model_;
    }

private:
    const RunConfig& cfg_;
    RunManifest& man_;
    std::optional<JointSpectralAmplitude> jsa_;
    std::optional<SchmidtDecomposition> schmidt_;
    std::optional<ComplexField2D> h_;
    std::optional<RotatedKernelM> kernel_;
    std::optional<ExcitonModel> model_;
};

SignalMap finish(const SignalMap& m, const RunConfig& c) { return normalize_map(m, c.output.normalization); }

void do_correlation(Session& s, const RunConfig& c, const Writer& w, RunManifest& man, ActionRecord& rec) {
    std::vector<double> betas = c.correlation_betas;
    const bool tagged = !betas.empty();
    if (!tagged) betas.push_back(c.squeeze.beta);
    for (double b : betas) {
        SqueezeSetting sq = c.squeeze;
        sq.beta = b;
        const ComplexField2D h = b == c.squeeze.beta ? s.h() : pair_amplitude_h(s.schmidt(), sq);
        const std::string suffix = tagged ? "_beta" + beta_tag(b) : "";
        std::string body = "w1_eV,w2_eV,abs_h\n";
        for (std::size_t r = 0; r < h.rows.count(); ++r)
            for (std::size_t k = 0; k < h.cols.count(); ++k)
                body += num(h.rows[r] + c.jsa.params.central_s) + "," + num(h.cols[k] + c.jsa.params.central_i) + "," +
                        num(std::abs(h.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)))) + "\n";
        const std::string name = "correlation_h" + suffix + ".csv";
        if (c.output.csv) w.write(name, body, rec);
        if (c.output.plots) w.write("plot_correlation_h" + suffix + ".py", map_plot_script(name, "w1 (eV)", "w2 (eV)", "|h|"), rec);

        if (b > 0.0) {
            const KernelScales sc = extract_scales(h);
            if (b == c.squeeze.beta) s.record_scales(sc);
            man.diagnostics["tau0_gamma0" + suffix] = sc.tau0 * sc.gamma0;
            man.diagnostics["participation_h" + suffix] = participation_number(h);
            const ComplexField2D H = temporal_H(h, c.kernel.pad_factor);
            const std::size_t n = H.rows.count(), half = std::min<std::size_t>(256, n / 2), c0 = n / 2;
            std::string tb = "t1_fs,t2_fs,abs_H\n";
            for (std::size_t r = c0 - half; r < c0 + half; r += 2)
                for (std::size_t k = c0 - half; k < c0 + half; k += 2)
                    tb += num(internal_to_fs(H.rows[r])) + "," + num(internal_to_fs(H.cols[k])) + "," +
                          num(std::abs(H.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)))) + "\n";
            const std::string tname = "correlation_H" + suffix + ".csv";
            if (c.output.csv) w.write(tname, tb, rec);
            if (c.output.plots)
                w.write("plot_correlation_H" + suffix + ".py", map_plot_script(tname, "t1 (fs)", "t2 (fs)", "|H|"), rec);
        }
    }
}

void do_fluxes(Session& s, const RunConfig& c, const Writer& w, RunManifest& man, ActionRecord& rec) {
    const GridSpec g = c.grids.value_or(GridSpec{});
    std::string body = "beta,N_s,N_i\n";
    for (double b : g.betas()) {
        SqueezeSetting sq = c.squeeze;
        sq.beta = b;
        const PhotonFluxes f = photon_fluxes(gain_profile(s.schmidt(), sq), c.seed);
        body += num(b) + "," + num(f.signal) + "," + num(f.idler) + "\n";
    }
    const PhotonFluxes f = photon_fluxes(gain_profile(s.schmidt(), c.squeeze), c.seed);
    man.diagnostics["N_s"] = f.signal;
    man.diagnostics["N_i"] = f.idler;
    if (c.output.csv) w.write("fluxes.csv", body, rec);
    if (c.output.plots) w.write("plot_fluxes.py", lines_plot_script("fluxes.csv", "beta", "photon flux"), rec);
}

void write_map(const SignalMap& m, const std::string& stem, const std::string& title, const RunConfig& c,
               const Writer& w, ActionRecord& rec) {
    if (c.output.csv) w.write(stem + ".csv", map_csv(m), rec);
    if (c.output.plots) w.write("plot_" + stem + ".py", map_plot_script(stem + ".csv", "vbar (eV)", "T (fs)", title), rec);
}

SignalOptions signal_options(const RunConfig& c) {
    SignalOptions o;
    o.omega_minus = c.jsa.params.omega_minus;
    o.threads = c.threads;
    return o;
}

void do_spectrum(Session& s, const RunConfig& c, const Writer& w, RunManifest& man, ActionRecord& rec) {
    const double Z = amplification(c.seed);
    const SignalMap m = ppf_signal(s.model(), s.kernel(), c.pols, c.grids->vbar_axis(), c.grids->T_axis(), Z, signal_options(c));
    man.diagnostics["spectrum_peak"] = m.intensities.maxCoeff();
    write_map(finish(m, c), "spectrum", "PPF signal", c, w, rec);
}

void do_impulsive(Session& s, const RunConfig& c, const Writer& w, RunManifest& man, ActionRecord& rec) {
    const double Z = amplification(c.seed);
    const Grid1D vb = c.grids->vbar_axis();
    const Grid1D T = c.grids->T_axis();
    const LineShape ls = LineShape::from_kernel(s.kernel(), c.impulsive.gate);
    const SignalMap imp = ppf_impulsive(s.model(), ls, c.pols, vb, T, Z, c.threads);
    man.diagnostics["lineshape_width_meV"] = ls.width * 1e3;
    write_map(finish(imp, c), "impulsive", "impulsive limit", c, w, rec);
    if (c.impulsive.tau0_scales.empty()) return;

    // Sub-block used for the convergence distance.
    std::size_t v0 = 0, v1 = vb.count();
    if (c.impulsive.window_stop > c.impulsive.window_start) {
        v0 = static_cast<std::size_t>(std::max(0.0, std::ceil(vb.index_of(c.impulsive.window_start) - 1e-9)));
        v1 = std::min(vb.count(), static_cast<std::size_t>(std::floor(vb.index_of(c.impulsive.window_stop) + 1e-9)) + 1);
    }
    const auto t0 = static_cast<std::size_t>(std::max(0.0, std::ceil(T.index_of(c.impulsive.T_min) - 1e-9)));
    if (v1 <= v0 || t0 >= T.count()) throw Error(ErrorCode::Config, "[impulsive] window selects no samples");
    const auto block = [&](const Eigen::MatrixXd& m) {
        return Eigen::MatrixXd(m.block(static_cast<Eigen::Index>(v0), static_cast<Eigen::Index>(t0),
                                       static_cast<Eigen::Index>(v1 - v0), static_cast<Eigen::Index>(T.count() - t0)));
    };
    const Eigen::MatrixXd ref = block(imp.intensities);
    std::string body = "tau0_scale,tau0_fs,distance\n";
    for (double f : c.impulsive.tau0_scales) {
        const RotatedKernelM k = s.kernel().with_tau0_scaled(f);
        const SignalMap m = ppf_signal(s.model(), k, c.pols, vb, T, Z, signal_options(c));
        const double d = unit_peak_distance(block(m.intensities), ref);
        body += num(f) + "," + num(internal_to_fs(k.tau0)) + "," + num(d) + "\n";
        man.diagnostics["impulsive_distance_scale" + beta_tag(f)] = d;
    }
    if (c.output.csv) w.write("impulsive_convergence.csv", body, rec);
    if (c.output.plots)
        w.write("plot_impulsive_convergence.py", lines_plot_script("impulsive_convergence.csv", "tau0 scale", "value"), rec);
}

void do_baseline(Session& s, const RunConfig& c, const Writer& w, RunManifest& man, ActionRecord& rec) {
    const SignalMap m = classical_baseline(s.model(), *c.baseline, c.pols, c.grids->vbar_axis(), c.grids->T_axis(), signal_options(c));
    man.diagnostics["baseline_peak"] = m.intensities.maxCoeff();
    write_map(finish(m, c), "baseline", "laser baseline", c, w, rec);
}

void do_oracle(Session& s, const RunConfig& c, const Writer& w, RunManifest& man, ActionRecord& rec) {
    const OracleConfig& o = *c.oracle;
    const Grid1D vb = o.vbar.size() >= 2 ? Grid1D::from_points(o.vbar, Unit::ElectronVolt)
                                         : Grid1D(o.vbar[0], 1e-3, 2, Unit::ElectronVolt);
    const Grid1D T = o.T.size() >= 2 ? Grid1D::from_points(o.T, Unit::Femtosecond) : Grid1D(o.T[0], 1.0, 2, Unit::Femtosecond);
    const double Z = amplification(c.seed);
    const SignalMap pipe = ppf_signal(s.model(), s.kernel(), c.pols, vb, T, Z, signal_options(c));
    OracleSetup setup;
    setup.pols = c.pols;
    setup.central_s = c.jsa.params.central_s;
    setup.central_i = c.jsa.params.central_i;
    setup.Z = Z;
    setup.quad_points = o.quad_points;
    setup.window = fs_to_internal(o.window);

    const std::size_t nv = std::min(vb.count(), o.vbar.size()), nT = std::min(T.count(), o.T.size());
    std::vector<double> orc(nv * nT), pip(nv * nT);
    for (std::size_t a = 0; a < nv; ++a)
        for (std::size_t b = 0; b < nT; ++b) {
            orc[a * nT + b] = direct_loop_oracle(s.model(), s.h(), vb[a], fs_to_internal(T[b]), setup);
            pip[a * nT + b] = pipe.intensities(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        }
    if (!(orc[0] > 0.0) || !(pip[0] > 0.0)) throw Error(ErrorCode::EmptySignal, "oracle reference point is zero");
    std::string body = "vbar_eV,T_fs,oracle,pipeline,ratio\n";
    double worst = 0.0;
    for (std::size_t a = 0; a < nv; ++a)
        for (std::size_t b = 0; b < nT; ++b) {
            const std::size_t k = a * nT + b;
            const double ratio = (orc[k] / orc[0]) / (pip[k] / pip[0]);
            worst = std::max(worst, std::abs(ratio - 1.0));
            body += num(vb[a]) + "," + num(T[b]) + "," + num(orc[k]) + "," + num(pip[k]) + "," + num(ratio) + "\n";
        }
    man.diagnostics["oracle_max_deviation"] = worst;
    man.diagnostics["oracle_raw_ratio"] = pip[0] / orc[0];
    if (c.output.csv) w.write("oracle.csv", body, rec);
}

void do_dump(Session& s, const RunConfig&, const Writer& w, RunManifest&, ActionRecord& rec) {
    w.write("model.json", dump_model(s.model()) + "\n", rec);
}

}  // namespace

RunManifest run(const RunConfig& config) {
    RunManifest man;
    man.tool_version = tool_version();
    man.config_hash = hex64(config_hash(config));

    std::vector<Action> actions = config.actions;
    std::sort(actions.begin(), actions.end());
    actions.erase(std::unique(actions.begin(), actions.end()), actions.end());

    std::error_code ec;
    fs::create_directories(config.output.directory, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create output directory " + config.output.directory + ": " + ec.message());
    const Writer w(config.output.directory);

    std::optional<Error> failure;
    try {
        config.validate();
        if (actions.empty()) throw Error(ErrorCode::Config, "no actions requested");
        man.diagnostics["Z"] = amplification(config.seed);
        Session s(config, man);
        for (Action a : actions) {
            ActionRecord rec;
            rec.name = action_name(a);
            const auto start = std::chrono::steady_clock::now();
            try {
                switch (a) {
                    case Action::Correlation: do_correlation(s, config, w, man, rec); break;
                    case Action::Fluxes: do_fluxes(s, config, w, man, rec); break;
                    case Action::Spectrum: do_spectrum(s, config, w, man, rec); break;
                    case Action::Impulsive: do_impulsive(s, config, w, man, rec); break;
                    case Action::Baseline: do_baseline(s, config, w, man, rec); break;
                    case Action::Oracle: do_oracle(s, config, w, man, rec); break;
                    case Action::DumpModel: do_dump(s, config, w, man, rec); break;
                }
            } catch (const Error& e) {
                rec.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                man.actions.push_back(rec);
                throw Error(e.code(), "action '" + rec.name + "': " + e.what());
            }
            rec.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            man.actions.push_back(rec);
        }
    } catch (const Error& e) {
        failure = e;
        man.error = e.what();
        man.status = exit_status(e.code());
    }

    {
        std::ofstream f(w.path("manifest.json"), std::ios::trunc);
        if (!f) throw Error(ErrorCode::Io, "cannot write manifest");
        f << man.to_json() << "\n";
    }
    if (failure) throw *failure;
    return man;
}

}  // namespace sqzppf
