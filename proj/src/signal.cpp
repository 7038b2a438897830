#include "sqzppf/signal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "parallel.hpp"

namespace sqzppf {

namespace {

void check_vbar(const Grid1D& vbar) {
    if (vbar.unit() != Unit::ElectronVolt) throw Error(ErrorCode::UnitMismatch, "detection axis must be in eV");
}

void check_kernel(const RotatedKernelM& k) {
    if (k.m_field.rows.unit() != Unit::ElectronVolt || k.m_field.cols.unit() != Unit::Dimensionless)
        throw Error(ErrorCode::UnitMismatch, "kernel axes must be (eV, dimensionless gate time)");
    if (!(k.tau0 > 0.0) || !std::isfinite(k.tau0) || !std::isfinite(k.gamma0))
        throw Error(ErrorCode::InvalidArgument, "kernel scales are not finite and positive");
}

// Gated sweep shared by the quantum and classical maps. door holds A_f(t_n) on t_n = n dt, n in [0, N];
// rate_f multiplies (t - T) in the carrier phase.
Eigen::MatrixXd gated_sweep(const DoorwayTable& door, const std::vector<double>& rate, const RotatedKernelM& kernel,
                            const Grid1D& vbar, const Grid1D& T_internal, double gate_cut, int threads) {
    const Grid1D& tg = door.t_grid;
    const std::size_t nt = tg.count();
    const double dt = tg.step();
    const double tau0 = kernel.tau0;
    const Grid1D& wg = kernel.m_field.rows;
    const Grid1D& sg = kernel.m_field.cols;
    const ComplexMatrix& M = kernel.m_field.values;
    const std::size_t nf = door.transition_energies.size();
    const std::size_t ns = sg.count();

    // Carrier phase for t, split as exp(i k t) * exp(-i k T).
    ComplexMatrix D(static_cast<Eigen::Index>(nf), static_cast<Eigen::Index>(nt));
    std::vector<bool> active(nf, false);
    for (std::size_t f = 0; f < nf; ++f) {
        const auto row = static_cast<Eigen::Index>(f);
        active[f] = door.amplitudes.row(row).cwiseAbs().maxCoeff() > 0.0;
        if (!active[f]) continue;
        for (std::size_t n = 0; n < nt; ++n) {
            const double w = (n == 0 || n + 1 == nt) ? 0.5 * dt : dt;
            D(row, static_cast<Eigen::Index>(n)) =
                door.amplitudes(row, static_cast<Eigen::Index>(n)) * std::polar(w, rate[f] * tg[n]);
        }
    }

    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(vbar.count()),
                                              static_cast<Eigen::Index>(T_internal.count()));
    const double s_lo = sg.start(), s_hi = sg.back();

    detail::parallel_for(T_internal.count(), threads, [&](std::size_t jT) {
        const double T = T_internal[jT];
        double lo = T - 2.0 * tau0 * s_hi, hi = T - 2.0 * tau0 * s_lo;
        if (gate_cut > 0.0) {
            lo = std::max(lo, T - gate_cut * tau0);
            hi = std::min(hi, T + gate_cut * tau0);
        }
        const long n_lo = std::max(0L, static_cast<long>(std::ceil((lo - tg.start()) / dt)));
        const long n_hi = std::min(static_cast<long>(nt) - 1, static_cast<long>(std::floor((hi - tg.start()) / dt)));
        if (n_hi < n_lo) return;
        ComplexVector g(static_cast<Eigen::Index>(ns));
        for (std::size_t f = 0; f < nf; ++f) {
            if (!active[f]) continue;
            const auto row = static_cast<Eigen::Index>(f);
            g.setZero();
            for (long n = n_lo; n <= n_hi; ++n) {
                const double s = (T - tg[static_cast<std::size_t>(n)]) / (2.0 * tau0);
                double fj = sg.index_of(s);
                const double r = std::round(fj);
                if (std::abs(fj - r) < 1e-9) fj = r;
                if (!(fj >= 0.0 && fj <= static_cast<double>(ns - 1))) continue;
                const std::size_t j = std::min(static_cast<std::size_t>(fj), ns - 2);
                const double b = fj - static_cast<double>(j);
                const Complex d = D(row, n);
                g(static_cast<Eigen::Index>(j)) += (1.0 - b) * d;
                g(static_cast<Eigen::Index>(j + 1)) += b * d;
            }
            g *= std::polar(1.0, -rate[f] * T);
            const double wf = door.transition_energies[f];
            const double w_lo = wf - vbar.back(), w_hi = wf - vbar.start();
            const long i_lo = std::max(0L, static_cast<long>(std::floor(wg.index_of(w_lo))) - 1);
            const long i_hi = std::min(static_cast<long>(wg.count()) - 1, static_cast<long>(std::ceil(wg.index_of(w_hi))) + 1);
            if (i_hi < i_lo) continue;
            const ComplexVector q = M.middleRows(i_lo, i_hi - i_lo + 1) * g;
            for (std::size_t v = 0; v < vbar.count(); ++v) {
                double fi = wg.index_of(wf - vbar[v]);
                const double r = std::round(fi);
                if (std::abs(fi - r) < 1e-9) fi = r;
                if (!(fi >= 0.0 && fi <= static_cast<double>(wg.count() - 1))) continue;
                const long i = std::min(static_cast<long>(fi), static_cast<long>(wg.count()) - 2);
                const double a = fi - static_cast<double>(i);
                Complex k = 0.0;
                if (i >= i_lo && i <= i_hi) k += (1.0 - a) * q(i - i_lo);
                if (i + 1 >= i_lo && i + 1 <= i_hi) k += a * q(i + 1 - i_lo);
                S(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(jT)) += std::norm(k);
            }
        }
    });
    return S;
}

Grid1D sweep_time_grid(const ExcitonModel& model, double tau0, const Grid1D& T_internal, double t_max_opt) {
    const double t_need = T_internal.back() + 6.0 * tau0;
    double t_max = t_max_opt > 0.0 ? t_max_opt : T_internal.back() + 8.0 * tau0;
    if (t_max < t_need) {
        std::ostringstream os;
        os << "t_max = " << t_max << " /eV is below the bound max(T) + 6 tau0 = " << t_need << " /eV";
        throw Error(ErrorCode::InvalidArgument, os.str());
    }
    double wmax = 0.0;
    for (const auto& b : model.biexcitons()) wmax = std::max(wmax, std::abs(b.energy - model.ground_energy()));
    const double target = std::min(tau0, wmax > 0.0 ? 1.0 / wmax : tau0) / 8.0;
    const auto steps = static_cast<std::size_t>(std::ceil(t_max / target));
    return Grid1D(0.0, t_max / static_cast<double>(steps), steps + 1, Unit::InverseElectronVolt);
}

}  // namespace

void BaselineParams::validate() const {
    if (!(sigma_pump > 0.0) || !(sigma_probe > 0.0) || !(duration_pump > 0.0))
        throw Error(ErrorCode::InvalidArgument, "baseline widths and duration must be positive");
    if (omega_pump && !(*omega_pump > 0.0)) throw Error(ErrorCode::InvalidArgument, "omega_pump must be positive");
}

Grid1D to_internal_time(const Grid1D& axis) {
    if (axis.unit() == Unit::InverseElectronVolt) return axis;
    if (axis.unit() == Unit::Femtosecond)
        return Grid1D(fs_to_internal(axis.start()), fs_to_internal(axis.step()), axis.count(), Unit::InverseElectronVolt);
    throw Error(ErrorCode::UnitMismatch, std::string("delay axis must be in fs or 1/eV, got ") + unit_name(axis.unit()));
}

LineShape LineShape::from_kernel(const RotatedKernelM& kernel, Gate gate) {
    check_kernel(kernel);
    const auto& v = kernel.m_field.values;
    std::vector<Complex> table(static_cast<std::size_t>(v.rows()));
    if (gate == Gate::Integrated) {
        for (Eigen::Index r = 0; r < v.rows(); ++r) table[static_cast<std::size_t>(r)] = v.row(r).sum();
    } else {
        const double f = kernel.m_field.cols.index_of(0.0);
        const auto c = static_cast<Eigen::Index>(std::llround(f));
        if (std::abs(f - static_cast<double>(c)) > 1e-9 || c < 0 || c >= v.cols())
            throw Error(ErrorCode::InvalidArgument, "gate axis has no s = 0 node");
        for (Eigen::Index r = 0; r < v.rows(); ++r) table[static_cast<std::size_t>(r)] = v(r, c);
    }
    double peak = 0.0;
    for (const auto& z : table) peak = std::max(peak, std::abs(z));
    if (!(peak > 0.0)) throw Error(ErrorCode::EmptySignal, "kernel line shape is identically zero");
    const Grid1D grid = kernel.m_field.rows;
    double m0 = 0.0, m2 = 0.0;
    for (std::size_t n = 0; n < table.size(); ++n) {
        table[n] /= peak;
        m0 += std::norm(table[n]);
        m2 += std::norm(table[n]) * grid[n] * grid[n];
    }
    LineShape ls;
    ls.width = std::sqrt(m2 / m0);
    ls.profile = [grid, table](double w) { return linear_interp(grid, table, w); };
    return ls;
}

SignalMap ppf_signal(const ExcitonModel& model, const RotatedKernelM& kernel, Polarizations pols,
                     const Grid1D& vbar_axis, const Grid1D& T_axis, double Z, const SignalOptions& options) {
    check_vbar(vbar_axis);
    check_kernel(kernel);
    if (!(Z > 0.0) || !std::isfinite(Z)) throw Error(ErrorCode::InvalidArgument, "Z must be positive");
    if (model.ground_energy() != 0.0) throw Error(ErrorCode::InvalidArgument, "ground energy must be 0");
    const Grid1D Ti = to_internal_time(T_axis);
    if (!(Ti.start() >= 0.0)) throw Error(ErrorCode::InvalidArgument, "delays must be >= 0");
    const Grid1D tg = sweep_time_grid(model, kernel.tau0, Ti, options.t_max);
    const DoorwayTable door = doorway_amplitudes(model, pols.s, pols.i, tg, options.threads);
    std::vector<double> rate;
    for (double wf : door.transition_energies) rate.push_back(0.5 * (wf + model.ground_energy() + options.omega_minus));

    SignalMap out;
    out.vbar_axis = vbar_axis;
    out.T_axis = T_axis;
    out.intensities = gated_sweep(door, rate, kernel, vbar_axis, Ti, options.gate_cut, options.threads) * Z;
    out.z_factor = Z;
    return out;
}

SignalMap ppf_impulsive(const ExcitonModel& model, const LineShape& lineshape, Polarizations pols,
                        const Grid1D& vbar_axis, const Grid1D& T_axis, double Z, int threads) {
    check_vbar(vbar_axis);
    if (!lineshape.profile) throw Error(ErrorCode::InvalidArgument, "line shape has no profile");
    if (!(Z > 0.0) || !std::isfinite(Z)) throw Error(ErrorCode::InvalidArgument, "Z must be positive");
    const Grid1D Ti = to_internal_time(T_axis);
    const DoorwayTable door = doorway_amplitudes(model, pols.s, pols.i, Ti, threads);
    SignalMap out;
    out.vbar_axis = vbar_axis;
    out.T_axis = T_axis;
    out.z_factor = Z;
    out.intensities = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(vbar_axis.count()),
                                            static_cast<Eigen::Index>(T_axis.count()));
    for (std::size_t f = 0; f < door.transition_energies.size(); ++f) {
        Eigen::VectorXcd om(static_cast<Eigen::Index>(vbar_axis.count()));
        for (std::size_t v = 0; v < vbar_axis.count(); ++v)
            om(static_cast<Eigen::Index>(v)) =
                lineshape.profile(door.transition_energies[f] - model.ground_energy() - vbar_axis[v]);
        out.intensities += (om * door.amplitudes.row(static_cast<Eigen::Index>(f))).cwiseAbs2();
    }
    out.intensities *= Z;
    return out;
}

RotatedKernelM classical_kernel(const BaselineParams& base) {
    base.validate();
    const double sig = base.sigma_probe;
    const double d = fs_to_internal(base.duration_pump);
    const Grid1D wg = Grid1D::centered(1001, 20.0 * sig / 1000.0, Unit::ElectronVolt);
    const Grid1D sg = Grid1D::centered(601, 0.01, Unit::Dimensionless);
    ComplexMatrix m(static_cast<Eigen::Index>(wg.count()), static_cast<Eigen::Index>(sg.count()));
    for (std::size_t c = 0; c < sg.count(); ++c) {
        const double tau = 2.0 * d * sg[c];
        const double gate = std::exp(-tau * tau / (2.0 * d * d));
        for (std::size_t r = 0; r < wg.count(); ++r)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = std::exp(-wg[r] * wg[r] / (4.0 * sig * sig)) * gate;
    }
    return {ComplexField2D(wg, sg, std::move(m)), d, sig};
}

SignalMap classical_baseline(const ExcitonModel& model, const BaselineParams& base, Polarizations pols,
                             const Grid1D& vbar_axis, const Grid1D& T_axis, const SignalOptions& options) {
    check_vbar(vbar_axis);
    const RotatedKernelM kernel = classical_kernel(base);
    const Grid1D Ti = to_internal_time(T_axis);
    if (!(Ti.start() >= 0.0)) throw Error(ErrorCode::InvalidArgument, "delays must be >= 0");
    const Grid1D tg = sweep_time_grid(model, kernel.tau0, Ti, options.t_max);

    ComplexVector initial = dipole_raise(model, pols.s).ground_to_single;
    if (base.omega_pump) {
        for (std::size_t k = 0; k < model.levels().size(); ++k) {
            const auto& l = model.levels()[k];
            const double eb = l.species == Species::A ? model.config().bright_energy_A : model.config().bright_energy_B;
            const double x = eb - *base.omega_pump;
            initial(static_cast<Eigen::Index>(k)) *= std::exp(-x * x / (2.0 * base.sigma_pump * base.sigma_pump));
        }
    }
    const DoorwayTable door = doorway_amplitudes(model, initial, pols.i, tg, Frame::Interaction, options.threads);
    const std::vector<double> rate(door.transition_energies.size(), 0.0);

    SignalMap out;
    out.vbar_axis = vbar_axis;
    out.T_axis = T_axis;
    out.z_factor = 1.0;
    out.intensities = gated_sweep(door, rate, kernel, vbar_axis, Ti, options.gate_cut, options.threads);
    return out;
}

double direct_loop_oracle(const ExcitonModel& model, const ComplexField2D& h, double vbar, double T,
                          const OracleSetup& setup) {
    if (model.levels().size() > 2 || model.biexcitons().size() > 1)
        throw Error(ErrorCode::InvalidArgument, "loop oracle accepts at most 2 single-exciton and 1 biexciton levels");
    if (model.biexcitons().empty()) throw Error(ErrorCode::InvalidArgument, "biexciton manifold is empty");
    const int Q = setup.quad_points;
    if (Q < 8 || Q > 48) throw Error(ErrorCode::InvalidArgument, "quad_points must lie in [8, 48]");
    if (h.rows.unit() != Unit::ElectronVolt || h.cols.unit() != Unit::ElectronVolt)
        throw Error(ErrorCode::UnitMismatch, "h must be sampled on eV grids");

    double L = setup.window;
    if (!(L > 0.0)) {
        const Eigen::MatrixXd w = h.values.cwiseAbs2();
        const double tot = w.sum();
        if (!(tot > 0.0)) return 0.0;
        double mx = 0.0, my = 0.0, vx = 0.0, vy = 0.0;
        for (Eigen::Index c = 0; c < w.cols(); ++c)
            for (Eigen::Index r = 0; r < w.rows(); ++r) {
                mx += w(r, c) * h.rows[static_cast<std::size_t>(r)];
                my += w(r, c) * h.cols[static_cast<std::size_t>(c)];
            }
        mx /= tot;
        my /= tot;
        for (Eigen::Index c = 0; c < w.cols(); ++c)
            for (Eigen::Index r = 0; r < w.rows(); ++r) {
                const double x = h.rows[static_cast<std::size_t>(r)] - mx, y = h.cols[static_cast<std::size_t>(c)] - my;
                vx += w(r, c) * x * x;
                vy += w(r, c) * y * y;
            }
        const double smin = std::sqrt(std::min(vx, vy) / tot);
        L = 6.0 / (2.0 * smin);
    }
    const double step = 2.0 * L / (Q - 1);
    std::vector<double> tau(static_cast<std::size_t>(Q));
    for (int k = 0; k < Q; ++k) tau[static_cast<std::size_t>(k)] = -L + k * step;

    // H_full(a_k, b_l) by direct sums, carriers included.
    auto dft = [&](const Grid1D& g, double carrier) {
        ComplexMatrix E(Q, static_cast<Eigen::Index>(g.count()));
        for (int k = 0; k < Q; ++k)
            for (std::size_t n = 0; n < g.count(); ++n)
                E(k, static_cast<Eigen::Index>(n)) = std::polar(1.0, -(g[n] + carrier) * tau[static_cast<std::size_t>(k)]);
        return E;
    };
    const ComplexMatrix Es = dft(h.rows, setup.central_s);
    const ComplexMatrix Ei = dft(h.cols, setup.central_i);
    const double pref = h.rows.step() * h.cols.step() / (4.0 * kPi * kPi);
    const ComplexMatrix Hf = pref * (Es * h.values * Ei.transpose());  // Hf(k, l) = H_full(tau_k, tau_l)

    // R(k3, k2) = <f|V+_i U(tau3 - tau2) V+_s|g> with tau3 = T + tau_k3, tau2 = tau_k2.
    const Propagator prop(model);
    const ComplexVector gs = dipole_raise(model, setup.pols.s).ground_to_single;
    const ComplexMatrix Pi = dipole_raise(model, setup.pols.i).single_to_biexciton;
    const double Ef = model.biexcitons()[0].energy - model.ground_energy();
    ComplexMatrix R = ComplexMatrix::Zero(Q, Q);
    for (int k3 = 0; k3 < Q; ++k3)
        for (int k2 = 0; k2 < Q; ++k2) {
            const double dtau = T + tau[static_cast<std::size_t>(k3)] - tau[static_cast<std::size_t>(k2)];
            if (dtau < 0.0) continue;
            R(k3, k2) = (Pi * prop.apply(dtau, gs))(0);
        }

    const double v = vbar - (setup.central_s + setup.central_i);
    Complex total = 0.0;
    for (int k1 = 0; k1 < Q; ++k1) {
        const double t1 = tau[static_cast<std::size_t>(k1)];
        for (int k4 = 0; k4 < Q; ++k4) {
            const double t4 = T + tau[static_cast<std::size_t>(k4)];
            const Complex bra = std::conj(R(k4, k1));
            if (bra == Complex(0.0)) continue;
            const Complex cbra = std::conj(Hf(k1, k4));
            for (int k2 = 0; k2 < Q; ++k2) {
                const double t2 = tau[static_cast<std::size_t>(k2)];
                for (int k3 = 0; k3 < Q; ++k3) {
                    const Complex ket = R(k3, k2);
                    if (ket == Complex(0.0)) continue;
                    const double t3 = T + tau[static_cast<std::size_t>(k3)];
                    const Complex chi = bra * std::polar(1.0, -Ef * (t4 - t3)) * ket;
                    const Complex phase = std::polar(1.0, -0.5 * v * ((t2 + t3) - (t1 + t4)));
                    total += phase * chi * Hf(k2, k3) * cbra;
                }
            }
        }
    }
    const double w4 = step * step * step * step;
    return setup.Z * total.real() * w4;
}

SignalMap normalize_map(const SignalMap& map, Normalization mode) {
    if (!map.intensities.allFinite()) throw Error(ErrorCode::Numerical, "signal map has non-finite entries");
    SignalMap out = map;
    if (mode == Normalization::Raw) return out;
    const double peak = map.intensities.size() ? map.intensities.maxCoeff() : 0.0;
    if (!(peak > 0.0)) throw Error(ErrorCode::EmptySignal, "unit-peak normalisation of an all-zero map");
    out.intensities /= peak;
    out.normalization = Normalization::UnitPeak;
    return out;
}

double unit_peak_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error(ErrorCode::InvalidArgument, "map shapes differ");
    const double pa = a.maxCoeff(), pb = b.maxCoeff();
    if (!(pa > 0.0) || !(pb > 0.0)) throw Error(ErrorCode::EmptySignal, "cannot compare all-zero maps");
    return (a / pa - b / pb).norm() / (b / pb).norm();
}

}  // namespace sqzppf
