#include "sqzppf/squeezed_field.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace sqzppf {

void SqueezeSetting::validate() const {
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw Error(ErrorCode::InvalidArgument, "beta must be >= 0");
    if (!(theta >= 0.0 && theta < 2.0 * kPi)) throw Error(ErrorCode::InvalidArgument, "theta must lie in [0, 2pi)");
}

void SeedSetting::validate() const {
    if (!(alpha_sq >= 0.0) || !std::isfinite(alpha_sq))
        throw Error(ErrorCode::InvalidArgument, "alpha_sq must be >= 0");
    if (per_mode) {
        double sum = 0.0;
        for (double a : *per_mode) {
            if (!(a >= 0.0)) throw Error(ErrorCode::InvalidArgument, "per-mode seed entries must be >= 0");
            sum += a;
        }
        if (std::abs(sum - alpha_sq) > 1e-9 * std::max(1.0, alpha_sq))
            throw Error(ErrorCode::InvalidArgument, "per-mode seed does not sum to alpha_sq");
    }
}

std::vector<double> SeedSetting::split(std::size_t modes) const {
    validate();
    if (per_mode) {
        if (per_mode->size() != modes) {
            std::ostringstream os;
            os << "per-mode seed has " << per_mode->size() << " entries for " << modes << " modes";
            throw Error(ErrorCode::InvalidArgument, os.str());
        }
        return *per_mode;
    }
    if (modes == 0) return {};
    return std::vector<double>(modes, alpha_sq / static_cast<double>(modes));
}

RotatedKernelM RotatedKernelM::with_tau0_scaled(double factor) const {
    if (!(factor > 0.0)) throw Error(ErrorCode::InvalidArgument, "tau0 scale factor must be positive");
    RotatedKernelM k = *this;
    k.tau0 *= factor;
    return k;
}

GainProfile gain_profile(const SchmidtDecomposition& schmidt, const SqueezeSetting& sq) {
    sq.validate();
    GainProfile g;
    g.gains.reserve(schmidt.size());
    for (double r : schmidt.weights) {
        const double c = std::cosh(sq.beta * r);
        g.gains.push_back(c * c);
    }
    return g;
}

ComplexField2D pair_amplitude_h(const SchmidtDecomposition& schmidt, const SqueezeSetting& sq) {
    sq.validate();
    const auto k = static_cast<Eigen::Index>(schmidt.size());
    Eigen::VectorXcd coeff(k);
    const Complex phase = std::polar(0.5, sq.theta);
    for (Eigen::Index n = 0; n < k; ++n)
        coeff(n) = phase * std::sinh(2.0 * sq.beta * schmidt.weights[static_cast<std::size_t>(n)]);
    ComplexMatrix h = schmidt.s_modes * coeff.asDiagonal() * schmidt.i_modes.transpose();
    return ComplexField2D(schmidt.grid_s, schmidt.grid_i, std::move(h));
}

ComplexField2D temporal_H(const ComplexField2D& h, std::size_t pad_factor) {
    if (pad_factor < 1) throw Error(ErrorCode::InvalidArgument, "pad_factor must be >= 1");
    if (h.rows.unit() != Unit::ElectronVolt || h.cols.unit() != Unit::ElectronVolt)
        throw Error(ErrorCode::UnitMismatch, "h must be sampled on eV grids");
    const std::size_t nr = h.rows.count(), nc = h.cols.count();
    const std::size_t pr = nr * pad_factor, pc = nc * pad_factor;
    const std::size_t orow = (pr - nr) / 2, ocol = (pc - nc) / 2;
    ComplexMatrix padded = ComplexMatrix::Zero(static_cast<Eigen::Index>(pr), static_cast<Eigen::Index>(pc));
    padded.block(static_cast<Eigen::Index>(orow), static_cast<Eigen::Index>(ocol), static_cast<Eigen::Index>(nr),
                 static_cast<Eigen::Index>(nc)) = h.values;
    const Grid1D rows(h.rows.start() - static_cast<double>(orow) * h.rows.step(), h.rows.step(), pr, Unit::ElectronVolt);
    const Grid1D cols(h.cols.start() - static_cast<double>(ocol) * h.cols.step(), h.cols.step(), pc, Unit::ElectronVolt);
    return centered_fft2(ComplexField2D(rows, cols, std::move(padded)), -1, -1);
}

KernelScales extract_scales(const ComplexField2D& h) {
    const Eigen::MatrixXd w = h.values.cwiseAbs2();
    const double total = w.sum();
    if (!(total > 0.0)) throw Error(ErrorCode::NoCorrelation, "pair kernel is identically zero");
    Eigen::Index pr = 0, pc = 0;
    w.maxCoeff(&pr, &pc);
    const double xp = h.rows[static_cast<std::size_t>(pr)];
    const double yp = h.cols[static_cast<std::size_t>(pc)];
    double su = 0.0, sv = 0.0;
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
        const double y = h.cols[static_cast<std::size_t>(c)] - yp;
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            const double x = h.rows[static_cast<std::size_t>(r)] - xp;
            su += w(r, c) * (x + y) * (x + y);
            sv += w(r, c) * (x - y) * (x - y);
        }
    }
    KernelScales s;
    s.gamma0 = std::sqrt(su / total);
    s.tau0 = 1.0 / std::sqrt(sv / total);
    return s;
}

RotatedKernelM rotated_kernel(const ComplexField2D& H, const KernelScales& scales, double gate_extent) {
    if (!(scales.tau0 > 0.0) || !std::isfinite(scales.tau0)) throw Error(ErrorCode::InvalidArgument, "tau0 must be positive");
    if (!(gate_extent > 0.0)) throw Error(ErrorCode::InvalidArgument, "gate_extent must be positive");
    if (H.rows.unit() != Unit::InverseElectronVolt || H.cols.unit() != Unit::InverseElectronVolt)
        throw Error(ErrorCode::UnitMismatch, "H must be sampled on 1/eV grids");
    const double tau0 = scales.tau0;
    const Grid1D& t1 = H.rows;
    const double dt = t1.step();
    const auto J = static_cast<long>(std::ceil(gate_extent * tau0 / dt));
    const Grid1D sgrid(-static_cast<double>(J) * dt / tau0, dt / tau0, static_cast<std::size_t>(2 * J + 1));

    const double pref = 4.0 * kPi * kPi * tau0;
    ComplexMatrix calH(static_cast<Eigen::Index>(t1.count()), static_cast<Eigen::Index>(sgrid.count()));
    for (long j = -J; j <= J; ++j) {
        const double t2 = static_cast<double>(j) * dt;
        for (std::size_t i = 0; i < t1.count(); ++i)
            calH(static_cast<Eigen::Index>(i), j + J) = pref * bilinear_interp(H, t1[i] + t2, t1[i] - t2);
    }

    const Grid1D omega = conjugate_grid(t1);
    ComplexMatrix m = fourier_axis(calH, 0, t1, omega, +1, dt);
    ComplexField2D field(omega, sgrid, std::move(m));

    const double peak = field.max_abs();
    if (peak > 0.0) {
        const auto& v = field.values;
        const double edge_s = std::max(v.col(0).cwiseAbs().maxCoeff(), v.col(v.cols() - 1).cwiseAbs().maxCoeff());
        const double edge_w = std::max(v.row(0).cwiseAbs().maxCoeff(), v.row(v.rows() - 1).cwiseAbs().maxCoeff());
        if (edge_s >= 1e-6 * peak) {
            std::ostringstream os;
            os << "gate axis too short: edge/peak = " << edge_s / peak << "; raise gate_extent above " << gate_extent;
            throw Error(ErrorCode::GridTooNarrow, os.str());
        }
        if (edge_w >= 1e-6 * peak) {
            std::ostringstream os;
            os << "energy axis of M too short: edge/peak = " << edge_w / peak << "; refine the JSA grid step";
            throw Error(ErrorCode::GridTooNarrow, os.str());
        }
    }
    return {std::move(field), tau0, scales.gamma0};
}

PhotonFluxes photon_fluxes(const GainProfile& gains, const SeedSetting& seed) {
    const auto a = seed.split(gains.gains.size());
    PhotonFluxes f;
    for (std::size_t k = 0; k < gains.gains.size(); ++k) {
        const double g = gains.gains[k];
        f.signal += (1.0 + a[k]) * g - 1.0;
        f.idler += (1.0 + a[k]) * (g - 1.0);
    }
    return f;
}

double amplification(const SeedSetting& seed) {
    seed.validate();
    return (1.0 + seed.alpha_sq) * (1.0 + seed.alpha_sq);
}

double squeezing_db(const SchmidtDecomposition& schmidt, const SqueezeSetting& sq) {
    sq.validate();
    if (schmidt.weights.empty()) return 0.0;
    return 10.0 * std::log10(std::exp(2.0 * sq.beta * schmidt.weights.front()));
}

double participation_number(const ComplexField2D& kernel, double rel_tol) {
    const double w = std::sqrt(kernel.rows.step() * kernel.cols.step());
    const TruncatedSvd svd = truncated_svd(kernel.values * w, rel_tol);
    if (svd.status == SvdStatus::NullInput) throw Error(ErrorCode::NoCorrelation, "kernel is identically zero");
    const Eigen::VectorXd p = svd.singular_values.cwiseAbs2() / svd.singular_values.squaredNorm();
    return 1.0 / p.squaredNorm();
}

}  // namespace sqzppf
