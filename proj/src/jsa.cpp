#include "sqzppf/jsa.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sqzppf {

JsaParams JsaParams::from_centers(double central_s, double central_i, double sigma_plus, double sigma_minus) {
    JsaParams p;
    p.central_s = central_s;
    p.central_i = central_i;
    p.omega_plus = central_s + central_i;
    p.omega_minus = central_s - central_i;
    p.sigma_plus = sigma_plus;
    p.sigma_minus = sigma_minus;
    p.validate();
    return p;
}

void JsaParams::validate() const {
    if (!(sigma_plus > 0.0) || !(sigma_minus > 0.0))
        throw Error(ErrorCode::InvalidArgument, "JSA widths must be positive");
    const double scale = std::max({1.0, std::abs(central_s), std::abs(central_i)});
    if (std::abs(omega_plus - (central_s + central_i)) > 1e-12 * scale ||
        std::abs(omega_minus - (central_s - central_i)) > 1e-12 * scale)
        throw Error(ErrorCode::InvalidArgument, "omega_plus/omega_minus inconsistent with arm centres");
}

double SchmidtDecomposition::participation() const {
    double s4 = 0.0;
    for (double r : weights) s4 += r * r * r * r;
    return s4 > 0.0 ? 1.0 / s4 : 0.0;
}

Grid1D default_arm_grid(const JsaParams& params, std::size_t count, double span_sigmas) {
    const double half = span_sigmas * std::max(params.sigma_plus, params.sigma_minus);
    return Grid1D::centered(count, 2.0 * half / static_cast<double>(count), Unit::ElectronVolt);
}

JointSpectralAmplitude build_gaussian_jsa(const JsaParams& params, const Grid1D& grid_s, const Grid1D& grid_i) {
    params.validate();
    if (grid_s.unit() != Unit::ElectronVolt || grid_i.unit() != Unit::ElectronVolt)
        throw Error(ErrorCode::UnitMismatch, "JSA grids must be in eV");
    const double a = 1.0 / (4.0 * params.sigma_plus * params.sigma_plus);
    const double b = 1.0 / (4.0 * params.sigma_minus * params.sigma_minus);
    const auto ns = static_cast<Eigen::Index>(grid_s.count());
    const auto ni = static_cast<Eigen::Index>(grid_i.count());
    ComplexMatrix phi(ns, ni);
    for (Eigen::Index c = 0; c < ni; ++c) {
        const double y = grid_i[static_cast<std::size_t>(c)];
        for (Eigen::Index r = 0; r < ns; ++r) {
            const double x = grid_s[static_cast<std::size_t>(r)];
            const double u = x + y, v = x - y;
            phi(r, c) = std::exp(-a * u * u - b * v * v);
        }
    }
    const double peak = phi.cwiseAbs().maxCoeff();
    double edge = 0.0;
    edge = std::max(edge, phi.row(0).cwiseAbs().maxCoeff());
    edge = std::max(edge, phi.row(ns - 1).cwiseAbs().maxCoeff());
    edge = std::max(edge, phi.col(0).cwiseAbs().maxCoeff());
    edge = std::max(edge, phi.col(ni - 1).cwiseAbs().maxCoeff());
    if (!(peak > 0.0) || edge >= 1e-6 * peak) {
        std::ostringstream os;
        os << "JSA grid too narrow: boundary/peak = " << (peak > 0 ? edge / peak : 1.0)
           << "; widen both arms to at least +-" << 5.0 * std::max(params.sigma_plus, params.sigma_minus)
           << " eV around the centres";
        throw Error(ErrorCode::GridTooNarrow, os.str());
    }
    const double norm2 = phi.squaredNorm() * grid_s.step() * grid_i.step();
    phi /= std::sqrt(norm2);
    return {ComplexField2D(grid_s, grid_i, std::move(phi)), params};
}

SchmidtDecomposition schmidt_decompose(const JointSpectralAmplitude& jsa, double rel_tol) {
    const double ds = jsa.field.rows.step();
    const double di = jsa.field.cols.step();
    const double w = std::sqrt(ds * di);
    TruncatedSvd svd = truncated_svd(jsa.field.values * w, rel_tol);
    if (svd.status == SvdStatus::NullInput) throw Error(ErrorCode::NullInput, "JSA is identically zero");

    SchmidtDecomposition out;
    out.grid_s = jsa.field.rows;
    out.grid_i = jsa.field.cols;
    out.weights.assign(svd.singular_values.data(), svd.singular_values.data() + svd.size());
    out.s_modes = svd.left / std::sqrt(ds);
    out.i_modes = svd.right.conjugate() / std::sqrt(di);
    if (out.size() > 1) {
        double sum = 0.0;
        for (std::size_t k = 0; k + 1 < out.size(); ++k) sum += out.weights[k + 1] / out.weights[k];
        out.mode_ratio = sum / static_cast<double>(out.size() - 1);
    }
    return out;
}

std::vector<double> hermite_functions(double u, int count) {
    std::vector<double> h(static_cast<std::size_t>(std::max(count, 0)));
    if (count <= 0) return h;
    h[0] = std::pow(kPi, -0.25) * std::exp(-0.5 * u * u);
    if (count > 1) h[1] = std::sqrt(2.0) * u * h[0];
    for (int k = 1; k + 1 < count; ++k) {
        const double kk = static_cast<double>(k);
        h[static_cast<std::size_t>(k + 1)] = std::sqrt(2.0 / (kk + 1.0)) * u * h[static_cast<std::size_t>(k)] -
                                             std::sqrt(kk / (kk + 1.0)) * h[static_cast<std::size_t>(k - 1)];
    }
    return h;
}

SchmidtDecomposition analytic_gaussian_schmidt(const JsaParams& params, int mode_count, const Grid1D& grid_s,
                                               const Grid1D& grid_i) {
    if (mode_count < 1) throw Error(ErrorCode::InvalidArgument, "mode_count must be at least 1");
    params.validate();
    const double sp = params.sigma_plus, sm = params.sigma_minus;
    const double mu = std::abs(sm - sp) / (sm + sp);
    // Anti-correlated arms (sigma_minus > sigma_plus) flip the idler parity.
    const double parity = sm >= sp ? -1.0 : 1.0;
    const int count = mu == 0.0 ? 1 : mode_count;
    const double scale = std::sqrt(sp * sm);

    SchmidtDecomposition out;
    out.grid_s = grid_s;
    out.grid_i = grid_i;
    out.mode_ratio = mu;
    out.weights.resize(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) out.weights[static_cast<std::size_t>(k)] = std::sqrt(1.0 - mu * mu) * std::pow(mu, k);

    const auto fill = [&](const Grid1D& g, double sign) {
        ComplexMatrix m(static_cast<Eigen::Index>(g.count()), count);
        for (std::size_t n = 0; n < g.count(); ++n) {
            const auto h = hermite_functions(g[n] / scale, count);
            double p = 1.0;
            for (int k = 0; k < count; ++k) {
                m(static_cast<Eigen::Index>(n), k) = p * h[static_cast<std::size_t>(k)] / std::sqrt(scale);
                p *= sign;
            }
        }
        return m;
    };
    out.s_modes = fill(grid_s, 1.0);
    out.i_modes = fill(grid_i, parity);
    return out;
}

}  // namespace sqzppf
