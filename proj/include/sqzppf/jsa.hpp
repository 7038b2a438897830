#pragma once

#include <cstddef>
#include <vector>

#include "sqzppf/numerics.hpp"

namespace sqzppf {

/// Gaussian OPA envelope. omega_plus = central_s + central_i, omega_minus = central_s - central_i.
struct JsaParams {
    double omega_plus = 3.2;
    double omega_minus = 0.0;
    double sigma_plus = 0.005;
    double sigma_minus = 0.0827;
    double central_s = 1.6;
    double central_i = 1.6;

    static JsaParams from_centers(double central_s, double central_i, double sigma_plus, double sigma_minus);
    void validate() const;
    bool operator==(const JsaParams&) const = default;
};

/// Phi on grids of offsets from (central_s, central_i), unit L2 norm.
struct JointSpectralAmplitude {
    ComplexField2D field;
    JsaParams params;
};

/// Columns of s_modes / i_modes are psi_k and phi_k sampled on grid_s / grid_i,
/// normalised so that sum |psi_k|^2 * step = 1. Phi = sum_k r_k psi_k(x) phi_k(y).
struct SchmidtDecomposition {
    std::vector<double> weights;
    ComplexMatrix s_modes;
    ComplexMatrix i_modes;
    Grid1D grid_s;
    Grid1D grid_i;
    double mode_ratio = 0.0;

    std::size_t size() const { return weights.size(); }
    /// K = 1 / sum r_k^4
    double participation() const;
};

/// Offsets spanning +-span_sigmas * max(sigma_plus, sigma_minus), centred on zero.
Grid1D default_arm_grid(const JsaParams& params, std::size_t count = 512, double span_sigmas = 6.0);

JointSpectralAmplitude build_gaussian_jsa(const JsaParams& params, const Grid1D& grid_s, const Grid1D& grid_i);

SchmidtDecomposition schmidt_decompose(const JointSpectralAmplitude& jsa, double rel_tol = 1e-6);

/// Closed form for the double Gaussian: Hermite functions of scale sqrt(sigma_plus*sigma_minus),
/// weights sqrt(1-mu^2) mu^k with mu = |sigma_minus - sigma_plus| / (sigma_minus + sigma_plus).
SchmidtDecomposition analytic_gaussian_schmidt(const JsaParams& params, int mode_count, const Grid1D& grid_s,
                                               const Grid1D& grid_i);

/// Normalised Hermite functions h_0..h_{count-1} at u.
std::vector<double> hermite_functions(double u, int count);

}  // namespace sqzppf
