#pragma once

#include <optional>
#include <vector>

#include "sqzppf/jsa.hpp"
#include "sqzppf/numerics.hpp"

namespace sqzppf {

/// z = beta * exp(i theta)
struct SqueezeSetting {
    double beta = 0.0;
    double theta = 0.0;
    void validate() const;
    bool operator==(const SqueezeSetting&) const = default;
};

/// Seed photon number |alpha|^2, optionally split per Schmidt mode.
struct SeedSetting {
    double alpha_sq = 0.0;
    std::optional<std::vector<double>> per_mode;
    void validate() const;
    /// Per-mode |alpha_k|^2; an equal split when per_mode is absent.
    std::vector<double> split(std::size_t modes) const;
    bool operator==(const SeedSetting&) const = default;
};

struct GainProfile {
    std::vector<double> gains;
};

struct KernelScales {
    double tau0 = 0.0;    // 1/eV
    double gamma0 = 0.0;  // eV
};

/// M(omega, s) with s = tau / tau0. Rows are energy offsets (eV), columns s.
struct RotatedKernelM {
    ComplexField2D m_field;
    double tau0 = 0.0;
    double gamma0 = 0.0;

    /// Same M(omega, s) table read with a different tau0.
    RotatedKernelM with_tau0_scaled(double factor) const;
};

struct PhotonFluxes {
    double signal = 0.0;
    double idler = 0.0;
};

GainProfile gain_profile(const SchmidtDecomposition& schmidt, const SqueezeSetting& sq);

/// h(w1, w2) = 0.5 exp(i theta) sum_k psi_k(w1) phi_k(w2) sinh(2 beta r_k), on the Schmidt grids.
ComplexField2D pair_amplitude_h(const SchmidtDecomposition& schmidt, const SqueezeSetting& sq);

/// H(t1, t2): h zero-padded by pad_factor on each axis, then transformed with sign -1 on both axes.
ComplexField2D temporal_H(const ComplexField2D& h, std::size_t pad_factor = 4);

/// RMS widths of |h|^2 along w1+w2 (gamma0) and w1-w2 (1/tau0), measured from the peak of |h|.
KernelScales extract_scales(const ComplexField2D& h);

/// calH(t1, s) = (2pi)^2 tau0 H(t1 + s tau0, t1 - s tau0), then M(w, s) = int dt1 exp(i w t1) calH(t1, s).
/// The s axis covers [-gate_extent, gate_extent] with step dt/tau0.
RotatedKernelM rotated_kernel(const ComplexField2D& H, const KernelScales& scales, double gate_extent = 8.0);

PhotonFluxes photon_fluxes(const GainProfile& gains, const SeedSetting& seed);

/// Z = (1 + |alpha|^2)^2
double amplification(const SeedSetting& seed);

/// 10 log10(exp(2 beta r_0))
double squeezing_db(const SchmidtDecomposition& schmidt, const SqueezeSetting& sq);

/// 1 / sum w_k^2 with w_k the normalised squared singular values of the sampled kernel.
double participation_number(const ComplexField2D& kernel, double rel_tol = 1e-10);

}  // namespace sqzppf
