#pragma once

#include <functional>
#include <optional>

#include "sqzppf/exciton.hpp"
#include "sqzppf/numerics.hpp"
#include "sqzppf/squeezed_field.hpp"

namespace sqzppf {

enum class Normalization { Raw, UnitPeak };

struct Polarizations {
    Polarization s = Polarization::SigmaPlus;
    Polarization i = Polarization::SigmaMinus;
    bool operator==(const Polarizations&) const = default;
};

/// Intensities(v, T): rows follow vbar_axis (eV), columns T_axis (fs or 1/eV).
struct SignalMap {
    Grid1D vbar_axis;
    Grid1D T_axis;
    Eigen::MatrixXd intensities;
    Normalization normalization = Normalization::Raw;
    double z_factor = 1.0;
};

struct BaselineParams {
    double sigma_pump = 0.069;    // eV
    double sigma_probe = 0.069;   // eV
    double duration_pump = 60.0;  // fs
    std::optional<double> omega_pump;  // eV; no pump filter when absent
    void validate() const;
    bool operator==(const BaselineParams&) const = default;
};

struct LineShape {
    std::function<Complex(double)> profile;
    double width = 0.0;  // RMS of |profile|^2, eV

    enum class Gate { Integrated, AtZero };
    /// Unit-peak profile from M: integrated over the gate axis, or the s = 0 column.
    static LineShape from_kernel(const RotatedKernelM& kernel, Gate gate = Gate::Integrated);
};

struct SignalOptions {
    double t_max = 0.0;        // 1/eV; 0 picks max(T) + 8 tau0
    double omega_minus = 0.0;  // eV
    double gate_cut = 0.0;     // if > 0, drop |T - t| > gate_cut * tau0
    int threads = 0;
};

/// Internal times (1/eV) of an axis given in fs or 1/eV.
Grid1D to_internal_time(const Grid1D& axis);

/// S(v, T) = Z sum_f |int_0^tmax dt A_f(t) exp(i(w_f + w_-)(t - T)/2) M(w_f - v, (T - t)/(2 tau0))|^2
SignalMap ppf_signal(const ExcitonModel& model, const RotatedKernelM& kernel, Polarizations pols,
                     const Grid1D& vbar_axis, const Grid1D& T_axis, double Z, const SignalOptions& options = {});

/// S(v, T) = Z sum_f |A_f(T) Omega(w_f - v)|^2
SignalMap ppf_impulsive(const ExcitonModel& model, const LineShape& lineshape, Polarizations pols,
                        const Grid1D& vbar_axis, const Grid1D& T_axis, double Z, int threads = 0);

/// Tabulated M_cl(w, tau) = exp(-w^2/(4 sigma_probe^2)) exp(-tau^2/(2 d^2)) with tau0 = d.
RotatedKernelM classical_kernel(const BaselineParams& base);

/// Laser pulses: the gated pipeline with M_cl, interaction-frame doorway amplitudes and Z = 1.
SignalMap classical_baseline(const ExcitonModel& model, const BaselineParams& base, Polarizations pols,
                             const Grid1D& vbar_axis, const Grid1D& T_axis, const SignalOptions& options = {});

struct OracleSetup {
    Polarizations pols;
    double central_s = 1.6;  // eV, carrier of the s arm of h
    double central_i = 1.6;  // eV
    double Z = 1.0;
    int quad_points = 40;
    double window = 0.0;  // half-width of each time axis, 1/eV; 0 derives it from h
};

/// Brute-force four-time loop integral with the resonant field correlator
/// Z H(tau2, tau3 - T) H*(tau1, tau4 - T). T in 1/eV. Small models only.
double direct_loop_oracle(const ExcitonModel& model, const ComplexField2D& h, double vbar, double T,
                          const OracleSetup& setup);

SignalMap normalize_map(const SignalMap& map, Normalization mode);

/// Relative L2 distance between two maps after unit-peak normalisation of each.
double unit_peak_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace sqzppf
