#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sqzppf/error.hpp"

namespace sqzppf {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// hbar in eV*fs. Internally energies are eV and times are 1/eV.
inline constexpr double kHbarEvFs = 0.6582119569;
inline constexpr double kPi = 3.14159265358979323846;

inline double fs_to_internal(double fs) { return fs / kHbarEvFs; }
inline double internal_to_fs(double t) { return t * kHbarEvFs; }

enum class Unit { Dimensionless, ElectronVolt, InverseElectronVolt, Femtosecond };

const char* unit_name(Unit unit);

/// Uniform axis: points are start + n*step for n in [0, count).
class Grid1D {
public:
    Grid1D() = default;
    Grid1D(double start, double step, std::size_t count, Unit unit = Unit::Dimensionless);

    /// Axis with start = -(count/2)*step, so the point count/2 sits on zero.
    static Grid1D centered(std::size_t count, double step, Unit unit = Unit::Dimensionless);
    /// Rejects point sets that are not uniformly spaced.
    static Grid1D from_points(std::span<const double> points, Unit unit, double rel_tol = 1e-9);
    /// Inclusive range; count is chosen so the last point is within step/2 of stop.
    static Grid1D from_range(double start, double stop, double step, Unit unit);

    double start() const { return start_; }
    double step() const { return step_; }
    std::size_t count() const { return count_; }
    Unit unit() const { return unit_; }
    double operator[](std::size_t n) const { return start_ + static_cast<double>(n) * step_; }
    double back() const { return (*this)[count_ - 1]; }
    std::vector<double> points() const;
    /// Fractional index of x; not clamped.
    double index_of(double x) const { return (x - start_) / step_; }

    bool operator==(const Grid1D&) const = default;

private:
    double start_ = 0.0;
    double step_ = 1.0;
    std::size_t count_ = 2;
    Unit unit_ = Unit::Dimensionless;
};

/// Complex samples on a rectangular grid; values(r, c) sits at (rows[r], cols[c]).
struct ComplexField2D {
    Grid1D rows;
    Grid1D cols;
    ComplexMatrix values;

    ComplexField2D() = default;
    ComplexField2D(Grid1D rows_, Grid1D cols_, ComplexMatrix values_);

    double max_abs() const;
};

/// Conjugate axis for an FFT: step 2*pi/(N*step), centered.
Grid1D conjugate_grid(const Grid1D& grid);

/// Discrete Fourier sum along one axis between two grids with in.step*out.step*N = 2*pi:
///   out_j = factor * sum_n in_n exp(sign*i*x_n*y_j)
ComplexMatrix fourier_axis(const ComplexMatrix& values, int axis, const Grid1D& in,
                           const Grid1D& out, int sign, double factor);

/// Frequency to time on both axes: F(t) = (1/2pi) sum dw f(w) exp(sign*i*w*t).
/// Output lives on the centered conjugate grids. Any size works; powers of two are fastest.
ComplexField2D centered_fft2(const ComplexField2D& field, int sign_rows, int sign_cols);

/// Time to frequency onto the given grids: f(w) = sum dt F(t) exp(sign*i*w*t), no 1/2pi.
/// With sign opposite to the forward call this undoes centered_fft2.
ComplexField2D inverse_centered_fft2(const ComplexField2D& field, int sign_rows, int sign_cols,
                                     const Grid1D& rows, const Grid1D& cols);

enum class SvdStatus { Ok, NullInput };

struct TruncatedSvd {
    SvdStatus status = SvdStatus::Ok;
    ComplexMatrix left;   // columns are modes
    Eigen::VectorXd singular_values;
    ComplexMatrix right;  // columns are modes; matrix ~ left * diag(s) * right^H
    std::size_t size() const { return static_cast<std::size_t>(singular_values.size()); }
};

/// Keeps singular values >= rel_tol * s_0. All-zero input gives an empty result with NullInput.
TruncatedSvd truncated_svd(const ComplexMatrix& matrix, double rel_tol);

/// Bilinear interpolation in physical coordinates; zero outside the grid hull.
Complex bilinear_interp(const ComplexField2D& field, double row_coord, double col_coord);

/// Linear interpolation of samples on a grid; zero outside the hull.
Complex linear_interp(const Grid1D& grid, std::span<const Complex> values, double x);

Complex trapezoid(std::span<const Complex> values, double step);
double trapezoid(std::span<const double> values, double step);

}  // namespace sqzppf
