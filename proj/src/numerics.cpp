#include "sqzppf/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include <fftw3.h>

namespace sqzppf {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

void check_grid_args(double step, std::size_t count) {
    if (!(step > 0.0) || !std::isfinite(step))
        throw Error(ErrorCode::InvalidArgument, "grid step must be positive and finite");
    if (count < 2) throw Error(ErrorCode::InvalidArgument, "grid needs at least 2 points");
}

}  // namespace

const char* unit_name(Unit unit) {
    switch (unit) {
        case Unit::Dimensionless: return "1";
        case Unit::ElectronVolt: return "eV";
        case Unit::InverseElectronVolt: return "1/eV";
        case Unit::Femtosecond: return "fs";
    }
    return "?";
}

Grid1D::Grid1D(double start, double step, std::size_t count, Unit unit)
    : start_(start), step_(step), count_(count), unit_(unit) {
    check_grid_args(step, count);
    if (!std::isfinite(start)) throw Error(ErrorCode::InvalidArgument, "grid start must be finite");
}

Grid1D Grid1D::centered(std::size_t count, double step, Unit unit) {
    check_grid_args(step, count);
    return Grid1D(-static_cast<double>(count / 2) * step, step, count, unit);
}

Grid1D Grid1D::from_points(std::span<const double> points, Unit unit, double rel_tol) {
    if (points.size() < 2) throw Error(ErrorCode::InvalidArgument, "grid needs at least 2 points");
    const double step = (points.back() - points.front()) / static_cast<double>(points.size() - 1);
    for (std::size_t n = 0; n < points.size(); ++n) {
        const double expect = points.front() + static_cast<double>(n) * step;
        if (std::abs(points[n] - expect) > rel_tol * std::abs(step))
            throw Error(ErrorCode::InvalidArgument, "non-uniform grid rejected");
    }
    return Grid1D(points.front(), step, points.size(), unit);
}

Grid1D Grid1D::from_range(double start, double stop, double step, Unit unit) {
    if (!(step > 0.0) || !(stop > start))
        throw Error(ErrorCode::InvalidArgument, "empty range");
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 0.5)) + 1;
    return Grid1D(start, step, count, unit);
}

std::vector<double> Grid1D::points() const {
    std::vector<double> p(count_);
    for (std::size_t n = 0; n < count_; ++n) p[n] = (*this)[n];
    return p;
}

ComplexField2D::ComplexField2D(Grid1D rows_, Grid1D cols_, ComplexMatrix values_)
    : rows(rows_), cols(cols_), values(std::move(values_)) {
    if (static_cast<std::size_t>(values.rows()) != rows.count() ||
        static_cast<std::size_t>(values.cols()) != cols.count()) {
        std::ostringstream os;
        os << "field shape " << values.rows() << "x" << values.cols() << " does not match grids "
           << rows.count() << "x" << cols.count();
        throw Error(ErrorCode::InvalidArgument, os.str());
    }
    if (!values.allFinite()) throw Error(ErrorCode::Numerical, "field has non-finite entries");
}

double ComplexField2D::max_abs() const {
    return values.size() == 0 ? 0.0 : values.cwiseAbs().maxCoeff();
}

Grid1D conjugate_grid(const Grid1D& grid) {
    Unit u = grid.unit();
    if (u == Unit::ElectronVolt)
        u = Unit::InverseElectronVolt;
    else if (u == Unit::InverseElectronVolt)
        u = Unit::ElectronVolt;
    else if (u == Unit::Femtosecond)
        throw Error(ErrorCode::UnitMismatch, "convert fs axes to internal time before transforming");
    const double step = 2.0 * kPi / (static_cast<double>(grid.count()) * grid.step());
    return Grid1D::centered(grid.count(), step, u);
}

ComplexMatrix fourier_axis(const ComplexMatrix& values, int axis, const Grid1D& in,
                           const Grid1D& out, int sign, double factor) {
    if (axis != 0 && axis != 1) throw Error(ErrorCode::InvalidArgument, "axis must be 0 or 1");
    if (sign != 1 && sign != -1) throw Error(ErrorCode::InvalidArgument, "sign must be +1 or -1");
    const std::size_t n = in.count();
    const std::size_t len = static_cast<std::size_t>(axis == 0 ? values.rows() : values.cols());
    if (len != n || out.count() != n)
        throw Error(ErrorCode::InvalidArgument, "transform axis length does not match grids");
    const double product = in.step() * out.step() * static_cast<double>(n);
    if (std::abs(product - 2.0 * kPi) > 1e-9 * 2.0 * kPi)
        throw Error(ErrorCode::InvalidArgument, "grids are not Fourier conjugate");

    const auto rows = static_cast<std::size_t>(values.rows());
    const auto cols = static_cast<std::size_t>(values.cols());
    const std::size_t total = rows * cols;
    auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * std::max<std::size_t>(total, 1)));
    if (buf == nullptr) throw Error(ErrorCode::Numerical, "FFT buffer allocation failed");
    auto* data = reinterpret_cast<Complex*>(buf);

    const double s = static_cast<double>(sign);
    std::vector<Complex> pre(n), post(n);
    for (std::size_t k = 0; k < n; ++k) {
        pre[k] = std::polar(1.0, s * static_cast<double>(k) * in.step() * out.start());
        post[k] = factor * std::polar(1.0, s * in.start() * out[k]);
    }

    for (std::size_t c = 0; c < cols; ++c)
        for (std::size_t r = 0; r < rows; ++r)
            data[c * rows + r] = values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) *
                                 pre[axis == 0 ? r : c];

    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        const int nn[1] = {static_cast<int>(n)};
        const int howmany = static_cast<int>(axis == 0 ? cols : rows);
        const int stride = static_cast<int>(axis == 0 ? 1 : rows);
        const int dist = static_cast<int>(axis == 0 ? rows : 1);
        plan = fftw_plan_many_dft(1, nn, howmany, buf, nullptr, stride, dist, buf, nullptr, stride, dist,
                                  sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    if (plan == nullptr) {
        fftw_free(buf);
        throw Error(ErrorCode::Numerical, "FFT planning failed");
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }

    ComplexMatrix result(values.rows(), values.cols());
    for (std::size_t c = 0; c < cols; ++c)
        for (std::size_t r = 0; r < rows; ++r)
            result(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                data[c * rows + r] * post[axis == 0 ? r : c];
    fftw_free(buf);
    return result;
}

ComplexField2D centered_fft2(const ComplexField2D& field, int sign_rows, int sign_cols) {
    const Grid1D tr = conjugate_grid(field.rows);
    const Grid1D tc = conjugate_grid(field.cols);
    ComplexMatrix v = fourier_axis(field.values, 0, field.rows, tr, sign_rows, field.rows.step() / (2.0 * kPi));
    v = fourier_axis(v, 1, field.cols, tc, sign_cols, field.cols.step() / (2.0 * kPi));
    return ComplexField2D(tr, tc, std::move(v));
}

ComplexField2D inverse_centered_fft2(const ComplexField2D& field, int sign_rows, int sign_cols,
                                     const Grid1D& rows, const Grid1D& cols) {
    ComplexMatrix v = fourier_axis(field.values, 0, field.rows, rows, sign_rows, field.rows.step());
    v = fourier_axis(v, 1, field.cols, cols, sign_cols, field.cols.step());
    return ComplexField2D(rows, cols, std::move(v));
}

TruncatedSvd truncated_svd(const ComplexMatrix& matrix, double rel_tol) {
    if (!(rel_tol > 0.0 && rel_tol < 1.0))
        throw Error(ErrorCode::InvalidArgument, "rel_tol must lie in (0, 1)");
    if (!matrix.allFinite()) throw Error(ErrorCode::Numerical, "SVD input has non-finite entries");
    TruncatedSvd out;
    if (matrix.size() == 0 || matrix.cwiseAbs().maxCoeff() == 0.0) {
        out.status = SvdStatus::NullInput;
        return out;
    }
    Eigen::BDCSVD<ComplexMatrix> svd(matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    Eigen::Index keep = 0;
    while (keep < s.size() && s(keep) >= rel_tol * s(0)) ++keep;
    out.singular_values = s.head(keep);
    out.left = svd.matrixU().leftCols(keep);
    out.right = svd.matrixV().leftCols(keep);
    // Fix the per-mode phase: largest entry of each left mode made real positive.
    for (Eigen::Index k = 0; k < keep; ++k) {
        Eigen::Index imax = 0;
        out.left.col(k).cwiseAbs().maxCoeff(&imax);
        const Complex p = out.left(imax, k);
        const Complex u = std::conj(p) / std::abs(p);
        out.left.col(k) *= u;
        out.right.col(k) *= u;
    }
    return out;
}

Complex bilinear_interp(const ComplexField2D& field, double row_coord, double col_coord) {
    const auto locate = [](const Grid1D& g, double x, std::size_t& i, double& frac) {
        double f = g.index_of(x);
        const double r = std::round(f);
        if (std::abs(f - r) < 1e-9) f = r;
        const double last = static_cast<double>(g.count() - 1);
        if (!(f >= 0.0 && f <= last)) return false;
        i = std::min(static_cast<std::size_t>(f), g.count() - 2);
        frac = f - static_cast<double>(i);
        return true;
    };
    std::size_t i = 0, j = 0;
    double a = 0.0, b = 0.0;
    if (!locate(field.rows, row_coord, i, a) || !locate(field.cols, col_coord, j, b)) return {0.0, 0.0};
    const auto& v = field.values;
    const auto ii = static_cast<Eigen::Index>(i);
    const auto jj = static_cast<Eigen::Index>(j);
    return (1 - a) * (1 - b) * v(ii, jj) + a * (1 - b) * v(ii + 1, jj) + (1 - a) * b * v(ii, jj + 1) +
           a * b * v(ii + 1, jj + 1);
}

Complex linear_interp(const Grid1D& grid, std::span<const Complex> values, double x) {
    if (values.size() != grid.count()) throw Error(ErrorCode::InvalidArgument, "samples do not match grid");
    double f = grid.index_of(x);
    const double r = std::round(f);
    if (std::abs(f - r) < 1e-9) f = r;
    if (!(f >= 0.0 && f <= static_cast<double>(grid.count() - 1))) return {0.0, 0.0};
    const std::size_t i = std::min(static_cast<std::size_t>(f), grid.count() - 2);
    const double a = f - static_cast<double>(i);
    return (1 - a) * values[i] + a * values[i + 1];
}

Complex trapezoid(std::span<const Complex> values, double step) {
    if (values.size() < 2) throw Error(ErrorCode::InvalidArgument, "trapezoid needs at least 2 samples");
    if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "trapezoid step must be positive");
    Complex sum = 0.5 * (values.front() + values.back());
    for (std::size_t n = 1; n + 1 < values.size(); ++n) sum += values[n];
    return sum * step;
}

double trapezoid(std::span<const double> values, double step) {
    if (values.size() < 2) throw Error(ErrorCode::InvalidArgument, "trapezoid needs at least 2 samples");
    if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "trapezoid step must be positive");
    double sum = 0.5 * (values.front() + values.back());
    for (std::size_t n = 1; n + 1 < values.size(); ++n) sum += values[n];
    return sum * step;
}

}  // namespace sqzppf
