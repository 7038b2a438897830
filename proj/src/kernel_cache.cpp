#include "sqzppf/kernel_cache.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <vector>

#include "sqzppf/config.hpp"

namespace sqzppf {

namespace {

constexpr char kMagic[4] = {'S', 'Q', 'Z', 'K'};
constexpr std::uint32_t kVersion = 1;

void put_u64(std::string& out, std::uint64_t v) {
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}
void put_u32(std::string& out, std::uint32_t v) {
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}
void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

struct Cursor {
    const std::string& data;
    std::size_t pos = 0;
    bool ok = true;
    std::uint64_t u64() {
        if (pos + 8 > data.size()) {
            ok = false;
            return 0;
        }
        std::uint64_t v = 0;
        for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data[pos + b])) << (8 * b);
        pos += 8;
        return v;
    }
    std::uint32_t u32() {
        if (pos + 4 > data.size()) {
            ok = false;
            return 0;
        }
        std::uint32_t v = 0;
        for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data[pos + b])) << (8 * b);
        pos += 4;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
};

void put_grid(std::string& out, const Grid1D& g) {
    put_f64(out, g.start());
    put_f64(out, g.step());
    put_u64(out, g.count());
    put_u32(out, static_cast<std::uint32_t>(g.unit()));
}

std::optional<Grid1D> get_grid(Cursor& c) {
    const double start = c.f64(), step = c.f64();
    const std::uint64_t count = c.u64();
    const std::uint32_t unit = c.u32();
    if (!c.ok || unit > 3 || count < 2 || count > (1u << 24) || !(step > 0.0) || !std::isfinite(start))
        return std::nullopt;
    return Grid1D(start, step, static_cast<std::size_t>(count), static_cast<Unit>(unit));
}

}  // namespace

std::string kernel_cache_path(const std::string& directory, std::uint64_t key) {
    return (std::filesystem::path(directory) / ("kernel_" + hex64(key) + ".bin")).string();
}

void cache_kernel(const RotatedKernelM& kernel, std::uint64_t key, const std::string& directory) {
    std::string out(kMagic, 4);
    put_u32(out, kVersion);
    put_u64(out, key);
    put_f64(out, kernel.tau0);
    put_f64(out, kernel.gamma0);
    put_grid(out, kernel.m_field.rows);
    put_grid(out, kernel.m_field.cols);
    const auto& v = kernel.m_field.values;
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        put_f64(out, v.data()[k].real());
        put_f64(out, v.data()[k].imag());
    }
    put_u64(out, fnv1a64(out));

    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    const std::string path = kernel_cache_path(directory, key);
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorCode::Io, "cannot write kernel cache " + tmp);
        f.write(out.data(), static_cast<std::streamsize>(out.size()));
        if (!f) throw Error(ErrorCode::Io, "short write to kernel cache " + tmp);
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot move kernel cache into place: " + ec.message());
}

std::optional<RotatedKernelM> load_kernel(std::uint64_t key, const std::string& directory) {
    std::ifstream f(kernel_cache_path(directory, key), std::ios::binary);
    if (!f) return std::nullopt;
    const std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (data.size() < 4 + 4 + 8 + 8 || std::memcmp(data.data(), kMagic, 4) != 0) return std::nullopt;
    const std::string body = data.substr(0, data.size() - 8);
    Cursor tail{data, data.size() - 8};
    if (tail.u64() != fnv1a64(body)) return std::nullopt;

    Cursor c{body, 4};
    if (c.u32() != kVersion || c.u64() != key) return std::nullopt;
    const double tau0 = c.f64(), gamma0 = c.f64();
    const auto rows = get_grid(c);
    const auto cols = rows ? get_grid(c) : std::nullopt;
    if (!rows || !cols) return std::nullopt;
    const std::size_t n = rows->count() * cols->count();
    if (body.size() - c.pos != n * 16) return std::nullopt;
    ComplexMatrix m(static_cast<Eigen::Index>(rows->count()), static_cast<Eigen::Index>(cols->count()));
    for (std::size_t k = 0; k < n; ++k) {
        const double re = c.f64(), im = c.f64();
        m.data()[k] = Complex(re, im);
    }
    if (!c.ok || !m.allFinite()) return std::nullopt;
    try {
        return RotatedKernelM{ComplexField2D(*rows, *cols, std::move(m)), tau0, gamma0};
    } catch (const Error&) {
        return std::nullopt;
    }
}

}  // namespace sqzppf
