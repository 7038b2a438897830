#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sqzppf/exciton.hpp"
#include "sqzppf/jsa.hpp"
#include "sqzppf/signal.hpp"
#include "sqzppf/squeezed_field.hpp"

namespace sqzppf {

enum class Action { Correlation, Fluxes, Spectrum, Impulsive, Baseline, Oracle, DumpModel };

const char* action_name(Action a);
std::optional<Action> parse_action(const std::string& name);
/// Comma-separated action names.
std::vector<Action> parse_action_list(const std::string& text);

struct JsaConfig {
    JsaParams params;
    std::size_t grid_points = 512;
    double span_sigmas = 6.0;
    double schmidt_tol = 1e-6;
    std::optional<double> expected_xi;
    bool operator==(const JsaConfig&) const = default;
};

struct KernelConfig {
    std::size_t pad_factor = 4;
    double gate_extent = 8.0;
    bool operator==(const KernelConfig&) const = default;
};

/// Detection and delay axes plus the beta sweep for flux curves.
struct GridSpec {
    double vbar_start = 3.10, vbar_stop = 4.10, vbar_step = 0.001;  // eV
    double T_start = 0.0, T_stop = 1000.0, T_step = 10.0;           // fs
    double beta_start = 0.0, beta_stop = 3.0, beta_step = 0.1;
    bool operator==(const GridSpec&) const = default;
    Grid1D vbar_axis() const;
    Grid1D T_axis() const;
    std::vector<double> betas() const;
};

struct OracleConfig {
    std::vector<double> vbar;     // eV
    std::vector<double> T;        // fs
    int quad_points = 40;
    double window = 0.0;          // fs; 0 derives it from h
    bool operator==(const OracleConfig&) const = default;
};

struct ImpulsiveConfig {
    LineShape::Gate gate = LineShape::Gate::Integrated;
    std::vector<double> tau0_scales;  // convergence study when non-empty
    double window_start = 0.0, window_stop = 0.0;  // eV; 0/0 uses the whole detection axis
    double T_min = 0.0;                            // fs
    bool operator==(const ImpulsiveConfig&) const = default;
};

struct OutputConfig {
    std::string directory = "out";
    bool csv = true;
    bool plots = true;
    Normalization normalization = Normalization::Raw;
    bool cache = true;
    std::string cache_directory;  // empty: <directory>/cache
    bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
    JsaConfig jsa;
    SqueezeSetting squeeze;
    std::vector<double> correlation_betas;
    bool nonresonant_background = false;
    SeedSetting seed;
    KernelConfig kernel;
    std::optional<ExcitonConfig> exciton;
    Polarizations pols;
    std::optional<GridSpec> grids;
    std::optional<BaselineParams> baseline;
    std::optional<OracleConfig> oracle;
    ImpulsiveConfig impulsive;
    OutputConfig output;
    std::vector<Action> actions;
    int threads = 0;

    bool operator==(const RunConfig&) const = default;
    /// Throws Config errors naming the missing block for the requested actions.
    void validate() const;
};

enum class ParseMode { Strict, Lenient };

struct ParseResult {
    RunConfig config;
    std::vector<std::string> warnings;
};

ParseResult parse_config_text(const std::string& text, ParseMode mode = ParseMode::Strict);
ParseResult parse_config(const std::string& path, ParseMode mode = ParseMode::Strict);

/// Canonical text form; parse_config_text(emit_config(c)).config == c.
std::string emit_config(const RunConfig& config);

std::uint64_t fnv1a64(const std::string& data);
std::string hex64(std::uint64_t v);
/// Hash of the canonical text without output location and thread count.
std::uint64_t config_hash(const RunConfig& config);
/// Hash of the blocks that determine the field kernel.
std::uint64_t kernel_key(const RunConfig& config);

}  // namespace sqzppf
