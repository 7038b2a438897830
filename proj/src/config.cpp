#include "sqzppf/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace sqzppf {

namespace {

enum class Dim { Energy, Time };

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, ',')) {
        const std::string t = trim(cur);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
};

class Document {
public:
    std::map<std::string, std::map<std::string, Entry>> sections;
    std::vector<std::string> warnings;

    bool has(const std::string& sec) const { return sections.count(sec) != 0; }

    const Entry* find(const std::string& sec, const std::string& key) {
        auto s = sections.find(sec);
        if (s == sections.end()) return nullptr;
        auto e = s->second.find(key);
        if (e == s->second.end()) return nullptr;
        e->second.used = true;
        return &e->second;
    }
};

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::Config, msg); }

std::string where(const std::string& sec, const std::string& key, const Entry& e) {
    return "[" + sec + "] " + key + " (line " + std::to_string(e.line) + ")";
}

double parse_number_text(const std::string& text, const std::string& ctx) {
    const std::string t = trim(text);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v)) fail(ctx + ": expected a number, got '" + text + "'");
    return v;
}

// Shifts the decimal exponent in text so "82.7" with -3 parses exactly like "0.0827".
double parse_scaled(const std::string& num, int shift, const std::string& ctx) {
    std::string mant = num;
    long exp10 = 0;
    const auto epos = num.find_first_of("eE");
    if (epos != std::string::npos) {
        mant = num.substr(0, epos);
        exp10 = static_cast<long>(parse_number_text(num.substr(epos + 1), ctx));
    }
    return parse_number_text(mant + "e" + std::to_string(exp10 + shift), ctx);
}

double parse_dimensioned(const std::string& text, Dim dim, const std::string& ctx) {
    const std::string t = trim(text);
    std::size_t k = t.size();
    while (k > 0 && std::isalpha(static_cast<unsigned char>(t[k - 1]))) --k;
    const std::string num = trim(t.substr(0, k));
    const std::string unit = t.substr(k);
    const char* expected = dim == Dim::Energy ? "energy unit (eV or meV)" : "time unit (fs or ps)";
    if (unit.empty()) fail(ctx + ": missing unit suffix, expected " + expected);
    int shift = 0;
    if (dim == Dim::Energy && unit == "eV")
        shift = 0;
    else if (dim == Dim::Energy && unit == "meV")
        shift = -3;
    else if (dim == Dim::Time && unit == "fs")
        shift = 0;
    else if (dim == Dim::Time && unit == "ps")
        shift = 3;
    else
        fail(ctx + ": unit '" + unit + "' does not match, expected " + expected);
    return parse_scaled(num, shift, ctx);
}

class Reader {
public:
    Reader(Document& d, std::string sec) : doc_(d), sec_(std::move(sec)) {}

    std::optional<std::string> raw(const std::string& key) {
        const Entry* e = doc_.find(sec_, key);
        if (!e) return std::nullopt;
        last_ = where(sec_, key, *e);
        return e->value;
    }
    void energy(const std::string& key, double& out, bool required = false) { dim(key, out, Dim::Energy, required); }
    void time(const std::string& key, double& out, bool required = false) { dim(key, out, Dim::Time, required); }
    void number(const std::string& key, double& out, bool required = false) {
        if (auto v = get(key, required)) out = parse_number_text(*v, last_);
    }
    void integer(const std::string& key, std::size_t& out) {
        if (auto v = get(key, false)) {
            const double d = parse_number_text(*v, last_);
            if (d < 1 || d != std::floor(d)) fail(last_ + ": expected a positive integer");
            out = static_cast<std::size_t>(d);
        }
    }
    void integer(const std::string& key, int& out) {
        if (auto v = get(key, false)) {
            const double d = parse_number_text(*v, last_);
            if (d != std::floor(d)) fail(last_ + ": expected an integer");
            out = static_cast<int>(d);
        }
    }
    void boolean(const std::string& key, bool& out) {
        if (auto v = get(key, false)) {
            const std::string t = trim(*v);
            if (t == "true")
                out = true;
            else if (t == "false")
                out = false;
            else
                fail(last_ + ": expected true or false");
        }
    }
    void text(const std::string& key, std::string& out) {
        if (auto v = get(key, false)) out = trim(*v);
    }
    void numbers(const std::string& key, std::vector<double>& out) {
        if (auto v = get(key, false)) {
            out.clear();
            for (const auto& s : split_list(*v)) out.push_back(parse_number_text(s, last_));
        }
    }
    void list(const std::string& key, std::vector<double>& out, Dim d) {
        if (auto v = get(key, false)) {
            out.clear();
            for (const auto& s : split_list(*v)) out.push_back(parse_dimensioned(s, d, last_));
        }
    }
    const std::string& context() const { return last_; }

private:
    std::optional<std::string> get(const std::string& key, bool required) {
        auto v = raw(key);
        if (!v && required) fail("[" + sec_ + "] is missing required key '" + key + "'");
        return v;
    }
    void dim(const std::string& key, double& out, Dim d, bool required) {
        if (auto v = get(key, required)) out = parse_dimensioned(*v, d, last_);
    }
    Document& doc_;
    std::string sec_;
    std::string last_;
};

Document tokenize(const std::string& text) {
    Document doc;
    std::istringstream is(text);
    std::string line, section;
    int n = 0;
    while (std::getline(is, line)) {
        ++n;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail("line " + std::to_string(n) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (doc.has(section)) fail("line " + std::to_string(n) + ": duplicate section [" + section + "]");
            doc.sections[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("line " + std::to_string(n) + ": expected key = value");
        if (section.empty()) fail("line " + std::to_string(n) + ": key outside of any section");
        const std::string key = trim(line.substr(0, eq));
        auto& sec = doc.sections[section];
        if (sec.count(key)) fail("line " + std::to_string(n) + ": duplicate key '" + key + "'");
        sec[key] = Entry{trim(line.substr(eq + 1)), n, false};
    }
    return doc;
}

Polarization parse_pol(const std::string& s, const std::string& ctx) {
    const std::string t = trim(s);
    if (t == "sigma+") return Polarization::SigmaPlus;
    if (t == "sigma-") return Polarization::SigmaMinus;
    fail(ctx + ": expected sigma+ or sigma-");
}

}  // namespace

const char* action_name(Action a) {
    switch (a) {
        case Action::Correlation: return "correlation";
        case Action::Fluxes: return "fluxes";
        case Action::Spectrum: return "spectrum";
        case Action::Impulsive: return "impulsive";
        case Action::Baseline: return "baseline";
        case Action::Oracle: return "oracle";
        case Action::DumpModel: return "dump-model";
    }
    return "?";
}

std::optional<Action> parse_action(const std::string& name) {
    for (Action a : {Action::Correlation, Action::Fluxes, Action::Spectrum, Action::Impulsive, Action::Baseline,
                     Action::Oracle, Action::DumpModel})
        if (name == action_name(a)) return a;
    return std::nullopt;
}

std::vector<Action> parse_action_list(const std::string& text) {
    std::vector<Action> out;
    for (const auto& s : split_list(text)) {
        const auto a = parse_action(s);
        if (!a) fail("unknown action '" + s + "'");
        out.push_back(*a);
    }
    return out;
}

Grid1D GridSpec::vbar_axis() const { return Grid1D::from_range(vbar_start, vbar_stop, vbar_step, Unit::ElectronVolt); }
Grid1D GridSpec::T_axis() const { return Grid1D::from_range(T_start, T_stop, T_step, Unit::Femtosecond); }
std::vector<double> GridSpec::betas() const { return Grid1D::from_range(beta_start, beta_stop, beta_step, Unit::Dimensionless).points(); }

void RunConfig::validate() const {
    jsa.params.validate();
    squeeze.validate();
    seed.validate();
    if (nonresonant_background)
        throw Error(ErrorCode::NotImplemented, "nonresonant_background: the nonresonant correlator terms are not implemented");
    for (Action a : actions) {
        const std::string name = action_name(a);
        const bool model = a == Action::Spectrum || a == Action::Impulsive || a == Action::Baseline ||
                           a == Action::Oracle || a == Action::DumpModel;
        if (model && !exciton) fail("action '" + name + "' requires the [exciton] block");
        const bool maps = a == Action::Spectrum || a == Action::Impulsive || a == Action::Baseline;
        if (maps && !grids) fail("action '" + name + "' requires the [grids] block");
        if (a == Action::Baseline && !baseline) fail("action 'baseline' requires the [baseline] block");
        if (a == Action::Oracle && !oracle) fail("action 'oracle' requires the [oracle] block");
    }
    if (grids) {
        if (!(grids->vbar_stop > grids->vbar_start) || !(grids->T_stop > grids->T_start) ||
            !(grids->beta_stop > grids->beta_start))
            fail("[grids] ranges must be non-empty");
        if (!(grids->vbar_step > 0) || !(grids->T_step > 0) || !(grids->beta_step > 0))
            fail("[grids] steps must be positive");
    }
    if (oracle && (oracle->vbar.empty() || oracle->T.empty())) fail("[oracle] needs vbar and T probe lists");
    if (baseline) baseline->validate();
}

ParseResult parse_config_text(const std::string& text, ParseMode mode) {
    Document doc = tokenize(text);
    ParseResult res;
    RunConfig& c = res.config;

    for (const char* req : {"jsa", "squeeze"})
        if (!doc.has(req)) fail(std::string("missing required block [") + req + "]");

    {
        Reader r(doc, "jsa");
        double cs = 0, ci = 0, sp = 0, sm = 0;
        r.energy("central_s", cs, true);
        r.energy("central_i", ci, true);
        r.energy("sigma_plus", sp, true);
        r.energy("sigma_minus", sm, true);
        if (!(sp > 0) || !(sm > 0)) fail("[jsa] widths must be positive");
        c.jsa.params = JsaParams::from_centers(cs, ci, sp, sm);
        r.integer("grid_points", c.jsa.grid_points);
        r.number("span_sigmas", c.jsa.span_sigmas);
        r.number("schmidt_tol", c.jsa.schmidt_tol);
        double xi = 0;
        if (r.raw("expect_xi")) {
            r.number("expect_xi", xi);
            c.jsa.expected_xi = xi;
        }
    }
    {
        Reader r(doc, "squeeze");
        r.number("beta", c.squeeze.beta, true);
        r.number("theta", c.squeeze.theta);
        r.numbers("correlation_betas", c.correlation_betas);
        r.boolean("nonresonant_background", c.nonresonant_background);
    }
    if (doc.has("seed")) {
        Reader r(doc, "seed");
        r.number("alpha_sq", c.seed.alpha_sq);
        if (r.raw("per_mode")) {
            std::vector<double> v;
            r.numbers("per_mode", v);
            c.seed.per_mode = v;
        }
    }
    if (doc.has("kernel")) {
        Reader r(doc, "kernel");
        r.integer("pad_factor", c.kernel.pad_factor);
        r.number("gate_extent", c.kernel.gate_extent);
    }
    if (doc.has("polarization")) {
        Reader r(doc, "polarization");
        if (auto v = r.raw("s")) c.pols.s = parse_pol(*v, r.context());
        if (auto v = r.raw("i")) c.pols.i = parse_pol(*v, r.context());
    }
    if (doc.has("exciton")) {
        Reader r(doc, "exciton");
        ExcitonConfig e;
        r.energy("bright_A", e.bright_energy_A);
        r.energy("bright_B", e.bright_energy_B);
        r.energy("dark_offset_A", e.dark_offset_A);
        r.energy("dark_offset_B", e.dark_offset_B);
        r.energy("bright_width", e.bright_width);
        r.energy("dark_width", e.dark_width);
        r.energy("J_A", e.exchange_J_A);
        r.energy("J_B", e.exchange_J_B);
        r.energy("g_A", e.bright_dark_g_A);
        r.energy("g_B", e.bright_dark_g_B);
        r.energy("binding_AA", e.binding_AA);
        r.energy("binding_BB", e.binding_BB);
        r.energy("binding_AB", e.binding_AB);
        r.energy("binding_dark_bright_A", e.binding_dark_bright_A);
        r.energy("binding_dark_bright_B", e.binding_dark_bright_B);
        r.boolean("intravalley_pairs", e.intravalley_pairs);
        r.energy("intravalley_binding_A", e.intravalley_binding_A);
        r.energy("intravalley_binding_B", e.intravalley_binding_B);
        r.number("dipole_A", e.dipole_A);
        r.number("dipole_B", e.dipole_B);
        r.energy("ground_energy", e.ground_energy);
        if (auto v = r.raw("levels")) e.levels = split_list(*v);
        auto& sec = doc.sections["exciton"];
        for (auto& [key, entry] : sec) {
            if (key.rfind("coupling.", 0) != 0) continue;
            entry.used = true;
            const std::string rest = key.substr(9);
            const auto dot = rest.find('.');
            const std::string ctx = where("exciton", key, entry);
            if (dot == std::string::npos) fail(ctx + ": expected coupling.<from>.<to>");
            const auto parts = split_list(entry.value);
            if (parts.empty() || parts.size() > 2) fail(ctx + ": expected '<re>' or '<re>, <im>' energies");
            const double re = parse_dimensioned(parts[0], Dim::Energy, ctx);
            const double im = parts.size() == 2 ? parse_dimensioned(parts[1], Dim::Energy, ctx) : 0.0;
            e.couplings.push_back({rest.substr(0, dot), rest.substr(dot + 1), Complex(re, im)});
        }
        c.exciton = e;
    }
    if (doc.has("grids")) {
        Reader r(doc, "grids");
        GridSpec g;
        r.energy("vbar_start", g.vbar_start);
        r.energy("vbar_stop", g.vbar_stop);
        r.energy("vbar_step", g.vbar_step);
        r.time("T_start", g.T_start);
        r.time("T_stop", g.T_stop);
        r.time("T_step", g.T_step);
        r.number("beta_start", g.beta_start);
        r.number("beta_stop", g.beta_stop);
        r.number("beta_step", g.beta_step);
        c.grids = g;
    }
    if (doc.has("baseline")) {
        Reader r(doc, "baseline");
        BaselineParams b;
        r.energy("sigma_pump", b.sigma_pump, true);
        r.energy("sigma_probe", b.sigma_probe, true);
        r.time("duration_pump", b.duration_pump, true);
        if (r.raw("omega_pump")) {
            double w = 0;
            r.energy("omega_pump", w);
            b.omega_pump = w;
        }
        c.baseline = b;
    }
    if (doc.has("oracle")) {
        Reader r(doc, "oracle");
        OracleConfig o;
        r.list("vbar", o.vbar, Dim::Energy);
        r.list("T", o.T, Dim::Time);
        r.integer("quad_points", o.quad_points);
        r.time("window", o.window);
        c.oracle = o;
    }
    if (doc.has("impulsive")) {
        Reader r(doc, "impulsive");
        std::string ls;
        r.text("lineshape", ls);
        if (ls == "integrated" || ls.empty())
            c.impulsive.gate = LineShape::Gate::Integrated;
        else if (ls == "at-zero")
            c.impulsive.gate = LineShape::Gate::AtZero;
        else
            fail(r.context() + ": expected integrated or at-zero");
        r.numbers("tau0_scales", c.impulsive.tau0_scales);
        r.energy("window_start", c.impulsive.window_start);
        r.energy("window_stop", c.impulsive.window_stop);
        r.time("T_min", c.impulsive.T_min);
    }
    if (doc.has("output")) {
        Reader r(doc, "output");
        r.text("directory", c.output.directory);
        if (auto v = r.raw("formats")) {
            c.output.csv = c.output.plots = false;
            for (const auto& f : split_list(*v)) {
                if (f == "csv")
                    c.output.csv = true;
                else if (f == "plot")
                    c.output.plots = true;
                else
                    fail(r.context() + ": unknown format '" + f + "'");
            }
        }
        std::string norm;
        r.text("normalization", norm);
        if (norm == "raw" || norm.empty())
            c.output.normalization = Normalization::Raw;
        else if (norm == "unit-peak")
            c.output.normalization = Normalization::UnitPeak;
        else
            fail(r.context() + ": expected raw or unit-peak");
        r.boolean("cache", c.output.cache);
        r.text("cache_directory", c.output.cache_directory);
    }
    if (doc.has("run")) {
        Reader r(doc, "run");
        if (auto v = r.raw("actions")) c.actions = parse_action_list(*v);
        r.integer("threads", c.threads);
    }

    static const char* known[] = {"jsa", "squeeze", "seed", "kernel", "polarization", "exciton", "grids",
                                  "baseline", "oracle", "impulsive", "output", "run"};
    for (auto& [sec, entries] : doc.sections) {
        bool ok = false;
        for (const char* k : known) ok = ok || sec == k;
        if (!ok) {
            const std::string msg = "unknown block [" + sec + "]";
            if (mode == ParseMode::Strict) fail(msg);
            res.warnings.push_back(msg);
            continue;
        }
        for (auto& [key, e] : entries) {
            if (e.used) continue;
            const std::string msg = "unknown key " + where(sec, key, e);
            if (mode == ParseMode::Strict) fail(msg);
            res.warnings.push_back(msg);
        }
    }
    c.validate();
    return res;
}

ParseResult parse_config(const std::string& path, ParseMode mode) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), mode);
}

std::string emit_config(const RunConfig& c) {
    std::ostringstream o;
    const auto E = [](double v) { return fmt(v) + "eV"; };
    const auto F = [](double v) { return fmt(v) + "fs"; };
    const auto join = [](const std::vector<double>& v, auto f) {
        std::string s;
        for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + f(v[k]);
        return s;
    };
    const auto plain = [](double v) { return fmt(v); };

    o << "[jsa]\n";
    o << "central_s = " << E(c.jsa.params.central_s) << "\n";
    o << "central_i = " << E(c.jsa.params.central_i) << "\n";
    o << "sigma_plus = " << E(c.jsa.params.sigma_plus) << "\n";
    o << "sigma_minus = " << E(c.jsa.params.sigma_minus) << "\n";
    o << "grid_points = " << c.jsa.grid_points << "\n";
    o << "span_sigmas = " << fmt(c.jsa.span_sigmas) << "\n";
    o << "schmidt_tol = " << fmt(c.jsa.schmidt_tol) << "\n";
    if (c.jsa.expected_xi) o << "expect_xi = " << fmt(*c.jsa.expected_xi) << "\n";

    o << "\n[squeeze]\n";
    o << "beta = " << fmt(c.squeeze.beta) << "\n";
    o << "theta = " << fmt(c.squeeze.theta) << "\n";
    if (!c.correlation_betas.empty()) o << "correlation_betas = " << join(c.correlation_betas, plain) << "\n";
    o << "nonresonant_background = " << (c.nonresonant_background ? "true" : "false") << "\n";

    o << "\n[seed]\n";
    o << "alpha_sq = " << fmt(c.seed.alpha_sq) << "\n";
    if (c.seed.per_mode) o << "per_mode = " << join(*c.seed.per_mode, plain) << "\n";

    o << "\n[kernel]\n";
    o << "pad_factor = " << c.kernel.pad_factor << "\n";
    o << "gate_extent = " << fmt(c.kernel.gate_extent) << "\n";

    o << "\n[polarization]\n";
    o << "s = " << polarization_name(c.pols.s) << "\n";
    o << "i = " << polarization_name(c.pols.i) << "\n";

    if (c.exciton) {
        const auto& e = *c.exciton;
        o << "\n[exciton]\n";
        o << "bright_A = " << E(e.bright_energy_A) << "\n";
        o << "bright_B = " << E(e.bright_energy_B) << "\n";
        o << "dark_offset_A = " << E(e.dark_offset_A) << "\n";
        o << "dark_offset_B = " << E(e.dark_offset_B) << "\n";
        o << "bright_width = " << E(e.bright_width) << "\n";
        o << "dark_width = " << E(e.dark_width) << "\n";
        o << "J_A = " << E(e.exchange_J_A) << "\n";
        o << "J_B = " << E(e.exchange_J_B) << "\n";
        o << "g_A = " << E(e.bright_dark_g_A) << "\n";
        o << "g_B = " << E(e.bright_dark_g_B) << "\n";
        o << "binding_AA = " << E(e.binding_AA) << "\n";
        o << "binding_BB = " << E(e.binding_BB) << "\n";
        o << "binding_AB = " << E(e.binding_AB) << "\n";
        o << "binding_dark_bright_A = " << E(e.binding_dark_bright_A) << "\n";
        o << "binding_dark_bright_B = " << E(e.binding_dark_bright_B) << "\n";
        o << "intravalley_pairs = " << (e.intravalley_pairs ? "true" : "false") << "\n";
        o << "intravalley_binding_A = " << E(e.intravalley_binding_A) << "\n";
        o << "intravalley_binding_B = " << E(e.intravalley_binding_B) << "\n";
        o << "dipole_A = " << fmt(e.dipole_A) << "\n";
        o << "dipole_B = " << fmt(e.dipole_B) << "\n";
        o << "ground_energy = " << E(e.ground_energy) << "\n";
        if (!e.levels.empty()) {
            o << "levels = ";
            for (std::size_t k = 0; k < e.levels.size(); ++k) o << (k ? ", " : "") << e.levels[k];
            o << "\n";
        }
        for (const auto& cp : e.couplings) {
            o << "coupling." << cp.from << "." << cp.to << " = " << E(cp.value.real());
            if (cp.value.imag() != 0.0) o << ", " << E(cp.value.imag());
            o << "\n";
        }
    }
    if (c.grids) {
        const auto& g = *c.grids;
        o << "\n[grids]\n";
        o << "vbar_start = " << E(g.vbar_start) << "\n";
        o << "vbar_stop = " << E(g.vbar_stop) << "\n";
        o << "vbar_step = " << E(g.vbar_step) << "\n";
        o << "T_start = " << F(g.T_start) << "\n";
        o << "T_stop = " << F(g.T_stop) << "\n";
        o << "T_step = " << F(g.T_step) << "\n";
        o << "beta_start = " << fmt(g.beta_start) << "\n";
        o << "beta_stop = " << fmt(g.beta_stop) << "\n";
        o << "beta_step = " << fmt(g.beta_step) << "\n";
    }
    if (c.baseline) {
        const auto& b = *c.baseline;
        o << "\n[baseline]\n";
        o << "sigma_pump = " << E(b.sigma_pump) << "\n";
        o << "sigma_probe = " << E(b.sigma_probe) << "\n";
        o << "duration_pump = " << F(b.duration_pump) << "\n";
        if (b.omega_pump) o << "omega_pump = " << E(*b.omega_pump) << "\n";
    }
    if (c.oracle) {
        const auto& r = *c.oracle;
        o << "\n[oracle]\n";
        o << "vbar = " << join(r.vbar, E) << "\n";
        o << "T = " << join(r.T, F) << "\n";
        o << "quad_points = " << r.quad_points << "\n";
        o << "window = " << F(r.window) << "\n";
    }
    o << "\n[impulsive]\n";
    o << "lineshape = " << (c.impulsive.gate == LineShape::Gate::Integrated ? "integrated" : "at-zero") << "\n";
    if (!c.impulsive.tau0_scales.empty()) o << "tau0_scales = " << join(c.impulsive.tau0_scales, plain) << "\n";
    o << "window_start = " << E(c.impulsive.window_start) << "\n";
    o << "window_stop = " << E(c.impulsive.window_stop) << "\n";
    o << "T_min = " << F(c.impulsive.T_min) << "\n";

    o << "\n[output]\n";
    o << "directory = " << c.output.directory << "\n";
    std::string formats;
    if (c.output.csv) formats += "csv";
    if (c.output.plots) formats += formats.empty() ? "plot" : ", plot";
    if (!formats.empty()) o << "formats = " << formats << "\n";
    else o << "formats = \n";
    o << "normalization = " << (c.output.normalization == Normalization::Raw ? "raw" : "unit-peak") << "\n";
    o << "cache = " << (c.output.cache ? "true" : "false") << "\n";
    if (!c.output.cache_directory.empty()) o << "cache_directory = " << c.output.cache_directory << "\n";

    o << "\n[run]\n";
    o << "actions = ";
    for (std::size_t k = 0; k < c.actions.size(); ++k) o << (k ? ", " : "") << action_name(c.actions[k]);
    o << "\n";
    o << "threads = " << c.threads << "\n";
    return o.str();
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::uint64_t config_hash(const RunConfig& config) {
    RunConfig c = config;
    c.output.directory.clear();
    c.output.cache_directory.clear();
    c.threads = 0;
    return fnv1a64(emit_config(c));
}

std::uint64_t kernel_key(const RunConfig& c) {
    std::ostringstream o;
    o << "kernel-v1|" << fmt(c.jsa.params.central_s) << "|" << fmt(c.jsa.params.central_i) << "|"
      << fmt(c.jsa.params.sigma_plus) << "|" << fmt(c.jsa.params.sigma_minus) << "|" << c.jsa.grid_points << "|"
      << fmt(c.jsa.span_sigmas) << "|" << fmt(c.jsa.schmidt_tol) << "|" << fmt(c.squeeze.beta) << "|"
      << fmt(c.squeeze.theta) << "|" << c.kernel.pad_factor << "|" << fmt(c.kernel.gate_extent);
    return fnv1a64(o.str());
}

}  // namespace sqzppf
