#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "sqzppf/sqzppf.h"

namespace {

struct ConfigHandle {
    sqzppf_config* p = nullptr;
    ~ConfigHandle() { sqzppf_config_free(p); }
};

int fail(sqzppf_status st) {
    std::fprintf(stderr, "sqzppf: error: %s\n", sqzppf_last_error());
    return static_cast<int>(st);
}

int load(const std::string& path, bool lenient, ConfigHandle& h) {
    sqzppf_status st = sqzppf_config_load(path.c_str(), lenient ? 1 : 0, &h.p);
    if (st != SQZPPF_OK) return fail(st);
    for (size_t k = 0; k < sqzppf_config_warning_count(h.p); ++k)
        std::fprintf(stderr, "sqzppf: warning: %s\n", sqzppf_config_warning(h.p, k));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Squeezed-light pump-probe fluorescence simulator"};
    app.set_version_flag("--version", sqzppf_version());
    app.require_subcommand(1);

    std::string config, out, actions;
    bool lenient = false;
    int threads = -1;

    auto* run = app.add_subcommand("run", "Run the actions listed in a config file");
    run->add_option("-c,--config", config, "Config file")->required();
    run->add_option("-o,--out", out, "Output directory (overrides [output] directory)");
    run->add_option("-a,--actions", actions, "Comma-separated actions (overrides [run] actions)");
    run->add_flag("--lenient", lenient, "Downgrade unknown keys to warnings");
    run->add_option("-j,--threads", threads, "Worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);

    auto* dump = app.add_subcommand("dump-model", "Print the exciton model as JSON");
    dump->add_option("-c,--config", config, "Config file")->required();
    dump->add_flag("--lenient", lenient, "Downgrade unknown keys to warnings");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : SQZPPF_E_ARGUMENT;
    }

    ConfigHandle cfg;
    if (int rc = load(config, lenient, cfg)) return rc;

    if (*dump) {
        char* json = nullptr;
        sqzppf_status st = sqzppf_dump_model(cfg.p, &json);
        if (st != SQZPPF_OK) return fail(st);
        std::printf("%s\n", json);
        sqzppf_string_free(json);
        return 0;
    }

    sqzppf_status st = SQZPPF_OK;
    if (!out.empty() && (st = sqzppf_config_set_output_dir(cfg.p, out.c_str())) != SQZPPF_OK) return fail(st);
    if (!actions.empty() && (st = sqzppf_config_set_actions(cfg.p, actions.c_str())) != SQZPPF_OK) return fail(st);
    if (threads >= 0 && (st = sqzppf_config_set_threads(cfg.p, threads)) != SQZPPF_OK) return fail(st);

    sqzppf_manifest* man = nullptr;
    st = sqzppf_run(cfg.p, &man);
    if (st == SQZPPF_OK) {
        const char* keys[] = {"xi", "tau0_fs", "gamma0_meV", "Z", "N_s", "N_i"};
        for (const char* k : keys) {
            double v = 0.0;
            if (sqzppf_manifest_diagnostic(man, k, &v) == SQZPPF_OK) std::printf("%s = %.6g\n", k, v);
        }
    }
    sqzppf_manifest_free(man);
    return st == SQZPPF_OK ? 0 : fail(st);
}
