#include "sqzppf/sqzppf.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "sqzppf/pipeline.hpp"

struct sqzppf_config {
    sqzppf::ParseResult parsed;
};

struct sqzppf_manifest {
    sqzppf::RunManifest manifest;
    std::string json;
};

namespace {

thread_local std::string g_last_error;

sqzppf_status to_status(sqzppf::ErrorCode code) {
    if (code == sqzppf::ErrorCode::NullInput) return SQZPPF_E_ARGUMENT;
    return static_cast<sqzppf_status>(sqzppf::exit_status(code));
}

template <class F>
sqzppf_status guarded(F&& body) {
    g_last_error.clear();
    try {
        body();
        return SQZPPF_OK;
    } catch (const sqzppf::Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return SQZPPF_E_NUMERICAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return SQZPPF_E_NUMERICAL;
    }
}

sqzppf_status bad_arg(const char* what) {
    g_last_error = std::string("null argument: ") + what;
    return SQZPPF_E_ARGUMENT;
}

}  // namespace

extern "C" {

const char* sqzppf_version(void) { return sqzppf::tool_version(); }

const char* sqzppf_last_error(void) { return g_last_error.c_str(); }

sqzppf_status sqzppf_config_load(const char* path, int lenient, sqzppf_config** out) {
    if (!path) return bad_arg("path");
    if (!out) return bad_arg("out");
    *out = nullptr;
    return guarded([&] {
        auto* c = new sqzppf_config{sqzppf::parse_config(path, lenient ? sqzppf::ParseMode::Lenient : sqzppf::ParseMode::Strict)};
        *out = c;
    });
}

void sqzppf_config_free(sqzppf_config* cfg) { delete cfg; }

sqzppf_status sqzppf_config_set_output_dir(sqzppf_config* cfg, const char* dir) {
    if (!cfg) return bad_arg("cfg");
    if (!dir || !*dir) return bad_arg("dir");
    return guarded([&] {
        cfg->parsed.config.output.directory = dir;
    });
}

sqzppf_status sqzppf_config_set_actions(sqzppf_config* cfg, const char* actions) {
    if (!cfg) return bad_arg("cfg");
    if (!actions) return bad_arg("actions");
    return guarded([&] { cfg->parsed.config.actions = sqzppf::parse_action_list(actions); });
}

sqzppf_status sqzppf_config_set_threads(sqzppf_config* cfg, int threads) {
    if (!cfg) return bad_arg("cfg");
    if (threads < 0) {
        g_last_error = "threads must be >= 0";
        return SQZPPF_E_ARGUMENT;
    }
    cfg->parsed.config.threads = threads;
    g_last_error.clear();
    return SQZPPF_OK;
}

size_t sqzppf_config_warning_count(const sqzppf_config* cfg) { return cfg ? cfg->parsed.warnings.size() : 0; }

const char* sqzppf_config_warning(const sqzppf_config* cfg, size_t index) {
    if (!cfg || index >= cfg->parsed.warnings.size()) return nullptr;
    return cfg->parsed.warnings[index].c_str();
}

sqzppf_status sqzppf_run(const sqzppf_config* cfg, sqzppf_manifest** out) {
    if (!cfg) return bad_arg("cfg");
    if (out) *out = nullptr;
    sqzppf::RunManifest man;
    sqzppf_status st = guarded([&] { man = sqzppf::run(cfg->parsed.config); });
    if (st != SQZPPF_OK) {
        // The manifest on disk carries the partial record; rebuild a minimal copy here.
        man.error = g_last_error;
        man.status = st;
        man.tool_version = sqzppf::tool_version();
        man.config_hash = sqzppf::hex64(sqzppf::config_hash(cfg->parsed.config));
    }
    if (out) {
        auto* m = new sqzppf_manifest{man, man.to_json()};
        *out = m;
    }
    return st;
}

void sqzppf_manifest_free(sqzppf_manifest* m) { delete m; }

sqzppf_status sqzppf_manifest_diagnostic(const sqzppf_manifest* m, const char* name, double* value) {
    if (!m) return bad_arg("manifest");
    if (!name) return bad_arg("name");
    if (!value) return bad_arg("value");
    auto it = m->manifest.diagnostics.find(name);
    if (it == m->manifest.diagnostics.end()) {
        g_last_error = std::string("no diagnostic named ") + name;
        return SQZPPF_E_ARGUMENT;
    }
    *value = it->second;
    g_last_error.clear();
    return SQZPPF_OK;
}

const char* sqzppf_manifest_json(const sqzppf_manifest* m) { return m ? m->json.c_str() : nullptr; }

sqzppf_status sqzppf_dump_model(const sqzppf_config* cfg, char** json) {
    if (!cfg) return bad_arg("cfg");
    if (!json) return bad_arg("json");
    *json = nullptr;
    return guarded([&] {
        if (!cfg->parsed.config.exciton)
            throw sqzppf::Error(sqzppf::ErrorCode::Config, "dump-model requires an [exciton] block");
        const std::string s = sqzppf::dump_model(sqzppf::ExcitonModel::build(*cfg->parsed.config.exciton));
        char* buf = static_cast<char*>(std::malloc(s.size() + 1));
        if (!buf) throw std::bad_alloc();
        std::memcpy(buf, s.c_str(), s.size() + 1);
        *json = buf;
    });
}

void sqzppf_string_free(char* s) { std::free(s); }

}  // extern "C"
