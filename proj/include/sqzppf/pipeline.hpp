#pragma once

#include <map>
#include <string>
#include <vector>

#include "sqzppf/config.hpp"

namespace sqzppf {

const char* tool_version();

struct ActionRecord {
    std::string name;
    double wall_clock_s = 0.0;
    std::vector<std::string> files;
};

struct RunManifest {
    std::string config_hash;
    std::string tool_version;
    std::vector<ActionRecord> actions;
    std::map<std::string, double> diagnostics;
    std::vector<std::string> notes;
    std::string error;
    int status = 0;

    std::string to_json() const;
};

/// Runs the configured actions in dependency order and writes data files, plot scripts and
/// manifest.json into config.output.directory. Module errors are rethrown as Error with the
/// action name prefixed, after the manifest has been written.
RunManifest run(const RunConfig& config);

}  // namespace sqzppf
