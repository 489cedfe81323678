#pragma once

#include "ksns/config.hpp"
#include "ksns/dynamics_box.hpp"

#include <string>
#include <vector>

namespace ksns {

/// All floating-point output uses 17 significant digits so CSVs round-trip
/// bit-exactly.
std::string format_g17(double v);

void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticsRow>& rows);

struct Manifest {
    uint64_t config_hash = 0;
    std::string tool_version;
    std::string started;   // wall-clock ISO stringsated at run start/end
    std::string finished;
    std::vector<std::pair<std::string, bool>> criteria; // name, pass
};

void write_manifest(const std::string& path, const Manifest& m);

constexpr const char* tool_version = "ksns 1.0.0";

} // namespace ksns
