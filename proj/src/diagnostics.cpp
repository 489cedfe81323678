#include "ksns/diagnostics.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ksns {

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticsRow>& rows) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << "tau,t,h_k_stable,b_unstable,u_h1hk1,max_rho,min_rho,max_u,max_gradpi,mass\n";
    for (const auto& r : rows) {
        os << format_g17(r.tau) << ',' << format_g17(r.t) << ','
           << format_g17(r.h_k_stable) << ',' << format_g17(r.b_unstable) << ','
           << format_g17(r.u_h1hk1) << ',' << format_g17(r.max_rho) << ','
           << format_g17(r.min_rho) << ',' << format_g17(r.max_u) << ','
           << format_g17(r.max_gradpi) << ',' << format_g17(r.mass) << '\n';
    }
}

void write_manifest(const std::string& path, const Manifest& m) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << "config_hash = " << m.config_hash << "\n";
    os << "version = " << m.tool_version << "\n";
    os << "started = " << m.started << "\n";
    os << "finished = " << m.finished << "\n";
    for (const auto& [name, pass] : m.criteria)
        os << "criterion." << name << " = " << (pass ? "pass" : "fail") << "\n";
}

} // namespace ksns
