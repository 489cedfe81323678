#include "ksns/snapshot.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace ksns {
namespace snapshot {

namespace {

template <typename T>
void put(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& is) {
    T v;
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

} // namespace

void write_radial(const std::string& path, const ScalarField& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("snapshot: cannot open " + path);
    os.write(magic, 4);
    put(os, version);
    put(os, static_cast<uint8_t>(0));
    put(os, static_cast<uint32_t>(f.grid->n()));
    put(os, static_cast<uint32_t>(f.ell));
    put(os, f.grid->map_scale());
    put(os, f.grid->r_max());
    os.write(reinterpret_cast<const char*>(f.values.data()),
             static_cast<std::streamsize>(f.values.size() * sizeof(double)));
}

void write_box(const std::string& path, const BoxField& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("snapshot: cannot open " + path);
    os.write(magic, 4);
    put(os, version);
    put(os, static_cast<uint8_t>(1));
    put(os, static_cast<uint32_t>(f.n));
    put(os, f.B);
    os.write(reinterpret_cast<const char*>(f.v.data()),
             static_cast<std::streamsize>(f.v.size() * sizeof(double)));
}

Loaded read(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("snapshot: cannot open " + path);
    char m[4];
    is.read(m, 4);
    if (std::memcmp(m, magic, 4) != 0) throw std::runtime_error("snapshot: bad magic");
    const auto ver = get<uint32_t>(is);
    if (ver != version) throw std::runtime_error("snapshot: unsupported version");
    Loaded out;
    out.kind = get<uint8_t>(is);
    if (out.kind == 0) {
        out.n = static_cast<int>(get<uint32_t>(is));
        out.ell = static_cast<int>(get<uint32_t>(is));
        out.map_scale = get<double>(is);
        out.r_max = get<double>(is);
        out.samples.resize(out.n);
    } else if (out.kind == 1) {
        out.n = static_cast<int>(get<uint32_t>(is));
        out.B = get<double>(is);
        out.samples.resize(static_cast<size_t>(out.n) * out.n * out.n);
    } else {
        throw std::runtime_error("snapshot: unknown grid kind");
    }
    is.read(reinterpret_cast<char*>(out.samples.data()),
            static_cast<std::streamsize>(out.samples.size() * sizeof(double)));
    if (!is) throw std::runtime_error("snapshot: truncated file");
    return out;
}

} // namespace snapshot
} // namespace ksns
