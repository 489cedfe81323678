#pragma once

#include "ksns/fourier_grid.hpp"
#include "ksns/radial_grid.hpp"

#include <string>

namespace ksns {

/// Field snapshot container: header {magic "BLLB", version u32, grid kind u8,
/// dims, box/map parameters as f64} followed by row-major f64 samples.
/// Grid kinds: 0 = radial sector field, 1 = periodic box scalar.
namespace snapshot {

constexpr char magic[4] = {'B', 'L', 'L', 'B'};
constexpr uint32_t version = 1;

void write_radial(const std::string& path, const ScalarField& f);
void write_box(const std::string& path, const BoxField& f);

struct Loaded {
    uint8_t kind = 0;
    // radial
    int n = 0, ell = 0;
    double map_scale = 0, r_max = 0;
    // box
    double B = 0;
    std::vector<double> samples;
};

Loaded read(const std::string& path);

} // namespace snapshot
} // namespace ksns
