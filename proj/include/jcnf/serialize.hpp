#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "jcnf/tensor.hpp"

namespace jcnf {

// Named parameter blocks as stored in a "JCNP" file. Entry order is
// preserved; files round-trip bit-exactly.
struct ParamFile {
    struct Entry {
        std::string name;
        std::uint32_t shape[4]; // (d0, d1, d2, d3)
        std::vector<double> values; // row-major, little-endian float64 on disk
    };
    std::vector<Entry> entries;

    void add(const std::string& name, std::uint32_t d0, std::uint32_t d1,
             std::uint32_t d2, std::uint32_t d3, const std::vector<double>& v);
    void add_layer(const std::string& name, const LayerParams& p);
    const Entry* find(const std::string& name) const;
    LayerParams layer(const std::string& name) const;
};

// File layout: magic "JCNP", version u32, then per entry:
// name length u32, UTF-8 name bytes, shape as four u32, float64 payload.
// All integers and floats little-endian.
void write_params(const std::string& path, const ParamFile& pf);
ParamFile read_params(const std::string& path);

// Float raster: magic "JCNR", u32 H, W, C, float64 payload (row-major y,x,c).
void write_raster(const std::string& path, const Tensor& t);
Tensor read_raster(const std::string& path);

} // namespace jcnf
