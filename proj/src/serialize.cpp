#include "jcnf/serialize.hpp"

#include <cstdio>
#include <cstring>
#include <memory>
#include <stdexcept>

namespace jcnf {

namespace {

static_assert(sizeof(double) == 8, "IEEE-754 binary64 required");

struct FileCloser {
    void operator()(std::FILE* f) const { if (f) std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_or_throw(const std::string& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) throw std::runtime_error("cannot open " + path);
    return f;
}

void put_u32(std::FILE* f, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    if (std::fwrite(b, 1, 4, f) != 4) throw std::runtime_error("write failed");
}

bool get_u32(std::FILE* f, std::uint32_t& v) {
    unsigned char b[4];
    if (std::fread(b, 1, 4, f) != 4) return false;
    v = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
        (static_cast<std::uint32_t>(b[2]) << 16) |
        (static_cast<std::uint32_t>(b[3]) << 24);
    return true;
}

void put_f64(std::FILE* f, const double* v, std::size_t n) {
    // Little-endian host assumed; byte-swap would go here otherwise.
    if (std::fwrite(v, 8, n, f) != n) throw std::runtime_error("write failed");
}

void get_f64(std::FILE* f, double* v, std::size_t n) {
    if (std::fread(v, 8, n, f) != n) throw std::runtime_error("truncated float payload");
}

constexpr std::uint32_t kParamVersion = 1;

} // namespace

void ParamFile::add(const std::string& name, std::uint32_t d0, std::uint32_t d1,
                    std::uint32_t d2, std::uint32_t d3,
                    const std::vector<double>& v) {
    if (static_cast<std::uint64_t>(d0) * d1 * d2 * d3 != v.size())
        throw std::invalid_argument("ParamFile::add: shape/payload mismatch for " + name);
    entries.push_back(Entry{name, {d0, d1, d2, d3}, v});
}

void ParamFile::add_layer(const std::string& name, const LayerParams& p) {
    add(name + ".kernel", p.out_channels, p.in_channels, p.kernel_h, p.kernel_w,
        p.kernels);
    add(name + ".bias", p.out_channels, 1, 1, 1, p.biases);
}

const ParamFile::Entry* ParamFile::find(const std::string& name) const {
    for (const auto& e : entries)
        if (e.name == name) return &e;
    return nullptr;
}

LayerParams ParamFile::layer(const std::string& name) const {
    const Entry* k = find(name + ".kernel");
    const Entry* b = find(name + ".bias");
    if (!k || !b) throw std::runtime_error("missing parameter block " + name);
    LayerParams p(static_cast<int>(k->shape[0]), static_cast<int>(k->shape[1]),
                  static_cast<int>(k->shape[2]), static_cast<int>(k->shape[3]));
    p.kernels = k->values;
    if (b->values.size() != p.biases.size())
        throw std::runtime_error("bias size mismatch for " + name);
    p.biases = b->values;
    return p;
}

void write_params(const std::string& path, const ParamFile& pf) {
    FilePtr f = open_or_throw(path, "wb");
    if (std::fwrite("JCNP", 1, 4, f.get()) != 4) throw std::runtime_error("write failed");
    put_u32(f.get(), kParamVersion);
    for (const auto& e : pf.entries) {
        put_u32(f.get(), static_cast<std::uint32_t>(e.name.size()));
        if (std::fwrite(e.name.data(), 1, e.name.size(), f.get()) != e.name.size())
            throw std::runtime_error("write failed");
        for (int i = 0; i < 4; ++i) put_u32(f.get(), e.shape[i]);
        put_f64(f.get(), e.values.data(), e.values.size());
    }
}

ParamFile read_params(const std::string& path) {
    FilePtr f = open_or_throw(path, "rb");
    char magic[4];
    if (std::fread(magic, 1, 4, f.get()) != 4 || std::memcmp(magic, "JCNP", 4) != 0)
        throw std::runtime_error(path + ": not a JCNP parameter file");
    std::uint32_t version;
    if (!get_u32(f.get(), version) || version != kParamVersion)
        throw std::runtime_error(path + ": unsupported JCNP version");
    ParamFile pf;
    std::uint32_t name_len;
    while (get_u32(f.get(), name_len)) {
        ParamFile::Entry e;
        e.name.resize(name_len);
        if (name_len > 0 &&
            std::fread(e.name.data(), 1, name_len, f.get()) != name_len)
            throw std::runtime_error(path + ": truncated entry name");
        std::uint64_t count = 1;
        for (int i = 0; i < 4; ++i) {
            if (!get_u32(f.get(), e.shape[i]))
                throw std::runtime_error(path + ": truncated shape");
            count *= e.shape[i];
        }
        e.values.resize(count);
        get_f64(f.get(), e.values.data(), count);
        pf.entries.push_back(std::move(e));
    }
    return pf;
}

void write_raster(const std::string& path, const Tensor& t) {
    FilePtr f = open_or_throw(path, "wb");
    if (std::fwrite("JCNR", 1, 4, f.get()) != 4) throw std::runtime_error("write failed");
    put_u32(f.get(), static_cast<std::uint32_t>(t.height));
    put_u32(f.get(), static_cast<std::uint32_t>(t.width));
    put_u32(f.get(), static_cast<std::uint32_t>(t.channels));
    put_f64(f.get(), t.data.data(), t.data.size());
}

Tensor read_raster(const std::string& path) {
    FilePtr f = open_or_throw(path, "rb");
    char magic[4];
    if (std::fread(magic, 1, 4, f.get()) != 4 || std::memcmp(magic, "JCNR", 4) != 0)
        throw std::runtime_error(path + ": not a JCNR raster file");
    std::uint32_t h, w, c;
    if (!get_u32(f.get(), h) || !get_u32(f.get(), w) || !get_u32(f.get(), c))
        throw std::runtime_error(path + ": truncated raster header");
    Tensor t(static_cast<int>(h), static_cast<int>(w), static_cast<int>(c));
    get_f64(f.get(), t.data.data(), t.data.size());
    return t;
}

} // namespace jcnf
