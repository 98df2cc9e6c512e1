#include "kwnr/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace kwnr {

namespace {

constexpr char kMagic[4] = {'K', 'W', 'N', 'R'};
constexpr std::uint32_t kVersion = 1;

// the build targets are little-endian; plain byte dumps of the fixed-width
// types below give the documented layout
void put_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_u64(std::ostream& os, std::uint64_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_f64(std::ostream& os, double v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_u8(std::ostream& os, std::uint8_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t get_u32(std::istream& is) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}
std::uint64_t get_u64(std::istream& is) {
    std::uint64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}
double get_f64(std::istream& is) {
    double v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}
std::uint8_t get_u8(std::istream& is) {
    std::uint8_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

void put_field(std::ostream& os, const VelocityField& f) {
    for (const Cplx& z : f.values) {
        put_f64(os, z.real());
        put_f64(os, z.imag());
    }
}

void get_field(std::istream& is, VelocityField& f) {
    for (Cplx& z : f.values) {
        double re = get_f64(is), im = get_f64(is);
        z = Cplx{re, im};
    }
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write checkpoint: " + path);
    return os;
}

std::ifstream open_in_checked(const std::string& path, std::uint8_t want_kind,
                              double& t, std::uint64_t& step,
                              const VelocityGrid& grid) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("bad checkpoint magic: " + path);
    if (get_u32(is) != kVersion)
        throw std::runtime_error("unsupported checkpoint version: " + path);
    std::uint8_t kind = get_u8(is);
    if (kind != want_kind)
        throw std::runtime_error("checkpoint domain kind mismatch: " + path);
    t = get_f64(is);
    step = get_u64(is);
    if (get_u32(is) != static_cast<std::uint32_t>(grid.n_per_dim()) ||
        get_f64(is) != grid.v_max())
        throw std::runtime_error("checkpoint grid mismatch: " + path);
    return is;
}

}  // namespace

void save_checkpoint(const std::string& path, const SpectralField& field,
                     double t, std::uint64_t step) {
    auto os = open_out(path);
    os.write(kMagic, 4);
    put_u32(os, kVersion);
    put_u8(os, 0);
    put_f64(os, t);
    put_u64(os, step);
    put_u32(os, static_cast<std::uint32_t>(field.grid().n_per_dim()));
    put_f64(os, field.grid().v_max());
    put_u32(os, static_cast<std::uint32_t>(field.k_max()));
    for (std::size_t i = 0; i < field.num_stored(); ++i)
        put_field(os, field.mode(i));
    if (!os) throw std::runtime_error("short write: " + path);
}

void save_checkpoint(const std::string& path, const ChannelState& state,
                     double t, std::uint64_t step) {
    auto os = open_out(path);
    os.write(kMagic, 4);
    put_u32(os, kVersion);
    put_u8(os, 1);
    put_f64(os, t);
    put_u64(os, step);
    put_u32(os, static_cast<std::uint32_t>(state.grid().n_per_dim()));
    put_f64(os, state.grid().v_max());
    put_u32(os, static_cast<std::uint32_t>(state.n_x1()));
    put_u32(os, static_cast<std::uint32_t>(state.kbar_max()));
    for (std::size_t i = 0; i < state.num_stored(); ++i)
        for (const auto& f : state.slab(i)) put_field(os, f);
    if (!os) throw std::runtime_error("short write: " + path);
}

bool checkpoint_is_channel(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("bad checkpoint magic: " + path);
    get_u32(is);
    return get_u8(is) == 1;
}

SpectralField load_checkpoint_torus(const std::string& path,
                                    const VelocityGrid& grid, double& t,
                                    std::uint64_t& step) {
    auto is = open_in_checked(path, 0, t, step, grid);
    std::uint32_t k_max = get_u32(is);
    SpectralField field(grid, static_cast<int>(k_max));
    for (std::size_t i = 0; i < field.num_stored(); ++i)
        get_field(is, field.mode(i));
    if (!is) throw std::runtime_error("truncated checkpoint: " + path);
    return field;
}

ChannelState load_checkpoint_channel(const std::string& path,
                                     const VelocityGrid& grid, double& t,
                                     std::uint64_t& step) {
    auto is = open_in_checked(path, 1, t, step, grid);
    std::uint32_t n_x1 = get_u32(is);
    std::uint32_t kbar_max = get_u32(is);
    ChannelState state(grid, static_cast<int>(n_x1),
                       static_cast<int>(kbar_max));
    for (std::size_t i = 0; i < state.num_stored(); ++i)
        for (auto& f : state.slab(i)) get_field(is, f);
    if (!is) throw std::runtime_error("truncated checkpoint: " + path);
    return state;
}

}  // namespace kwnr
