#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "fpme/evolution/params.hpp"

namespace fpme {

/// Checkpoint layout, all little-endian:
///   "FPMECKP1" | u32 version | u32 dim | u64 n0 | u64 n1 | f64 L0 | f64 L1 | f64 t
///   | f64 m1 m2 s delta varpi kappa1 kappa2 eps | u32 flags | u64 count | f64[count]
/// flags: bit 0 use_mollified, bit 1 truncated pressure, bit 2 transport.
struct Checkpoint {
    double t = 0.0;
    ModelParams params;
    SpectralField state;
};

namespace detail {

inline constexpr char checkpoint_magic[8] = {'F', 'P', 'M', 'E', 'C', 'K', 'P', '1'};
inline constexpr std::uint32_t checkpoint_version = 1;

template <class T>
void put_le(std::vector<unsigned char>& out, T v)
{
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    U bits = std::bit_cast<U>(v);
    for (std::size_t i = 0; i < sizeof(U); ++i) {
        out.push_back(static_cast<unsigned char>(bits >> (8 * i)));
    }
}

template <class T>
T get_le(const std::vector<unsigned char>& in, std::size_t& pos)
{
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    if (pos + sizeof(U) > in.size()) {
        throw Error("checkpoint is truncated");
    }
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
        bits |= static_cast<U>(in[pos + i]) << (8 * i);
    }
    pos += sizeof(U);
    return std::bit_cast<T>(bits);
}

} // namespace detail

inline std::vector<unsigned char> encode_checkpoint(const Checkpoint& c)
{
    using detail::put_le;
    std::vector<unsigned char> out(std::begin(detail::checkpoint_magic), std::end(detail::checkpoint_magic));
    const DomainSpec& d = c.state.domain;
    put_le<std::uint32_t>(out, detail::checkpoint_version);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(d.dim));
    put_le<std::uint64_t>(out, d.n[0]);
    put_le<std::uint64_t>(out, d.n[1]);
    put_le<double>(out, d.lengths[0]);
    put_le<double>(out, d.lengths[1]);
    put_le<double>(out, c.t);
    const ModelParams& p = c.params;
    for (double v : {p.m1, p.m2, p.s, p.delta, p.varpi, p.kappa1, p.kappa2, p.eps}) {
        put_le<double>(out, v);
    }
    std::uint32_t flags = (p.use_mollified ? 1u : 0u) | (p.pressure == PressureMode::truncated ? 2u : 0u) |
                          (p.transport ? 4u : 0u);
    put_le<std::uint32_t>(out, flags);
    put_le<std::uint64_t>(out, c.state.size());
    for (double v : c.state.coeffs) {
        put_le<double>(out, v);
    }
    return out;
}

inline Checkpoint decode_checkpoint(const std::vector<unsigned char>& in)
{
    using detail::get_le;
    if (in.size() < 8 || std::memcmp(in.data(), detail::checkpoint_magic, 8) != 0) {
        throw Error("not a checkpoint file");
    }
    std::size_t pos = 8;
    if (get_le<std::uint32_t>(in, pos) != detail::checkpoint_version) {
        throw Error("unsupported checkpoint version");
    }
    DomainSpec d;
    d.dim = static_cast<int>(get_le<std::uint32_t>(in, pos));
    d.n[0] = get_le<std::uint64_t>(in, pos);
    d.n[1] = get_le<std::uint64_t>(in, pos);
    d.lengths[0] = get_le<double>(in, pos);
    d.lengths[1] = get_le<double>(in, pos);
    d.validate();
    Checkpoint c;
    c.t = get_le<double>(in, pos);
    ModelParams& p = c.params;
    for (double* v : {&p.m1, &p.m2, &p.s, &p.delta, &p.varpi, &p.kappa1, &p.kappa2, &p.eps}) {
        *v = get_le<double>(in, pos);
    }
    const auto flags = get_le<std::uint32_t>(in, pos);
    p.use_mollified = flags & 1u;
    p.pressure = flags & 2u ? PressureMode::truncated : PressureMode::exact;
    p.transport = flags & 4u;
    const auto count = get_le<std::uint64_t>(in, pos);
    if (count != d.size()) {
        throw Error("checkpoint payload does not match its header");
    }
    c.state = SpectralField(d);
    for (std::size_t i = 0; i < count; ++i) {
        c.state[i] = get_le<double>(in, pos);
    }
    if (pos != in.size()) {
        throw Error("checkpoint has trailing bytes");
    }
    return c;
}

inline void write_checkpoint(const std::string& path, const Checkpoint& c)
{
    const auto bytes = encode_checkpoint(c);
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw Error("cannot open " + path + " for writing");
    }
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

inline Checkpoint read_checkpoint(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw Error("cannot open " + path);
    }
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return decode_checkpoint(bytes);
}

} // namespace fpme
