#pragma once

#include <cstdint>
#include <string>

#include "kwnr/channel.hpp"
#include "kwnr/spectral_field.hpp"

namespace kwnr {

/// Flat little-endian binary checkpoints, magic "KWNR", format version 1.
/// Torus layout: magic[4], u32 version, u8 kind (0 = torus, 1 = channel),
/// f64 t, u64 step, u32 n_per_dim, f64 v_max, u32 k_max (torus) or
/// u32 n_x1 + u32 kbar_max (channel), then per stored mode (fixed key order)
/// the node values as (re, im) f64 pairs; channel slabs iterate x1-major.
void save_checkpoint(const std::string& path, const SpectralField& field,
                     double t, std::uint64_t step);
void save_checkpoint(const std::string& path, const ChannelState& state,
                     double t, std::uint64_t step);

/// Peek at the stored kind without loading the payload.
bool checkpoint_is_channel(const std::string& path);

/// Loaders verify magic, version, kind, and that the stored dimensions match
/// the supplied grid; throw std::runtime_error otherwise.
SpectralField load_checkpoint_torus(const std::string& path,
                                    const VelocityGrid& grid, double& t,
                                    std::uint64_t& step);
ChannelState load_checkpoint_channel(const std::string& path,
                                     const VelocityGrid& grid, double& t,
                                     std::uint64_t& step);

}  // namespace kwnr
