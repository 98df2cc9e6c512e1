#pragma once

#include <functional>
#include <vector>

#include "kwnr/velocity_grid.hpp"

namespace kwnr {

/// Discrete linear convolution on the velocity lattice via zero-padded FFT.
///
/// (K * s)(x) = spacing^3 * sum_y K(x - y) s(y), with offsets x - y ranging
/// over [-(n-1), n-1]^3. Kernels are registered once (their padded transforms
/// are cached); sources are transformed per call. The same lattice kernel
/// table drives both this engine and the dense-operator column fill, so the
/// two evaluation paths agree to roundoff.
class ConvEngine {
  public:
    using Spectrum = std::vector<Cplx>;

    explicit ConvEngine(const VelocityGrid& grid);
    ~ConvEngine();

    ConvEngine(const ConvEngine&) = delete;
    ConvEngine& operator=(const ConvEngine&) = delete;

    /// Registers kernel values K(offset) indexed by lattice offset; returns a
    /// kernel id. The callback receives the physical offset vector.
    std::size_t add_kernel(const std::function<double(const Vec3&)>& k);

    /// Lattice kernel lookup for offset (ox, oy, oz), each in [-(n-1), n-1].
    double kernel_value(std::size_t id, int ox, int oy, int oz) const;

    Spectrum forward(const VelocityField& src) const;

    /// acc += K_hat(id) .* src elementwise, with optional scalar factor.
    void accumulate(Spectrum& acc, std::size_t id, const Spectrum& src,
                    double factor = 1.0) const;

    Spectrum zero_spectrum() const { return Spectrum(pad_total_, Cplx{0, 0}); }

    /// Inverse transform and extraction of the physical n^3 block.
    VelocityField inverse(const Spectrum& spec) const;

    int pad() const { return pad_; }

  private:
    int n_;
    int pad_;
    std::size_t pad_total_;
    double spacing_;
    std::vector<Spectrum> kernels_fft_;
    std::vector<std::vector<double>> kernels_raw_;  // offset-indexed tables
    void* plan_fwd_ = nullptr;   // fftw_plan
    void* plan_bwd_ = nullptr;
    void* work_ = nullptr;       // fftw_complex buffer, pad^3

    std::size_t pad_index(int x, int y, int z) const {
        return (static_cast<std::size_t>(x) * pad_ + y) * pad_ + z;
    }
    std::size_t raw_index(int ox, int oy, int oz) const;
};

}  // namespace kwnr
