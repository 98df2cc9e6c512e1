#include "kwnr/conv3d.hpp"

#include <fftw3.h>

#include <cstring>

namespace kwnr {

namespace {
std::array<double, 3> offset_vec(double h, int ox, int oy, int oz) {
    return {h * ox, h * oy, h * oz};
}
}  // namespace

ConvEngine::ConvEngine(const VelocityGrid& grid)
    : n_(grid.n_per_dim()), pad_(2 * grid.n_per_dim()), spacing_(grid.spacing()) {
    pad_total_ = static_cast<std::size_t>(pad_) * pad_ * pad_;
    work_ = fftw_alloc_complex(pad_total_);
    auto* w = static_cast<fftw_complex*>(work_);
    plan_fwd_ = fftw_plan_dft_3d(pad_, pad_, pad_, w, w, FFTW_FORWARD, FFTW_MEASURE);
    plan_bwd_ = fftw_plan_dft_3d(pad_, pad_, pad_, w, w, FFTW_BACKWARD, FFTW_MEASURE);
}

ConvEngine::~ConvEngine() {
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
    fftw_free(work_);
}

std::size_t ConvEngine::raw_index(int ox, int oy, int oz) const {
    const int m = 2 * n_ - 1, off = n_ - 1;
    return (static_cast<std::size_t>(ox + off) * m + (oy + off)) * m + (oz + off);
}

std::size_t ConvEngine::add_kernel(const std::function<double(const Vec3&)>& k) {
    const int m = 2 * n_ - 1;
    std::vector<double> raw(static_cast<std::size_t>(m) * m * m);
    for (int ox = -(n_ - 1); ox <= n_ - 1; ++ox)
        for (int oy = -(n_ - 1); oy <= n_ - 1; ++oy)
            for (int oz = -(n_ - 1); oz <= n_ - 1; ++oz)
                raw[raw_index(ox, oy, oz)] = k(offset_vec(spacing_, ox, oy, oz));

    // Padded circular placement: offset o lives at index (o mod pad).
    auto* w = static_cast<fftw_complex*>(work_);
    std::memset(w, 0, sizeof(fftw_complex) * pad_total_);
    for (int ox = -(n_ - 1); ox <= n_ - 1; ++ox)
        for (int oy = -(n_ - 1); oy <= n_ - 1; ++oy)
            for (int oz = -(n_ - 1); oz <= n_ - 1; ++oz) {
                std::size_t p = pad_index((ox + pad_) % pad_, (oy + pad_) % pad_,
                                          (oz + pad_) % pad_);
                w[p][0] = raw[raw_index(ox, oy, oz)];
            }
    fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_), w, w);

    // Fold the quadrature cell volume and the inverse-FFT normalization into
    // the cached kernel spectrum.
    const double scale = spacing_ * spacing_ * spacing_ / static_cast<double>(pad_total_);
    Spectrum spec(pad_total_);
    for (std::size_t i = 0; i < pad_total_; ++i)
        spec[i] = Cplx{w[i][0] * scale, w[i][1] * scale};
    kernels_fft_.push_back(std::move(spec));
    kernels_raw_.push_back(std::move(raw));
    return kernels_fft_.size() - 1;
}

double ConvEngine::kernel_value(std::size_t id, int ox, int oy, int oz) const {
    return kernels_raw_[id][raw_index(ox, oy, oz)];
}

ConvEngine::Spectrum ConvEngine::forward(const VelocityField& src) const {
    auto* buf = fftw_alloc_complex(pad_total_);
    std::memset(buf, 0, sizeof(fftw_complex) * pad_total_);
    for (int x = 0; x < n_; ++x)
        for (int y = 0; y < n_; ++y)
            for (int z = 0; z < n_; ++z) {
                const Cplx& c = src[(static_cast<std::size_t>(x) * n_ + y) * n_ + z];
                std::size_t p = pad_index(x, y, z);
                buf[p][0] = c.real();
                buf[p][1] = c.imag();
            }
    fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_), buf, buf);
    Spectrum out(pad_total_);
    for (std::size_t i = 0; i < pad_total_; ++i) out[i] = Cplx{buf[i][0], buf[i][1]};
    fftw_free(buf);
    return out;
}

void ConvEngine::accumulate(Spectrum& acc, std::size_t id, const Spectrum& src,
                            double factor) const {
    const Spectrum& k = kernels_fft_[id];
    for (std::size_t i = 0; i < pad_total_; ++i) acc[i] += factor * k[i] * src[i];
}

VelocityField ConvEngine::inverse(const Spectrum& spec) const {
    auto* buf = fftw_alloc_complex(pad_total_);
    for (std::size_t i = 0; i < pad_total_; ++i) {
        buf[i][0] = spec[i].real();
        buf[i][1] = spec[i].imag();
    }
    fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_), buf, buf);
    VelocityField out(static_cast<std::size_t>(n_) * n_ * n_);
    for (int x = 0; x < n_; ++x)
        for (int y = 0; y < n_; ++y)
            for (int z = 0; z < n_; ++z) {
                std::size_t p = pad_index(x, y, z);
                out[(static_cast<std::size_t>(x) * n_ + y) * n_ + z] =
                    Cplx{buf[p][0], buf[p][1]};
            }
    fftw_free(buf);
    return out;
}

}  // namespace kwnr
