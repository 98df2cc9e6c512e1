#include "kwnr/boltzmann.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <thread>

namespace kwnr {

namespace {

constexpr double kPi = 3.14159265358979323846;
// quadrature cutoffs: u-nodes with smaller sqrt(mu) are dropped everywhere;
// basis-sweep pairs additionally culled by the joint decay bound
constexpr double kSmuCut = 1e-14;
constexpr double kPairCut = 1e-13;

void gauss_legendre(int n, double a, double b, std::vector<double>& x,
                    std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    const double xm = 0.5 * (a + b), xl = 0.5 * (b - a);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (t * p0 - p1) / (t * t - 1.0);
            double dt = p0 / pp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        x[i] = xm - xl * t;
        x[n - 1 - i] = xm + xl * t;
        w[i] = w[n - 1 - i] = 2.0 * xl / ((1.0 - t * t) * pp * pp);
    }
}

struct TriLin {
    int cnt = 0;
    std::size_t idx[8];
    double w[8];
};

// trilinear cell of p; corners outside the box are dropped (zero extension)
inline void setup_trilin(int n, double h, double vmax, const Vec3& p, TriLin& t) {
    t.cnt = 0;
    double tc[3], fr[3];
    int ic[3];
    for (int d = 0; d < 3; ++d) {
        tc[d] = (p[d] + vmax) / h;
        if (tc[d] < -1.0 || tc[d] > static_cast<double>(n)) return;  // fully outside
        double fl = std::floor(tc[d]);
        ic[d] = static_cast<int>(fl);
        fr[d] = tc[d] - fl;
    }
    for (int cx = 0; cx < 2; ++cx) {
        int ix = ic[0] + cx;
        if (ix < 0 || ix >= n) continue;
        double wx = cx ? fr[0] : 1.0 - fr[0];
        for (int cy = 0; cy < 2; ++cy) {
            int iy = ic[1] + cy;
            if (iy < 0 || iy >= n) continue;
            double wy = wx * (cy ? fr[1] : 1.0 - fr[1]);
            for (int cz = 0; cz < 2; ++cz) {
                int iz = ic[2] + cz;
                if (iz < 0 || iz >= n) continue;
                double wv = wy * (cz ? fr[2] : 1.0 - fr[2]);
                if (wv == 0.0) continue;
                t.idx[t.cnt] = (static_cast<std::size_t>(ix) * n + iy) * n + iz;
                t.w[t.cnt] = wv;
                ++t.cnt;
            }
        }
    }
}

// interpolated ratio value sum_c w_c phi[idx_c] and in-box weight sum
inline Cplx interp(const std::vector<Cplx>& phi, const TriLin& t) {
    Cplx acc{0.0, 0.0};
    for (int c = 0; c < t.cnt; ++c) acc += t.w[c] * phi[t.idx[c]];
    return acc;
}
inline double wsum(const TriLin& t) {
    double acc = 0.0;
    for (int c = 0; c < t.cnt; ++c) acc += t.w[c];
    return acc;
}

// orthonormal frame (e1, e2) perpendicular to the unit vector k
inline void make_frame(const Vec3& k, Vec3& e1, Vec3& e2) {
    int a0 = 0;
    if (std::abs(k[1]) < std::abs(k[a0])) a0 = 1;
    if (std::abs(k[2]) < std::abs(k[a0])) a0 = 2;
    Vec3 t{0.0, 0.0, 0.0};
    t[a0] = 1.0;
    e1 = {k[1] * t[2] - k[2] * t[1], k[2] * t[0] - k[0] * t[2],
          k[0] * t[1] - k[1] * t[0]};
    double nrm = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
    for (int d = 0; d < 3; ++d) e1[d] /= nrm;
    e2 = {k[1] * e1[2] - k[2] * e1[1], k[2] * e1[0] - k[0] * e1[2],
          k[0] * e1[1] - k[1] * e1[0]};
}

constexpr double kMaxNorm = 0.063493635934240969389;  // (2 pi)^{-3/4}

inline double sqrt_mu_at(const Vec3& p) {
    return kMaxNorm * std::exp(-0.25 * (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]));
}

// f / sqrt(mu) on the grid
std::vector<Cplx> ratio_field(const VelocityGrid& g, const VelocityField& f) {
    std::vector<Cplx> phi(g.num_nodes());
    for (std::size_t p = 0; p < g.num_nodes(); ++p)
        phi[p] = f[p] / g.sqrt_maxwellian()[p].real();
    return phi;
}

}  // namespace

std::pair<Vec3, Vec3> post_collision(const Vec3& v, const Vec3& u, const Vec3& sigma) {
    Vec3 q{v[0] - u[0], v[1] - u[1], v[2] - u[2]};
    double r = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2]);
    Vec3 vp, up;
    for (int d = 0; d < 3; ++d) {
        double mid = 0.5 * (v[d] + u[d]), dev = 0.5 * r * sigma[d];
        vp[d] = mid + dev;
        up[d] = mid - dev;
    }
    return {vp, up};
}

BoltzmannModel::BoltzmannModel(const VelocityGrid& grid, double gamma, double s,
                               double theta_min, double c_b, int n_theta, int n_phi)
    : grid_(grid), gamma_(gamma), s_(s), theta_min_(theta_min), c_b_(c_b) {
    if (s <= 0.0 || s >= 1.0) throw std::invalid_argument("s must be in (0,1)");
    if (gamma <= std::max(-3.0, -1.5 - 2.0 * s))
        throw std::invalid_argument("gamma must exceed max{-3, -3/2 - 2s}");
    if (theta_min <= 0.0 || theta_min >= 0.5 * kPi)
        throw std::invalid_argument("theta_min must lie in (0, pi/2)");
    if (n_theta < 16 || n_phi < 16)
        throw std::invalid_argument("sphere quadrature needs >= 16 nodes per factor");

    std::vector<double> th, thw;
    gauss_legendre(n_theta, theta_min, 0.5 * kPi, th, thw);
    const double wphi = 2.0 * kPi / n_phi;
    sph_.reserve(static_cast<std::size_t>(n_theta) * n_phi);
    w_total_ = 0.0;
    for (int a = 0; a < n_theta; ++a) {
        // B dsigma = |v-u|^gamma b(cos th) sin th dth dphi = |v-u|^gamma th^{-1-2s} dth dphi
        double wa = c_b_ * std::pow(th[a], -1.0 - 2.0 * s) * thw[a] * wphi;
        double cth = std::cos(th[a]), sth = std::sin(th[a]);
        for (int b = 0; b < n_phi; ++b) {
            double phi = wphi * b;  // uniform, deterministic offset 0
            sph_.push_back({cth, sth * std::cos(phi), sth * std::sin(phi), wa});
            w_total_ += wa;
        }
    }

    for (std::size_t p = 0; p < grid_.num_nodes(); ++p) {
        double smu = grid_.sqrt_maxwellian()[p].real();
        if (smu >= kSmuCut)
            unodes_.push_back({p, smu, smu * smu, grid_.quad_weights()[p]});
    }
}

VelocityField BoltzmannModel::apply_gamma(const VelocityField& f,
                                          const VelocityField& g) const {
    const int n = grid_.n_per_dim();
    const double h = grid_.spacing(), vmax = grid_.v_max();
    const auto& nodes = grid_.nodes();
    // post-collision values by Maxwellian-factored trilinear interpolation:
    // fields interpolated as sqrt(mu) * trilinear(f / sqrt(mu)); the product
    // then uses the exact identity sqrt(mu)(u') sqrt(mu)(v') = sqrt(mu)(u) sqrt(mu)(v)
    auto pf = ratio_field(grid_, f), pg = ratio_field(grid_, g);
    VelocityField out(grid_.num_nodes());
    TriLin tu, tv;
    for (std::size_t vp = 0; vp < grid_.num_nodes(); ++vp) {
        const Vec3& v = nodes[vp];
        const double sv = grid_.sqrt_maxwellian()[vp].real();
        Cplx acc{0.0, 0.0};
        const Cplx gv = g[vp];
        for (const auto& un : unodes_) {
            const Vec3& u = nodes[un.p];
            Vec3 q{v[0] - u[0], v[1] - u[1], v[2] - u[2]};
            double r2 = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
            if (r2 == 0.0) continue;
            double r = std::sqrt(r2);
            Vec3 k{q[0] / r, q[1] / r, q[2] / r}, e1, e2;
            make_frame(k, e1, e2);
            Vec3 mid{0.5 * (v[0] + u[0]), 0.5 * (v[1] + u[1]), 0.5 * (v[2] + u[2])};
            Cplx gain{0.0, 0.0};
            for (const auto& sn : sph_) {
                Vec3 pv, pu;
                for (int d = 0; d < 3; ++d) {
                    double dev = 0.5 * r * (sn.cth * k[d] + sn.sc * e1[d] + sn.ss * e2[d]);
                    pv[d] = mid[d] + dev;
                    pu[d] = mid[d] - dev;
                }
                setup_trilin(n, h, vmax, pu, tu);
                setup_trilin(n, h, vmax, pv, tv);
                gain += sn.w * interp(pf, tu) * interp(pg, tv);
            }
            acc += un.qw * std::pow(r, gamma_) *
                   (un.mu * sv * gain - w_total_ * un.smu * f[un.p] * gv);
        }
        out[vp] = acc;
    }
    return out;
}

VelocityField BoltzmannModel::apply_linearized(const VelocityField& f) const {
    return apply_linearized_batch({f})[0];
}

std::vector<VelocityField> BoltzmannModel::apply_linearized_batch(
    const std::vector<VelocityField>& fields) const {
    const int n = grid_.n_per_dim();
    const double h = grid_.spacing(), vmax = grid_.v_max();
    const auto& nodes = grid_.nodes();
    const std::size_t nf = fields.size();
    std::vector<std::vector<Cplx>> phi(nf);
    for (std::size_t m = 0; m < nf; ++m) phi[m] = ratio_field(grid_, fields[m]);
    std::vector<VelocityField> out(nf, VelocityField(grid_.num_nodes()));
    std::vector<Cplx> gain(nf), fv(nf), fu(nf), pu_v(nf), pv_v(nf);
    TriLin tu, tv;
    for (std::size_t vp = 0; vp < grid_.num_nodes(); ++vp) {
        const Vec3& v = nodes[vp];
        const double sv = grid_.sqrt_maxwellian()[vp].real();
        const double vdecay =
            std::exp(-0.125 * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]));
        for (std::size_t m = 0; m < nf; ++m) fv[m] = fields[m][vp];
        std::vector<Cplx> acc(nf, Cplx{0.0, 0.0});
        for (const auto& un : unodes_) {
            // batched variant: joint decay cutoff (every retained channel
            // carries at least sqrt(mu)(u) sqrt(mu)(v)-level suppression)
            if (un.smu * vdecay < kPairCut) continue;
            const Vec3& u = nodes[un.p];
            Vec3 q{v[0] - u[0], v[1] - u[1], v[2] - u[2]};
            double r2 = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
            if (r2 == 0.0) continue;
            double r = std::sqrt(r2);
            Vec3 k{q[0] / r, q[1] / r, q[2] / r}, e1, e2;
            make_frame(k, e1, e2);
            Vec3 mid{0.5 * (v[0] + u[0]), 0.5 * (v[1] + u[1]), 0.5 * (v[2] + u[2])};
            for (std::size_t m = 0; m < nf; ++m) {
                gain[m] = Cplx{0.0, 0.0};
                fu[m] = fields[m][un.p];
            }
            for (const auto& sn : sph_) {
                Vec3 pv, pu;
                for (int d = 0; d < 3; ++d) {
                    double dev = 0.5 * r * (sn.cth * k[d] + sn.sc * e1[d] + sn.ss * e2[d]);
                    pv[d] = mid[d] + dev;
                    pu[d] = mid[d] - dev;
                }
                setup_trilin(n, h, vmax, pu, tu);
                setup_trilin(n, h, vmax, pv, tv);
                // ratio of sqrt(mu) is 1; its interpolant is the in-box weight sum
                double su = wsum(tu), svv = wsum(tv);
                for (std::size_t m = 0; m < nf; ++m)
                    gain[m] += sn.w * (su * interp(phi[m], tv) +
                                       interp(phi[m], tu) * svv);
            }
            const double cc = un.qw * std::pow(r, gamma_);
            for (std::size_t m = 0; m < nf; ++m)
                acc[m] += cc * (un.mu * sv * gain[m] -
                                w_total_ * un.smu * (un.smu * fv[m] + fu[m] * sv));
        }
        // L f = -Gamma(sqrt(mu), f) - Gamma(f, sqrt(mu))
        for (std::size_t m = 0; m < nf; ++m) out[m][vp] = -acc[m];
    }
    return out;
}

double BoltzmannModel::d_norm_sq(const VelocityField& f, const WeightSpec& w) const {
    const int n = grid_.n_per_dim();
    const double h = grid_.spacing(), vmax = grid_.v_max();
    const auto& nodes = grid_.nodes();
    auto phi = ratio_field(grid_, f);
    double total = 0.0;
    TriLin tv;
    for (std::size_t vp = 0; vp < grid_.num_nodes(); ++vp) {
        const Vec3& v = nodes[vp];
        const double sv = grid_.sqrt_maxwellian()[vp].real();
        const double wv2 = grid_.quad_weights()[vp] * std::pow(weight_value(w, v), 2);
        const Cplx fv = f[vp];
        double vacc = 0.0;
        for (const auto& un : unodes_) {
            const Vec3& u = nodes[un.p];
            Vec3 q{v[0] - u[0], v[1] - u[1], v[2] - u[2]};
            double r2 = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
            if (r2 == 0.0) continue;
            double r = std::sqrt(r2);
            Vec3 k{q[0] / r, q[1] / r, q[2] / r}, e1, e2;
            make_frame(k, e1, e2);
            Vec3 mid{0.5 * (v[0] + u[0]), 0.5 * (v[1] + u[1]), 0.5 * (v[2] + u[2])};
            double t1 = 0.0, t2 = 0.0;
            for (const auto& sn : sph_) {
                Vec3 pv;
                for (int d = 0; d < 3; ++d)
                    pv[d] = mid[d] +
                            0.5 * r * (sn.cth * k[d] + sn.sc * e1[d] + sn.ss * e2[d]);
                setup_trilin(n, h, vmax, pv, tv);
                double smu_vp = sqrt_mu_at(pv);
                double ds = smu_vp * wsum(tv) - sv;
                t1 += sn.w * std::norm(smu_vp * interp(phi, tv) - fv);
                t2 += sn.w * ds * ds;
            }
            vacc += un.qw * std::pow(r, gamma_) *
                    (un.mu * t1 + std::norm(f[un.p]) * t2);
        }
        total += wv2 * vacc;
    }
    return total;
}

double BoltzmannModel::quadratic_form(const VelocityField& f) const {
    const int n = grid_.n_per_dim();
    const double h = grid_.spacing(), vmax = grid_.v_max();
    const auto& nodes = grid_.nodes();
    auto phi = ratio_field(grid_, f);
    double total = 0.0;
    TriLin tu, tv;
    for (const auto& vn : unodes_) {
        const Vec3& v = nodes[vn.p];
        const Cplx hv = phi[vn.p];
        double vacc = 0.0;
        for (const auto& un : unodes_) {
            const Vec3& u = nodes[un.p];
            Vec3 q{v[0] - u[0], v[1] - u[1], v[2] - u[2]};
            double r2 = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
            if (r2 == 0.0) continue;
            double r = std::sqrt(r2);
            Vec3 k{q[0] / r, q[1] / r, q[2] / r}, e1, e2;
            make_frame(k, e1, e2);
            Vec3 mid{0.5 * (v[0] + u[0]), 0.5 * (v[1] + u[1]), 0.5 * (v[2] + u[2])};
            const Cplx hvu = hv + phi[un.p];
            double sacc = 0.0;
            for (const auto& sn : sph_) {
                Vec3 pv, pu;
                for (int d = 0; d < 3; ++d) {
                    double dev = 0.5 * r * (sn.cth * k[d] + sn.sc * e1[d] + sn.ss * e2[d]);
                    pv[d] = mid[d] + dev;
                    pu[d] = mid[d] - dev;
                }
                setup_trilin(n, h, vmax, pu, tu);
                setup_trilin(n, h, vmax, pv, tv);
                sacc += sn.w * std::norm(interp(phi, tv) + interp(phi, tu) - hvu);
            }
            vacc += un.qw * std::pow(r, gamma_) * un.mu * sacc;
        }
        total += 0.25 * vn.qw * vn.mu * vacc;
    }
    return total;
}

BoltzmannModel::SweepResult BoltzmannModel::basis_sweep(
    const std::vector<VelocityField>& basis, const WeightSpec* w,
    int workers) const {
    const int m = static_cast<int>(basis.size());
    const int P = m + 1;  // packed ratio columns + constant 1 (sqrt(mu) ratio)
    const std::size_t N = grid_.num_nodes();
    const int n = grid_.n_per_dim();
    const double h = grid_.spacing(), vmax = grid_.v_max();
    const auto& nodes = grid_.nodes();
    const auto& qw = grid_.quad_weights();

    std::vector<double> packed(N * P);
    std::vector<double> smu(N);
    for (std::size_t p = 0; p < N; ++p) {
        smu[p] = grid_.sqrt_maxwellian()[p].real();
        for (int a = 0; a < m; ++a) packed[p * P + a] = basis[a][p].real() / smu[p];
        packed[p * P + m] = 1.0;
    }
    std::vector<double> w2(N, 1.0);
    if (w)
        for (std::size_t p = 0; p < N; ++p)
            w2[p] = std::pow(weight_value(*w, nodes[p]), 2);

    struct Partial {
        std::vector<double> t1, t1w;
        Eigen::MatrixXd g_d, g_dw, g_lsym;
    };
    const bool havew = (w != nullptr);
    if (workers < 1) workers = 1;
    std::vector<Partial> parts(workers);

    auto work = [&](int wi, std::size_t lo, std::size_t hi) {
        Partial& pr = parts[wi];
        pr.t1.assign(static_cast<std::size_t>(m) * m * m, 0.0);
        if (havew) pr.t1w.assign(static_cast<std::size_t>(m) * m * m, 0.0);
        pr.g_d = Eigen::MatrixXd::Zero(m, m);
        pr.g_dw = Eigen::MatrixXd::Zero(m, m);
        pr.g_lsym = Eigen::MatrixXd::Zero(m, m);
        std::vector<double> K(m * m), DK(m * m), SK(m * m), Av(P), Bv(P), nu(m),
            evv(m), euv(m), dB(m), dL(m);
        TriLin tu, tv;
        for (std::size_t vp = lo; vp < hi; ++vp) {
            const Vec3& v = nodes[vp];
            const double vr2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
            const double vdecay = std::exp(-0.125 * vr2);
            const double sv = smu[vp];
            const double* ev = &packed[vp * P];  // ratio values at v
            for (int a = 0; a < m; ++a) evv[a] = ev[a] * sv;  // actual values
            std::fill(nu.begin(), nu.end(), 0.0);
            for (const auto& un : unodes_) {
                if (un.smu * vdecay < kPairCut) continue;
                const Vec3& u = nodes[un.p];
                Vec3 q{v[0] - u[0], v[1] - u[1], v[2] - u[2]};
                double r2 = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
                if (r2 == 0.0) continue;
                double r = std::sqrt(r2);
                Vec3 k{q[0] / r, q[1] / r, q[2] / r}, e1, e2;
                make_frame(k, e1, e2);
                Vec3 mid{0.5 * (v[0] + u[0]), 0.5 * (v[1] + u[1]),
                         0.5 * (v[2] + u[2])};
                std::memset(K.data(), 0, sizeof(double) * K.size());
                std::memset(DK.data(), 0, sizeof(double) * DK.size());
                std::memset(SK.data(), 0, sizeof(double) * SK.size());
                const double* hu = &packed[un.p * P];
                double s2 = 0.0;
                for (const auto& sn : sph_) {
                    Vec3 pv, pu;
                    for (int d = 0; d < 3; ++d) {
                        double dev = 0.5 * r *
                                     (sn.cth * k[d] + sn.sc * e1[d] + sn.ss * e2[d]);
                        pv[d] = mid[d] + dev;
                        pu[d] = mid[d] - dev;
                    }
                    setup_trilin(n, h, vmax, pu, tu);
                    setup_trilin(n, h, vmax, pv, tv);
                    std::fill(Av.begin(), Av.end(), 0.0);
                    std::fill(Bv.begin(), Bv.end(), 0.0);
                    for (int c = 0; c < tu.cnt; ++c) {
                        const double* row = &packed[tu.idx[c] * P];
                        const double wc = tu.w[c];
                        for (int a = 0; a < P; ++a) Av[a] += wc * row[a];
                    }
                    for (int c = 0; c < tv.cnt; ++c) {
                        const double* row = &packed[tv.idx[c] * P];
                        const double wc = tv.w[c];
                        for (int a = 0; a < P; ++a) Bv[a] += wc * row[a];
                    }
                    const double smu_vp = sqrt_mu_at(pv);
                    for (int a = 0; a < m; ++a) {
                        dB[a] = smu_vp * Bv[a] - evv[a];
                        dL[a] = Av[a] + Bv[a] - hu[a] - ev[a];
                    }
                    const double ws = sn.w;
                    for (int a = 0; a < m; ++a) {
                        const double wa = ws * Av[a];
                        const double da = dB[a];
                        const double la = ws * dL[a];
                        double* Kr = &K[a * m];
                        double* Dr = &DK[a * m];
                        double* Sr = &SK[a * m];
                        for (int b = 0; b < m; ++b) {
                            Kr[b] += wa * Bv[b];  // ratio products for the gain
                            Dr[b] += ws * da * dB[b];
                            Sr[b] += la * dL[b];
                        }
                    }
                    const double dsm = smu_vp * Bv[m] - sv;
                    s2 += ws * dsm * dsm;
                }
                const double cc = un.qw * std::pow(r, gamma_);
                const double gs = cc * un.mu * sv;  // mu(u) sqrt(mu)(v) gain factor
                const double* pu_row = &packed[un.p * P];
                for (int a = 0; a < m; ++a) euv[a] = pu_row[a] * un.smu;
                const double cq = cc * qw[vp], cqw = cq * w2[vp];
                const double csym = 0.25 * cq * un.mu * sv * sv;  // mu(u) mu(v) / 4
                const double* evq = evv.data();
                for (int a = 0; a < m; ++a) {
                    nu[a] += cc * un.smu * euv[a];
                    const double* Kr = &K[a * m];
                    const double* Dr = &DK[a * m];
                    const double* Sr = &SK[a * m];
                    for (int b = 0; b < m; ++b) {
                        const double t = gs * Kr[b] * qw[vp];
                        double* T = &pr.t1[(static_cast<std::size_t>(a) * m + b) * m];
                        for (int d = 0; d < m; ++d) T[d] += t * evq[d];
                        if (havew) {
                            const double tw = t * w2[vp];
                            double* Tw =
                                &pr.t1w[(static_cast<std::size_t>(a) * m + b) * m];
                            for (int d = 0; d < m; ++d) Tw[d] += tw * evq[d];
                        }
                        const double dterm = un.mu * Dr[b] + euv[a] * euv[b] * s2;
                        pr.g_d(a, b) += cq * dterm;
                        pr.g_dw(a, b) += cqw * dterm;
                        pr.g_lsym(a, b) += csym * Sr[b];
                    }
                }
            }
            // loss channel, sigma-integrated analytically (W_total factor)
            for (int a = 0; a < m; ++a) {
                const double la = w_total_ * nu[a] * qw[vp];
                for (int b = 0; b < m; ++b) {
                    const double t = la * evv[b];
                    double* T = &pr.t1[(static_cast<std::size_t>(a) * m + b) * m];
                    for (int d = 0; d < m; ++d) T[d] -= t * evv[d];
                    if (havew) {
                        const double tw = t * w2[vp];
                        double* Tw =
                            &pr.t1w[(static_cast<std::size_t>(a) * m + b) * m];
                        for (int d = 0; d < m; ++d) Tw[d] -= tw * evv[d];
                    }
                }
            }
        }
    };

    if (workers == 1) {
        work(0, 0, N);
    } else {
        std::vector<std::thread> threads;
        std::size_t chunk = (N + workers - 1) / workers;
        for (int wi = 0; wi < workers; ++wi) {
            std::size_t lo = wi * chunk, hi = std::min(N, lo + chunk);
            if (lo >= hi) break;
            threads.emplace_back(work, wi, lo, hi);
        }
        for (auto& t : threads) t.join();
    }

    SweepResult res;
    res.m = m;
    res.t1.assign(static_cast<std::size_t>(m) * m * m, 0.0);
    if (w) res.t1w.assign(static_cast<std::size_t>(m) * m * m, 0.0);
    res.g_d = Eigen::MatrixXd::Zero(m, m);
    res.g_dw = Eigen::MatrixXd::Zero(m, m);
    res.g_lsym = Eigen::MatrixXd::Zero(m, m);
    for (const auto& pr : parts) {
        if (pr.t1.empty()) continue;
        for (std::size_t i = 0; i < res.t1.size(); ++i) res.t1[i] += pr.t1[i];
        if (w && !pr.t1w.empty())
            for (std::size_t i = 0; i < res.t1w.size(); ++i)
                res.t1w[i] += pr.t1w[i];
        res.g_d += pr.g_d;
        res.g_dw += pr.g_dw;
        res.g_lsym += pr.g_lsym;
    }
    if (!w) res.g_dw.resize(0, 0);
    return res;
}

}  // namespace kwnr
