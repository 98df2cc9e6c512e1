#include "kwnr/landau.hpp"

#include <Eigen/Sparse>
#include <cmath>

#include "kwnr/fd.hpp"

namespace kwnr {

std::array<std::array<double, 3>, 3> psi_kernel(const Vec3& z, double gamma) {
    std::array<std::array<double, 3>, 3> psi{};
    const double r2 = z[0] * z[0] + z[1] * z[1] + z[2] * z[2];
    if (r2 == 0.0) return psi;  // zero-offset cell carries zero weight
    const double amp = std::pow(r2, 0.5 * (gamma + 2.0));
    for (int j = 0; j < 3; ++j)
        for (int m = 0; m < 3; ++m)
            psi[j][m] = amp * ((j == m ? 1.0 : 0.0) - z[j] * z[m] / r2);
    return psi;
}

int LandauModel::sym_index(int j, int m) {
    static const int tab[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
    return tab[j][m];
}

LandauModel::LandauModel(const VelocityGrid& grid, double gamma)
    : grid_(grid), gamma_(gamma), conv_(std::make_unique<ConvEngine>(grid)) {
    if (gamma < -3.0 || gamma > 1.0)
        throw std::invalid_argument("LandauModel: gamma must lie in [-3, 1]");

    const std::pair<int, int> pairs[6] = {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}};
    for (int t = 0; t < 6; ++t) {
        auto [j, m] = pairs[t];
        psi_id_[t] = conv_->add_kernel(
            [j, m, gamma](const Vec3& z) { return psi_kernel(z, gamma)[j][m]; });
    }

    sqrt_mu_ = grid_.sqrt_maxwellian();
    sqrtmu_first_ = make_first_arg(sqrt_mu_);
    sqrtmu_second_ = make_second_arg(sqrt_mu_);
    for (int t = 0; t < 6; ++t) {
        sigma_[t].resize(grid_.num_nodes());
        for (std::size_t i = 0; i < grid_.num_nodes(); ++i)
            sigma_[t][i] = sqrtmu_first_.A[t][i].real();  // psi * mu
    }
}

LandauModel::SecondArg LandauModel::make_second_arg(const VelocityField& g) const {
    SecondArg sa;
    sa.g = g;
    for (int j = 0; j < 3; ++j) apply_maxwellian_derivative(grid_,g, j, sa.dg[j]);
    return sa;
}

LandauModel::FirstArg LandauModel::make_first_arg(const VelocityField& f) const {
    const std::size_t N = grid_.num_nodes();
    const auto& nodes = grid_.nodes();

    std::array<VelocityField, 3> df;
    for (int j = 0; j < 3; ++j) apply_maxwellian_derivative(grid_,f, j, df[j]);

    VelocityField src(N);
    auto fwd_of = [&](auto&& fill) {
        fill(src);
        return conv_->forward(src);
    };

    // 16 source spectra: sqrt(mu) f, v_i sqrt(mu) f, sqrt(mu) d_j f, v_i sqrt(mu) d_j f.
    auto s0 = fwd_of([&](VelocityField& s) {
        for (std::size_t p = 0; p < N; ++p) s[p] = sqrt_mu_[p] * f[p];
    });
    std::array<ConvEngine::Spectrum, 3> si, tj;
    std::array<std::array<ConvEngine::Spectrum, 3>, 3> rij;
    for (int i = 0; i < 3; ++i)
        si[i] = fwd_of([&](VelocityField& s) {
            for (std::size_t p = 0; p < N; ++p) s[p] = nodes[p][i] * sqrt_mu_[p] * f[p];
        });
    for (int j = 0; j < 3; ++j)
        tj[j] = fwd_of([&](VelocityField& s) {
            for (std::size_t p = 0; p < N; ++p) s[p] = sqrt_mu_[p] * df[j][p];
        });
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            rij[i][j] = fwd_of([&](VelocityField& s) {
                for (std::size_t p = 0; p < N; ++p)
                    s[p] = nodes[p][i] * sqrt_mu_[p] * df[j][p];
            });

    FirstArg fa;
    for (int t = 0; t < 6; ++t) {
        auto acc = conv_->zero_spectrum();
        conv_->accumulate(acc, psi_id_[t], s0);
        fa.A[t] = conv_->inverse(acc);
    }
    for (int j = 0; j < 3; ++j) {
        auto acc = conv_->zero_spectrum();
        for (int i = 0; i < 3; ++i) conv_->accumulate(acc, psi_id_[sym_index(i, j)], si[i]);
        fa.B[j] = conv_->inverse(acc);
    }
    for (int i = 0; i < 3; ++i) {
        auto acc = conv_->zero_spectrum();
        for (int j = 0; j < 3; ++j) conv_->accumulate(acc, psi_id_[sym_index(i, j)], tj[j]);
        fa.C[i] = conv_->inverse(acc);
    }
    {
        auto acc = conv_->zero_spectrum();
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                conv_->accumulate(acc, psi_id_[sym_index(i, j)], rij[i][j]);
        fa.D0 = conv_->inverse(acc);
    }
    return fa;
}

LandauModel::GammaAccum LandauModel::zero_accum() const {
    GammaAccum acc;
    const std::size_t N = grid_.num_nodes();
    for (int i = 0; i < 3; ++i) acc.flux[i] = VelocityField(N);
    acc.direct = VelocityField(N);
    return acc;
}

void LandauModel::accumulate_pair(GammaAccum& acc, const FirstArg& fa, const SecondArg& sa,
                                  Cplx scale) const {
    const std::size_t N = grid_.num_nodes();
    for (std::size_t p = 0; p < N; ++p) {
        for (int i = 0; i < 3; ++i) {
            Cplx fl = -fa.C[i][p] * sa.g[p];
            for (int j = 0; j < 3; ++j) fl += fa.A[sym_index(i, j)][p] * sa.dg[j][p];
            acc.flux[i][p] += scale * fl;
        }
        // the drift channels enter with weight 1/2: v_i mu^{1/2} sources arise
        // from -partial_i sqrt(mu) = (v_i/2) sqrt(mu)
        Cplx dr = fa.D0[p] * sa.g[p];
        for (int j = 0; j < 3; ++j) dr -= fa.B[j][p] * sa.dg[j][p];
        acc.direct[p] += 0.5 * scale * dr;
    }
}

VelocityField LandauModel::finalize(const GammaAccum& acc) const {
    VelocityField out = acc.direct, d;
    for (int i = 0; i < 3; ++i) {
        apply_maxwellian_derivative(grid_,acc.flux[i], i, d);
        for (std::size_t p = 0; p < out.size(); ++p) out[p] += d[p];
    }
    return out;
}

VelocityField LandauModel::apply_gamma(const VelocityField& f, const VelocityField& g) const {
    auto acc = zero_accum();
    accumulate_pair(acc, make_first_arg(f), make_second_arg(g), Cplx{1.0, 0.0});
    return finalize(acc);
}

VelocityField LandauModel::apply_linearized(const VelocityField& f) const {
    auto acc = zero_accum();
    accumulate_pair(acc, sqrtmu_first_, make_second_arg(f), Cplx{-1.0, 0.0});
    accumulate_pair(acc, make_first_arg(f), sqrtmu_second_, Cplx{-1.0, 0.0});
    return finalize(acc);
}

double LandauModel::d_norm_sq(const VelocityField& f, const WeightSpec& w) const {
    const std::size_t N = grid_.num_nodes();
    const auto& nodes = grid_.nodes();
    const auto& qw = grid_.quad_weights();
    std::array<VelocityField, 3> df;
    for (int j = 0; j < 3; ++j) apply_maxwellian_derivative(grid_,f, j, df[j]);
    double total = 0.0;
    for (std::size_t p = 0; p < N; ++p) {
        double w2 = 1.0;
        if (w.q != 0.0) {
            double wv = weight_value(w, nodes[p]);
            w2 = wv * wv;
        }
        double val = 0.0;
        for (int j = 0; j < 3; ++j)
            for (int m = 0; m < 3; ++m) {
                double sg = sigma_[sym_index(j, m)][p];
                val += sg * (df[j][p] * std::conj(df[m][p])).real();
                val += 0.25 * sg * nodes[p][j] * nodes[p][m] * std::norm(f[p]);
            }
        total += qw[p] * w2 * val;
    }
    return total;
}

const Eigen::MatrixXd& LandauModel::dense_L() const {
    std::lock_guard<std::mutex> lock(dense_mutex_);
    if (!dense_) build_dense_locked();
    return *dense_;
}

const Eigen::MatrixXd& LandauModel::dense_form() const {
    std::lock_guard<std::mutex> lock(dense_mutex_);
    if (!dense_form_) build_dense_locked();
    return *dense_form_;
}

void LandauModel::build_dense_locked() const {
    const int n = grid_.n_per_dim();
    const int N = static_cast<int>(grid_.num_nodes());
    const auto& qw = grid_.quad_weights();

    // B_a = G_a * diag(1/sqrt(mu)): plain-stencil gradient of f/sqrt(mu).
    std::array<Eigen::SparseMatrix<double>, 3> B;
    {
        const std::size_t strides[3] = {static_cast<std::size_t>(n) * n,
                                        static_cast<std::size_t>(n), 1};
        for (int axis = 0; axis < 3; ++axis) {
            std::vector<Eigen::Triplet<double>> trip;
            for (int p = 0; p < N; ++p) {
                const int ia = static_cast<int>((p / strides[axis]) % n);
                const std::size_t line0 = p - ia * strides[axis];
                for (auto [jj, cf] : derivative_stencil_1d(n, ia, grid_.spacing())) {
                    const int col = static_cast<int>(line0 + jj * strides[axis]);
                    trip.push_back({p, col, cf / sqrt_mu_[col].real()});
                }
            }
            B[axis].resize(N, N);
            B[axis].setFromTriplets(trip.begin(), trip.end());
        }
    }

    Eigen::VectorXd qmu(N);
    for (int p = 0; p < N; ++p)
        qmu[p] = qw[p] * sqrt_mu_[p].real() * sqrt_mu_[p].real();

    auto F = std::make_unique<Eigen::MatrixXd>(Eigen::MatrixXd::Zero(N, N));
    Eigen::MatrixXd Psi(N, N);
    std::vector<int> ix(N), iy(N), iz(N);
    for (int x = 0, p = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            for (int z = 0; z < n; ++z, ++p) {
                ix[p] = x;
                iy[p] = y;
                iz[p] = z;
            }

    const std::pair<int, int> pairs[6] = {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}};
    for (int t = 0; t < 6; ++t) {
        for (int v = 0; v < N; ++v)
            for (int u = 0; u < N; ++u)
                Psi(v, u) = conv_->kernel_value(psi_id_[t], ix[v] - ix[u], iy[v] - iy[u],
                                                iz[v] - iz[u]);
        // sigma-like contraction with the same (qw mu) weights as the form
        Eigen::VectorXd sig = Psi * qmu;
        auto [i0, j0] = pairs[t];
        for (auto [i, j] : {std::pair<int, int>{i0, j0}, std::pair<int, int>{j0, i0}}) {
            Eigen::SparseMatrix<double> Bi = qmu.asDiagonal() * B[i];
            Eigen::SparseMatrix<double> Bj = qmu.asDiagonal() * B[j];
            Eigen::SparseMatrix<double> diag_term =
                B[i].transpose() * (qmu.cwiseProduct(sig)).asDiagonal() * B[j];
            *F += Eigen::MatrixXd(diag_term);
            *F -= Bi.transpose() * (Psi * Bj);
            if (i0 == j0) break;  // diagonal pair appears once
        }
    }
    // clean residual roundoff asymmetry, then map the form to the operator
    *F = 0.5 * (*F + F->transpose()).eval();
    dense_ = std::make_unique<Eigen::MatrixXd>(*F);
    for (int p = 0; p < N; ++p) dense_->row(p) /= qw[p];
    dense_form_ = std::move(F);
}

Eigen::MatrixXd LandauModel::d_form_matrix(const WeightSpec& w) const {
    const int n = grid_.n_per_dim();
    const std::size_t N = grid_.num_nodes();
    const auto& nodes = grid_.nodes();
    const auto& qw = grid_.quad_weights();

    std::vector<double> w2(N, 1.0);
    if (w.q != 0.0)
        for (std::size_t p = 0; p < N; ++p) {
            double wv = weight_value(w, nodes[p]);
            w2[p] = wv * wv;
        }

    // Sparse 1D-derivative matrices along each axis.
    std::array<Eigen::SparseMatrix<double>, 3> G;
    for (int axis = 0; axis < 3; ++axis) {
        std::vector<Eigen::Triplet<double>> trip;
        const std::size_t strides[3] = {static_cast<std::size_t>(n) * n,
                                        static_cast<std::size_t>(n), 1};
        for (std::size_t p = 0; p < N; ++p) {
            const int idx_axis = static_cast<int>((p / strides[axis]) % n);
            const std::size_t line0 = p - idx_axis * strides[axis];
            const double xr = grid_.axis_coord(idx_axis);
            for (auto [jj, cf] : derivative_stencil_1d(n, idx_axis, grid_.spacing())) {
                const double xc = grid_.axis_coord(jj);
                trip.push_back({static_cast<int>(p),
                                static_cast<int>(line0 + jj * strides[axis]),
                                cf * std::exp(0.25 * (xc * xc - xr * xr))});
            }
            trip.push_back({static_cast<int>(p), static_cast<int>(p), -0.5 * xr});
        }
        G[axis].resize(N, N);
        G[axis].setFromTriplets(trip.begin(), trip.end());
    }

    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(N, N);
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(N);
    for (int j = 0; j < 3; ++j)
        for (int m = 0; m < 3; ++m) {
            Eigen::VectorXd q(N);
            for (std::size_t p = 0; p < N; ++p)
                q[p] = qw[p] * w2[p] * sigma_[sym_index(j, m)][p];
            Eigen::SparseMatrix<double> mid = q.asDiagonal() * G[m];
            D += Eigen::MatrixXd(G[j].transpose() * mid);
            for (std::size_t p = 0; p < N; ++p)
                diag[p] += 0.25 * q[p] * nodes[p][j] * nodes[p][m];
        }
    D += diag.asDiagonal();
    return D;
}

}  // namespace kwnr
