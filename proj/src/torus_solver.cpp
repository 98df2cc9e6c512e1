#include "kwnr/torus_solver.hpp"

#include <cmath>
#include <stdexcept>

namespace kwnr {

Scheme parse_scheme(const std::string& name) {
    if (name == "explicit_rk2") return Scheme::ExplicitRk2;
    if (name == "imex_euler") return Scheme::ImexEuler;
    if (name == "imex_strang") return Scheme::ImexStrang;
    throw std::invalid_argument("unknown scheme: " + name);
}

std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::ExplicitRk2: return "explicit_rk2";
        case Scheme::ImexEuler: return "imex_euler";
        case Scheme::ImexStrang: return "imex_strang";
    }
    return "?";
}

namespace {

void check_options(const TorusOptions& opt) {
    if (!(opt.dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (opt.mode_cutoff < 0.0)
        throw std::invalid_argument("mode_cutoff must be nonnegative");
    if (opt.dirichlet_l) {
        if (opt.nonlinear)
            throw std::invalid_argument(
                "dirichlet_l applies to linear runs only");
        if (opt.scheme == Scheme::ExplicitRk2)
            throw std::invalid_argument(
                "dirichlet_l needs an implicit scheme");
    }
}

}  // namespace

void TorusSolver::init_invariants() {
    const auto& nodes = grid_.nodes();
    if (opt_.ball_radius > 0.0) {
        const double r2 = opt_.ball_radius * opt_.ball_radius + 1e-12;
        mask_.resize(grid_.num_nodes());
        for (std::size_t p = 0; p < nodes.size(); ++p) {
            const auto& v = nodes[p];
            bool in = v[0] * v[0] + v[1] * v[1] + v[2] * v[2] <= r2;
            mask_[p] = in ? 1 : 0;
            if (in) keep_.push_back(p);
        }
    } else {
        keep_.resize(grid_.num_nodes());
        for (std::size_t p = 0; p < keep_.size(); ++p) keep_[p] = p;
    }
    inv_ = grid_.collision_invariants();
    for (auto& f : inv_) apply_mask(f);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            inv_gram_(i, j) = grid_.inner_product(inv_[i], inv_[j]).real();
}

void TorusSolver::apply_mask(VelocityField& f) const {
    if (mask_.empty()) return;
    for (std::size_t p = 0; p < f.size(); ++p)
        if (!mask_[p]) f[p] = Cplx{0.0, 0.0};
}

TorusSolver::TorusSolver(const LandauModel& model, const TorusOptions& opt)
    : landau_(&model), grid_(model.grid()), opt_(opt) {
    check_options(opt);
    init_invariants();
}

TorusSolver::TorusSolver(const BoltzmannModel& model, const TorusOptions& opt)
    : boltz_(&model), grid_(model.grid()), opt_(opt) {
    check_options(opt);
    if (opt.scheme != Scheme::ExplicitRk2)
        throw std::invalid_argument(
            "implicit schemes need the Landau dense form; use explicit_rk2");
    if (opt.dirichlet_l)
        throw std::invalid_argument("dirichlet_l is Landau only");
    init_invariants();
}

VelocityField TorusSolver::apply_l(const VelocityField& f) const {
    return landau_ ? landau_->apply_linearized(f) : boltz_->apply_linearized(f);
}

void TorusSolver::conserve_project(VelocityField& rhs0) const {
    Eigen::Matrix<double, 5, 1> re, im;
    for (int i = 0; i < 5; ++i) {
        Cplx ip = grid_.inner_product(rhs0, inv_[i]);
        re(i) = ip.real();
        im(i) = ip.imag();
    }
    auto ldlt = inv_gram_.ldlt();
    Eigen::Matrix<double, 5, 1> cr = ldlt.solve(re), ci = ldlt.solve(im);
    for (std::size_t p = 0; p < rhs0.size(); ++p) {
        Cplx corr{0.0, 0.0};
        for (int i = 0; i < 5; ++i)
            corr += Cplx{cr(i), ci(i)} * inv_[i][p];
        rhs0[p] -= corr;
    }
}

const std::vector<Cplx>& TorusSolver::rotation(const KPoint& k, double tau,
                                               int slot) const {
    auto key = std::make_pair(k, slot);
    auto it = rot_cache_.find(key);
    if (it != rot_cache_.end()) return it->second;
    std::vector<Cplx> ph(grid_.num_nodes());
    const auto& nodes = grid_.nodes();
    for (std::size_t p = 0; p < ph.size(); ++p) {
        double kv = k[0] * nodes[p][0] + k[1] * nodes[p][1] + k[2] * nodes[p][2];
        ph[p] = std::exp(Cplx{0.0, -kv * tau});
    }
    return rot_cache_.emplace(key, std::move(ph)).first->second;
}

void TorusSolver::rotate(SpectralField& f, double tau) const {
    int slot = (tau == opt_.dt) ? 0 : 1;
    for (std::size_t i = 0; i < f.num_stored(); ++i) {
        const auto& ph = rotation(f.keys()[i], tau, slot);
        auto& m = f.mode(i);
        for (std::size_t p = 0; p < m.size(); ++p) m[p] *= ph[p];
    }
}

std::vector<VelocityField> TorusSolver::collision_rhs(const SpectralField& f,
                                                      bool include_l) const {
    const int K = f.k_max();
    const int w = 2 * K + 1;
    const std::size_t N = grid_.num_nodes();
    auto flat = [&](const KPoint& k) {
        return (static_cast<std::size_t>(k[0] + K) * w + (k[1] + K)) * w +
               (k[2] + K);
    };

    std::vector<double> nrm(f.num_stored());
    double mx = 0.0;
    for (std::size_t i = 0; i < f.num_stored(); ++i) {
        nrm[i] = grid_.norm_l2(f.mode(i));
        mx = std::max(mx, nrm[i]);
    }
    const double cut = opt_.mode_cutoff * mx;

    std::vector<VelocityField> rhs(f.num_stored());
    if (mx == 0.0) {
        for (auto& r : rhs) r = VelocityField(N);
        return rhs;
    }

    if (landau_) {
        // one FirstArg/SecondArg per active lattice mode; the conjugate half
        // is materialized by conjugation (the convolution kernels are real)
        std::vector<std::unique_ptr<LandauModel::FirstArg>> fa(
            static_cast<std::size_t>(w) * w * w);
        std::vector<std::unique_ptr<LandauModel::SecondArg>> sa(fa.size());
        std::vector<KPoint> active;
        for (std::size_t i = 0; i < f.num_stored(); ++i) {
            if (nrm[i] < cut) continue;
            const KPoint& k = f.keys()[i];
            std::size_t id = flat(k);
            fa[id] = std::make_unique<LandauModel::FirstArg>(
                landau_->make_first_arg(f.mode(i)));
            sa[id] = std::make_unique<LandauModel::SecondArg>(
                landau_->make_second_arg(f.mode(i)));
            active.push_back(k);
            if (k == KPoint{0, 0, 0}) continue;
            std::size_t idn = flat(k_neg(k));
            auto cfa = std::make_unique<LandauModel::FirstArg>(*fa[id]);
            auto csa = std::make_unique<LandauModel::SecondArg>(*sa[id]);
            for (auto& fld : cfa->A)
                for (auto& z : fld.values) z = std::conj(z);
            for (auto& fld : cfa->B)
                for (auto& z : fld.values) z = std::conj(z);
            for (auto& fld : cfa->C)
                for (auto& z : fld.values) z = std::conj(z);
            for (auto& z : cfa->D0.values) z = std::conj(z);
            for (auto& z : csa->g.values) z = std::conj(z);
            for (auto& fld : csa->dg)
                for (auto& z : fld.values) z = std::conj(z);
            fa[idn] = std::move(cfa);
            sa[idn] = std::move(csa);
            active.push_back(k_neg(k));
        }

        for (std::size_t i = 0; i < f.num_stored(); ++i) {
            const KPoint& k = f.keys()[i];
            auto acc = landau_->zero_accum();
            bool any = false;
            std::size_t idk = flat(k);
            if (include_l && fa[idk]) {
                landau_->accumulate_pair(acc, landau_->sqrt_mu_first_arg(),
                                         *sa[idk], Cplx{1.0, 0.0});
                landau_->accumulate_pair(acc, *fa[idk],
                                         landau_->sqrt_mu_second_arg(),
                                         Cplx{1.0, 0.0});
                any = true;
            }
            if (opt_.nonlinear) {
                for (const KPoint& l : active) {
                    KPoint km{k[0] - l[0], k[1] - l[1], k[2] - l[2]};
                    if (!f.in_truncation(km)) continue;
                    if (!fa[flat(km)]) continue;
                    landau_->accumulate_pair(acc, *fa[flat(km)], *sa[flat(l)],
                                             Cplx{1.0, 0.0});
                    any = true;
                }
            }
            rhs[i] = any ? landau_->finalize(acc) : VelocityField(N);
        }
    } else {
        std::vector<char> act(static_cast<std::size_t>(w) * w * w, 0);
        std::vector<KPoint> active;
        for (std::size_t i = 0; i < f.num_stored(); ++i) {
            if (nrm[i] < cut) continue;
            const KPoint& k = f.keys()[i];
            act[flat(k)] = 1;
            active.push_back(k);
            if (!(k == KPoint{0, 0, 0})) {
                act[flat(k_neg(k))] = 1;
                active.push_back(k_neg(k));
            }
        }
        for (std::size_t i = 0; i < f.num_stored(); ++i) {
            const KPoint& k = f.keys()[i];
            VelocityField out(N);
            if (include_l && act[flat(k)]) {
                auto lf = boltz_->apply_linearized(f.mode(i));
                for (std::size_t p = 0; p < N; ++p) out[p] -= lf[p];
            }
            if (opt_.nonlinear) {
                for (const KPoint& l : active) {
                    KPoint km{k[0] - l[0], k[1] - l[1], k[2] - l[2]};
                    if (!f.in_truncation(km) || !act[flat(km)]) continue;
                    auto gm = boltz_->apply_gamma(f.mode_at(km), f.mode_at(l));
                    for (std::size_t p = 0; p < N; ++p) out[p] += gm[p];
                }
            }
            rhs[i] = std::move(out);
        }
    }

    if (!mask_.empty())
        for (auto& r : rhs) apply_mask(r);
    if (opt_.conserve_correction) {
        int i0 = f.stored_index(KPoint{0, 0, 0});
        if (rhs[static_cast<std::size_t>(i0)].size() > 0)
            conserve_project(rhs[static_cast<std::size_t>(i0)]);
    }
    return rhs;
}

VelocityField TorusSolver::gamma_hat(const SpectralField& f,
                                     const KPoint& k) const {
    const std::size_t N = grid_.num_nodes();
    VelocityField out(N);
    const int K = f.k_max();
    for (int lx = -K; lx <= K; ++lx)
        for (int ly = -K; ly <= K; ++ly)
            for (int lz = -K; lz <= K; ++lz) {
                KPoint l{lx, ly, lz};
                KPoint km{k[0] - lx, k[1] - ly, k[2] - lz};
                if (!f.in_truncation(km)) continue;
                auto fl = f.mode_at(l);
                auto fkm = f.mode_at(km);
                auto gm = landau_ ? landau_->apply_gamma(fkm, fl)
                                  : boltz_->apply_gamma(fkm, fl);
                for (std::size_t p = 0; p < N; ++p) out[p] += gm[p];
            }
    apply_mask(out);
    return out;
}

const Eigen::MatrixXd& TorusSolver::l_dense() const {
    if (ldense_) return *ldense_;
    const std::size_t M = keep_.size();
    auto Mat = std::make_unique<Eigen::MatrixXd>(static_cast<Eigen::Index>(M),
                                                 static_cast<Eigen::Index>(M));
    if (opt_.dirichlet_l) {
        const Eigen::MatrixXd& F = landau_->dense_form();
        const auto& qw = grid_.quad_weights();
        for (std::size_t p = 0; p < M; ++p) {
            const double inv_w = 1.0 / qw[keep_[p]];
            for (std::size_t j = 0; j < M; ++j)
                (*Mat)(static_cast<Eigen::Index>(p),
                       static_cast<Eigen::Index>(j)) =
                    inv_w * F(static_cast<Eigen::Index>(keep_[p]),
                              static_cast<Eigen::Index>(keep_[j]));
        }
    } else {
        VelocityField e(grid_.num_nodes());
        for (std::size_t j = 0; j < M; ++j) {
            e[keep_[j]] = Cplx{1.0, 0.0};
            auto col = landau_->apply_linearized(e);
            e[keep_[j]] = Cplx{0.0, 0.0};
            for (std::size_t p = 0; p < M; ++p)
                (*Mat)(static_cast<Eigen::Index>(p),
                       static_cast<Eigen::Index>(j)) = col[keep_[p]].real();
        }
    }
    ldense_ = std::move(Mat);
    return *ldense_;
}

void TorusSolver::implicit_solve(SpectralField& f, double coef,
                                 const std::vector<VelocityField>* extra,
                                 double extra_scale,
                                 bool crank_nicolson) const {
    const std::size_t N = keep_.size();
    const Eigen::MatrixXd& L = l_dense();
    if (lu_coef_ != coef) {
        Eigen::MatrixXd M = coef * L;
        M.diagonal().array() += 1.0;
        lu_ = std::make_unique<Eigen::PartialPivLU<Eigen::MatrixXd>>(M);
        lu_coef_ = coef;
    }

    std::vector<std::size_t> act;
    double mx = 0.0;
    std::vector<double> nrm(f.num_stored());
    for (std::size_t i = 0; i < f.num_stored(); ++i) {
        nrm[i] = grid_.norm_l2(f.mode(i));
        mx = std::max(mx, nrm[i]);
    }
    for (std::size_t i = 0; i < f.num_stored(); ++i)
        if (nrm[i] >= opt_.mode_cutoff * mx && nrm[i] > 0.0) act.push_back(i);
    if (act.empty()) return;

    const Eigen::Index m = static_cast<Eigen::Index>(act.size());
    Eigen::MatrixXd B(static_cast<Eigen::Index>(N), 2 * m);
    for (Eigen::Index c = 0; c < m; ++c) {
        const auto& mode = f.mode(act[static_cast<std::size_t>(c)]);
        for (std::size_t p = 0; p < N; ++p) {
            B(static_cast<Eigen::Index>(p), 2 * c) = mode[keep_[p]].real();
            B(static_cast<Eigen::Index>(p), 2 * c + 1) = mode[keep_[p]].imag();
        }
    }
    Eigen::MatrixXd rhsm = B;
    if (crank_nicolson) rhsm.noalias() -= coef * (L * B);
    if (extra) {
        for (Eigen::Index c = 0; c < m; ++c) {
            const auto& g = (*extra)[act[static_cast<std::size_t>(c)]];
            for (std::size_t p = 0; p < N; ++p) {
                rhsm(static_cast<Eigen::Index>(p), 2 * c) +=
                    extra_scale * g[keep_[p]].real();
                rhsm(static_cast<Eigen::Index>(p), 2 * c + 1) +=
                    extra_scale * g[keep_[p]].imag();
            }
        }
    }
    Eigen::MatrixXd X = lu_->solve(rhsm);
    for (Eigen::Index c = 0; c < m; ++c) {
        auto& mode = f.mode(act[static_cast<std::size_t>(c)]);
        for (std::size_t p = 0; p < N; ++p)
            mode[keep_[p]] = Cplx{X(static_cast<Eigen::Index>(p), 2 * c),
                                  X(static_cast<Eigen::Index>(p), 2 * c + 1)};
    }
}

void TorusSolver::step(SpectralField& f) const {
    const double dt = opt_.dt;
    const std::size_t N = grid_.num_nodes();
    if (!mask_.empty())
        for (std::size_t i = 0; i < f.num_stored(); ++i) apply_mask(f.mode(i));
    switch (opt_.scheme) {
        case Scheme::ExplicitRk2: {
            // Heun with the transport integrating factor applied exactly
            auto A = collision_rhs(f, true);
            SpectralField u1 = f;
            for (std::size_t i = 0; i < f.num_stored(); ++i) {
                auto& m = u1.mode(i);
                const auto& a = A[i];
                for (std::size_t p = 0; p < N; ++p) m[p] += dt * a[p];
            }
            rotate(u1, dt);
            auto Bb = collision_rhs(u1, true);
            for (std::size_t i = 0; i < f.num_stored(); ++i) {
                auto& m = f.mode(i);
                const auto& a = A[i];
                for (std::size_t p = 0; p < N; ++p) m[p] += 0.5 * dt * a[p];
            }
            rotate(f, dt);
            for (std::size_t i = 0; i < f.num_stored(); ++i) {
                auto& m = f.mode(i);
                const auto& b = Bb[i];
                for (std::size_t p = 0; p < N; ++p) m[p] += 0.5 * dt * b[p];
            }
            break;
        }
        case Scheme::ImexEuler: {
            if (opt_.nonlinear) {
                auto G = collision_rhs(f, false);
                for (std::size_t i = 0; i < f.num_stored(); ++i) {
                    auto& m = f.mode(i);
                    for (std::size_t p = 0; p < N; ++p) m[p] += dt * G[i][p];
                }
            }
            rotate(f, dt);
            implicit_solve(f, dt, nullptr, 0.0, false);
            break;
        }
        case Scheme::ImexStrang: {
            rotate(f, 0.5 * dt);
            if (opt_.nonlinear) {
                auto G = collision_rhs(f, false);
                implicit_solve(f, 0.5 * dt, &G, dt, true);
            } else {
                implicit_solve(f, 0.5 * dt, nullptr, 0.0, true);
            }
            rotate(f, 0.5 * dt);
            break;
        }
    }
    f.enforce_k0_real();
}

}  // namespace kwnr
