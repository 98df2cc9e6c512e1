#include "kwnr/decay.hpp"

#include <cmath>
#include <stdexcept>

namespace kwnr {

double kappa_theory(ModelKind kind, double gamma, double s,
                    const WeightSpec& w) {
    double shift = (kind == ModelKind::Landau) ? gamma + 2.0
                                               : gamma + 2.0 * s;
    if (shift >= 0.0) return 1.0;  // hard range
    if (w.q <= 0.0)
        throw std::invalid_argument(
            "soft-range decay requires an exponential weight (q > 0)");
    if (w.theta <= 0.0) throw std::invalid_argument("theta must be positive");
    return w.theta / (w.theta + std::abs(shift));
}

namespace {

struct InnerFit {
    double logc = 0.0, lambda = 0.0, rss = 0.0;
};

InnerFit inner_solve(const std::vector<double>& t,
                     const std::vector<double>& logy, double kappa) {
    // least squares of logy ~ logc - lambda * t^kappa
    double s1 = static_cast<double>(t.size());
    double sx = 0.0, sxx = 0.0, sy = 0.0, sxy = 0.0;
    std::vector<double> x(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        x[i] = std::pow(t[i], kappa);
        sx += x[i];
        sxx += x[i] * x[i];
        sy += logy[i];
        sxy += x[i] * logy[i];
    }
    double det = s1 * sxx - sx * sx;
    InnerFit f;
    if (std::abs(det) < 1e-300) {
        f.logc = sy / s1;
        f.lambda = 0.0;
    } else {
        // logy = a + b x with b = -lambda
        double b = (s1 * sxy - sx * sy) / det;
        f.logc = (sy - b * sx) / s1;
        f.lambda = -b;
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
        double r = logy[i] - (f.logc - f.lambda * x[i]);
        f.rss += r * r;
    }
    return f;
}

}  // namespace

DecayFit fit_subexponential(
    const std::vector<std::pair<double, double>>& series,
    std::pair<double, double> window) {
    auto [t_lo, t_hi] = window;
    if (t_lo <= 0.0 || t_hi <= t_lo)
        throw std::invalid_argument("degenerate fit window");
    std::vector<double> t, logy;
    for (const auto& [ti, vi] : series) {
        if (ti < t_lo || ti > t_hi) continue;
        if (vi <= 0.0)
            throw std::invalid_argument("fit requires positive values");
        t.push_back(ti);
        logy.push_back(std::log(vi));
    }
    if (t.size() < 10)
        throw std::invalid_argument("fit requires >= 10 points in window");

    const double klo = 0.1, khi = 1.5;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = klo, b = khi;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = inner_solve(t, logy, c).rss;
    double fd = inner_solve(t, logy, d).rss;
    for (int it = 0; it < 80; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = inner_solve(t, logy, c).rss;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = inner_solve(t, logy, d).rss;
        }
    }
    double kappa = 0.5 * (a + b);
    InnerFit best = inner_solve(t, logy, kappa);

    DecayFit fit;
    fit.kappa = kappa;
    fit.c = std::exp(best.logc);
    fit.rss = best.rss;
    fit.window = window;
    if (best.lambda < 0.0) {
        // growing series: clamp and refit the constant
        double mean = 0.0;
        for (double v : logy) mean += v;
        mean /= static_cast<double>(logy.size());
        best.logc = mean;
        best.lambda = 0.0;
        best.rss = 0.0;
        for (double v : logy) best.rss += (v - mean) * (v - mean);
        fit.c = std::exp(mean);
        fit.rss = best.rss;
        fit.flagged = true;
    }
    fit.lambda = best.lambda;
    if (kappa < klo + 1e-3 || kappa > khi - 1e-3) fit.flagged = true;
    // flat objective: lambda carries no signal, kappa is unidentified
    double span = 0.0;
    for (double v : logy)
        span = std::max(span, std::abs(v - best.logc));
    if (fit.lambda * std::pow(t.back(), kappa) < 1e-10 * (1.0 + span))
        fit.flagged = true;
    return fit;
}

std::pair<double, double> splitting_diagnostic(const SpectralField& field,
                                               double t, double rho,
                                               double p_prime) {
    if (t <= 0.0 || rho <= 0.0)
        throw std::invalid_argument("splitting needs t > 0 and rho > 0");
    const VelocityGrid& g = field.grid();
    double cut = rho * std::pow(t, p_prime);
    std::vector<char> low(g.num_nodes());
    for (std::size_t p = 0; p < g.num_nodes(); ++p) {
        const Vec3& v = g.nodes()[p];
        double jap = std::sqrt(1.0 + v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        low[p] = (jap <= cut) ? 1 : 0;
    }
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < field.num_stored(); ++i) {
        double l2 = 0.0, h2 = 0.0;
        const VelocityField& f = field.mode(i);
        for (std::size_t p = 0; p < g.num_nodes(); ++p) {
            double m = g.quad_weights()[p] * std::norm(f[p]);
            if (low[p])
                l2 += m;
            else
                h2 += m;
        }
        double mult = (field.keys()[i] == KPoint{0, 0, 0}) ? 1.0 : 2.0;
        lo += mult * std::sqrt(l2);
        hi += mult * std::sqrt(h2);
    }
    return {lo, hi};
}

}  // namespace kwnr
