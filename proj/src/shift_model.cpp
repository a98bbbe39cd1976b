#include "rcbd/shift_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "rcbd/dist.hpp"
#include "rcbd/errors.hpp"

namespace rcbd {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// Positions of each label in the nondecreasing-theta ordering; the appendix
// formulas distinguish cases by these positions only.
std::vector<int> sorted_positions(const std::vector<double>& theta) {
    const int k = static_cast<int>(theta.size());
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return theta[a] < theta[b]; });
    std::vector<int> pos(k);
    for (int r = 0; r < k; ++r) pos[order[r]] = r;
    return pos;
}

double p2_uniform(double ti, double tl, double tm, int pi, int pl, int pm) {
    if (pi < pl) {  // i < l < m
        double im = ti - tm, lm = tl - tm;
        return 1.0 / 3.0 - 0.5 * lm + im - im * lm + im * im - 0.5 * lm * im * im +
               im * im * im / 3.0;
    }
    if (pi < pm) {  // l < i < m
        double im = ti - tm, lm = tl - tm;
        return 1.0 / 3.0 + im - 0.5 * lm + 0.5 * im * im - 0.5 * lm * lm -
               lm * lm * lm / 6.0;
    }
    // l < m < i
    double im = ti - tm, lm = tl - tm, il = ti - tl;
    return 1.0 / 3.0 + im - 0.5 * lm - 0.5 * lm * il * il - 0.5 * (tm - tl) * (tm - tl) +
           (tl - ti) * (tl - ti) * (tl - ti) / 3.0;
}

double p2_laplace(double ti, double tl, double tm, int pi, int pl, int pm) {
    if (pi < pl) {
        return 0.125 * (3.0 - 2.0 * (tl - tm)) * std::exp(ti - tm) -
               std::exp(2.0 * ti - tl - tm) / 12.0 + std::exp(ti + tl - 2.0 * tm) / 24.0;
    }
    if (pi < pm) {
        return 0.25 * (2.0 - ti + tm) * std::exp(ti - tm) - 0.25 * std::exp(tl - tm) +
               std::exp(ti + tl - 2.0 * tm) / 24.0 + std::exp(2.0 * tl - ti - tm) / 24.0;
    }
    return 1.0 - 0.125 * (1.0 + 2.0 * (ti - tm)) * std::exp(tl - ti) -
           0.25 * (2.0 + ti - tm) * std::exp(tm - ti) -
           std::exp(tl + tm - 2.0 * ti) / 12.0 + std::exp(2.0 * tl - ti - tm) / 24.0;
}

double p2_exponential(double ti, double tl, double tm, int pi, int pm) {
    if (pi < pm) {  // i < l < m  or  l < i < m
        return 0.5 * std::exp(ti - tm) - std::exp(ti + tl - 2.0 * tm) / 6.0;
    }
    return 1.0 - 0.5 * std::exp(tl - ti) - 0.5 * std::exp(tm - ti) +
           std::exp(tl + tm - 2.0 * ti) / 3.0;
}

}  // namespace

Family family_from_string(const std::string& name) {
    if (name == "uniform") return Family::uniform;
    if (name == "normal") return Family::normal;
    if (name == "laplace") return Family::laplace;
    if (name == "exponential") return Family::exponential;
    throw DomainError("unknown distribution family: " + name);
}

std::string to_string(Family family) {
    switch (family) {
        case Family::uniform: return "uniform";
        case Family::normal: return "normal";
        case Family::laplace: return "laplace";
        case Family::exponential: return "exponential";
    }
    return "?";
}

double family_variance(Family family) {
    switch (family) {
        case Family::uniform: return 1.0 / 12.0;
        case Family::normal: return 1.0;
        case Family::laplace: return 2.0;
        case Family::exponential: return 1.0;
    }
    return 0.0;
}

double f_star_zero(Family family) {
    switch (family) {
        case Family::uniform: return 1.0;
        case Family::normal: return 0.5 / std::sqrt(M_PI);
        case Family::laplace: return 0.25;
        case Family::exponential: return 0.5;
    }
    return 0.0;
}

ShiftModel::ShiftModel(Family f, std::vector<double> shifts)
    : family(f), theta(std::move(shifts)) {
    if (theta.size() < 2) throw DimensionError("shift model needs at least 2 treatments");
    for (double t : theta) {
        if (!std::isfinite(t)) throw DomainError("shifts must be finite");
    }
    if (family == Family::uniform) {
        auto [lo, hi] = std::minmax_element(theta.begin(), theta.end());
        if (*hi - *lo >= 1.0) {
            throw DomainError("uniform shifts must satisfy max|theta_i - theta_l| < 1");
        }
    }
}

double p1(const ShiftModel& model, int i, int l) {
    if (i == l) throw DomainError("p1 requires distinct treatments");
    auto pos = sorted_positions(model.theta);
    double ti = model.theta[i], tl = model.theta[l];
    double d = ti - tl;
    switch (model.family) {
        case Family::uniform:
            return (pos[i] < pos[l]) ? 0.5 + d + 0.5 * d * d : 0.5 + d - 0.5 * d * d;
        case Family::normal:
            return dist::std_normal_cdf(d / kSqrt2);
        case Family::laplace:
            return (pos[i] < pos[l]) ? 0.25 * (2.0 - d) * std::exp(d)
                                     : 1.0 - 0.25 * (2.0 + d) * std::exp(-d);
        case Family::exponential:
            return (pos[i] < pos[l]) ? 0.5 * std::exp(d) : 1.0 - 0.5 * std::exp(-d);
    }
    return 0.5;
}

double p2(const ShiftModel& model, int i, int l, int m) {
    if (i == l || i == m || l == m) throw DomainError("p2 requires distinct treatments");
    auto pos = sorted_positions(model.theta);
    // Canonicalize the symmetric pair so the case split sees pos_l < pos_m.
    if (pos[l] > pos[m]) std::swap(l, m);
    double ti = model.theta[i], tl = model.theta[l], tm = model.theta[m];
    switch (model.family) {
        case Family::uniform:
            return p2_uniform(ti, tl, tm, pos[i], pos[l], pos[m]);
        case Family::normal: {
            double a = ti - tl, b = ti - tm;
            return dist::normal_expectation_adaptive([a, b](double z) {
                return dist::std_normal_cdf(z + a) * dist::std_normal_cdf(z + b);
            });
        }
        case Family::laplace:
            return p2_laplace(ti, tl, tm, pos[i], pos[l], pos[m]);
        case Family::exponential:
            return p2_exponential(ti, tl, tm, pos[i], pos[m]);
    }
    return 1.0 / 3.0;
}

RankMoments rank_moments(const ShiftModel& model, int blocks) {
    if (blocks < 2) throw DimensionError("rank moments need B >= 2");
    const int k = model.treatments();
    RankMoments mom;
    mom.mu.resize(k);
    mom.sigma2.resize(k);
    double sum_sq = 0.0;
    for (int i = 0; i < k; ++i) {
        double s1 = 0.0;
        for (int l = 0; l < k; ++l) {
            if (l != i) s1 += p1(model, i, l);
        }
        double s2 = 0.0;
        for (int l = 0; l < k; ++l) {
            for (int m = l + 1; m < k; ++m) {
                if (l != i && m != i) s2 += p2(model, i, l, m);
            }
        }
        double mu1 = s1 + 1.0;                       // per-block E[R_ij]
        double var1 = s1 - s1 * s1 + 2.0 * s2;       // per-block Var[R_ij]
        mom.mu[i] = blocks * mu1;
        mom.sigma2[i] = blocks * var1;
        sum_sq += mom.mu[i] * mom.mu[i] + mom.sigma2[i];
    }
    mom.mu_t = 12.0 * sum_sq / (static_cast<double>(blocks) * k * (k + 1)) -
               3.0 * blocks * (k + 1);
    return mom;
}

double tau_h(const ShiftModel& model, int blocks) {
    const int k = model.treatments();
    double mean = std::accumulate(model.theta.begin(), model.theta.end(), 0.0) / k;
    double ss = 0.0;
    for (double t : model.theta) ss += (t - mean) * (t - mean);
    double f0 = f_star_zero(model.family);
    return 12.0 * blocks * k / (k + 1.0) * f0 * f0 * ss;
}

Variant variant_from_string(const std::string& name) {
    if (name == "H" || name == "h") return Variant::H;
    if (name == "MA" || name == "ma") return Variant::MA;
    if (name == "MB" || name == "mb") return Variant::MB;
    if (name == "LA" || name == "la") return Variant::LA;
    if (name == "LB" || name == "lb") return Variant::LB;
    throw DomainError("unknown method: " + name);
}

std::string to_string(Variant variant) {
    switch (variant) {
        case Variant::H: return "H";
        case Variant::MA: return "MA";
        case Variant::MB: return "MB";
        case Variant::LA: return "LA";
        case Variant::LB: return "LB";
    }
    return "?";
}

Noncentrality noncentrality(const ShiftModel& model, int blocks, Variant variant) {
    const int k = model.treatments();
    Noncentrality nc;
    nc.variant = variant;
    if (variant == Variant::H) {
        nc.value = tau_h(model, blocks);
        nc.dfs = {k - 1.0, 0.0};
        return nc;
    }
    bool m_scale = (variant == Variant::MA || variant == Variant::MB);
    double s = m_scale ? static_cast<double>(blocks) * (k - 1)
                       : static_cast<double>(blocks) * (k + 1) - 2.0;
    nc.dfs = m_scale ? df_m_pair(k, blocks) : df_l_pair(k, blocks);

    double mu_t = rank_moments(model, blocks).mu_t;
    if (mu_t >= s) throw DegenerateError("nonnull mean reaches the matching constant");
    double delta_star = mu_t / (s - mu_t);
    double value;
    if (variant == Variant::MA || variant == Variant::LA) {
        value = nc.dfs.d2 * delta_star - nc.dfs.d1;
    } else {
        if (nc.dfs.d2 <= 2.0) {
            throw DomainError("variant " + to_string(variant) + " needs f2 > 2 (B too small)");
        }
        value = nc.dfs.d2 * nc.dfs.d2 / (nc.dfs.d2 - 2.0) * delta_star - nc.dfs.d1;
    }
    // Quadrature noise near the null leaves values within ~1e-10 of zero;
    // snap those so the central case is recovered exactly.
    nc.value = (value < 1e-9) ? 0.0 : value;
    return nc;
}

}  // namespace rcbd
