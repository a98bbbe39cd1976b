#include "rcbd/dist.hpp"
#include "rcbd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <vector>

namespace rcbd::dist {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrtPi = 1.7724538509055160273;

double clamp01(double p) { return std::min(1.0, std::max(0.0, p)); }

// ===========================================================================
// Regularized incomplete gamma: series for P(a,x), continued fraction for
// Q(a,x) (modified Lentz). Switch at x = a + 1.
// ===========================================================================

double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 1000; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q(double a, double x) {
    if (x <= 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

// ===========================================================================
// Regularized incomplete beta I_x(a,b): continued fraction (Lentz), with the
// symmetry switch at x = (a+1)/(a+b+2).
// ===========================================================================

double beta_cf(double a, double b, double x) {
    const double tiny = 1e-300;
    double qab = a + b;
    double qap = a + 1.0;
    double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 1000; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return h;
}

double ibeta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double lnfront = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                     a * std::log(x) + b * std::log1p(-x);
    double front = std::exp(lnfront);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cf(a, b, x) / a;
    }
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

// ===========================================================================
// Generic quantile by bracket expansion + Illinois iteration on the sf.
// sf is nonincreasing; solve sf(x) = p for x > 0.
// ===========================================================================

double invert_sf(const std::function<double(double)>& sf, double p,
                 double guess, const Accuracy& acc) {
    double lo = 0.0;
    double flo = 1.0 - p;  // sf(0) = 1 for our distributions
    double hi = std::max(guess, 1e-8);
    double fhi = sf(hi) - p;
    int expand = 0;
    while (fhi > 0.0) {
        lo = hi;
        flo = fhi;
        hi *= 2.0;
        fhi = sf(hi) - p;
        if (++expand > 400) throw DomainError("quantile bracket expansion failed");
    }
    // Illinois variant of regula falsi; converge on the sf residual, with the
    // bracket width as a machine-precision safety stop.
    double x = hi, fx = fhi;
    double target = std::min(1e-13, 0.01 * acc.quantile_tol);
    for (int it = 0; it < 500; ++it) {
        x = (flo == fhi) ? 0.5 * (lo + hi) : lo + (hi - lo) * flo / (flo - fhi);
        if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
        fx = sf(x) - p;
        if (std::fabs(fx) <= target) break;
        if (fx > 0.0) {
            lo = x;
            flo = fx;
            fhi *= 0.5;
        } else {
            hi = x;
            fhi = fx;
            flo *= 0.5;
        }
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * (std::fabs(lo) + std::fabs(hi))) break;
    }
    return x;
}

// ===========================================================================
// Gauss-Hermite nodes/weights (physicists' convention), Newton iteration on
// the orthonormal recurrence. Cached per node count.
// ===========================================================================

struct HermiteRule {
    std::vector<double> x;  // positive half of the symmetric node set
    std::vector<double> w;
};

HermiteRule build_hermite(int n) {
    HermiteRule rule;
    int m = (n + 1) / 2;
    rule.x.resize(m);
    rule.w.resize(m);
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        } else if (i == 1) {
            z -= 1.14 * std::pow(n, 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * rule.x[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * rule.x[1];
        } else {
            z = 2.0 * z - rule.x[i - 2];
        }
        double pp = 0.0;
        for (int it = 0; it < 200; ++it) {
            double p1 = std::pow(M_PI, -0.25);
            double p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            double z1 = z;
            z = z1 - p1 / pp;
            if (std::fabs(z - z1) <= 1e-15 * (1.0 + std::fabs(z))) break;
        }
        rule.x[i] = z;
        rule.w[i] = 2.0 / (pp * pp);
    }
    return rule;
}

const HermiteRule& hermite_rule(int n) {
    static std::mutex mu;
    static std::map<int, HermiteRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_hermite(n)).first;
    return it->second;
}

}  // namespace

// ===========================================================================
// Public surface
// ===========================================================================

double std_normal_cdf(double x) {
    return 0.5 * std::erfc(-x / kSqrt2);
}

double std_normal_quantile(double p) {
    // Wichura (1988), algorithm AS241 (PPND16).
    if (!(p > 0.0 && p < 1.0)) throw DomainError("std_normal_quantile: p outside (0,1)");
    double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double x;
    if (r <= 5.0) {
        r -= 1.6;
        x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-6) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
    }
    return (q < 0.0) ? -x : x;
}

double chi2_sf(double x, double df, const Accuracy&) {
    if (df <= 0.0) throw DomainError("chi2_sf: df must be positive");
    if (x < 0.0) throw DomainError("chi2_sf: x must be nonnegative");
    return clamp01(gamma_q(0.5 * df, 0.5 * x));
}

double chi2_quantile(double p, double df, const Accuracy& acc) {
    if (df <= 0.0) throw DomainError("chi2_quantile: df must be positive");
    if (!(p > 0.0 && p < 1.0)) throw DomainError("chi2_quantile: p outside (0,1)");
    // Wilson-Hilferty starting point.
    double z = std_normal_quantile(1.0 - p);
    double t = 1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df));
    double guess = df * t * t * t;
    if (!(guess > 0.0)) guess = df;
    return invert_sf([df](double v) { return chi2_sf(v, df); }, p, guess, acc);
}

double f_sf(double x, double d1, double d2, const Accuracy&) {
    if (d1 <= 0.0 || d2 <= 0.0) throw DomainError("f_sf: degrees of freedom must be positive");
    if (x < 0.0) throw DomainError("f_sf: x must be nonnegative");
    if (x == 0.0) return 1.0;
    // P{F > x} = I_y(d2/2, d1/2) with y = d2 / (d2 + d1 x).
    double y = d2 / (d2 + d1 * x);
    return clamp01(ibeta(0.5 * d2, 0.5 * d1, y));
}

double f_quantile(double p, double d1, double d2, const Accuracy& acc) {
    if (d1 <= 0.0 || d2 <= 0.0) throw DomainError("f_quantile: degrees of freedom must be positive");
    if (!(p > 0.0 && p < 1.0)) throw DomainError("f_quantile: p outside (0,1)");
    double guess = (d2 > 2.0) ? d2 / (d2 - 2.0) : 1.0;
    return invert_sf([d1, d2](double v) { return f_sf(v, d1, d2); }, p, guess, acc);
}

namespace {

// Poisson(lambda/2)-weighted mixture of central survival terms, expanded
// outward from the modal index until the residual mass is below abs_tol.
double poisson_mixture_sf(double lambda, const Accuracy& acc,
                          const std::function<double(int)>& term) {
    double half = 0.5 * lambda;
    int mode = static_cast<int>(half);
    double logw0 = -half + ((mode > 0) ? mode * std::log(half) : 0.0) - std::lgamma(mode + 1.0);
    double w0 = std::exp(logw0);
    double total = w0 * term(mode);
    double mass = w0;
    double wup = w0, wdn = w0;
    int up = mode, dn = mode;
    for (int used = 1; used < acc.max_series_terms; ++used) {
        bool moved = false;
        if (wup > 0.0) {
            ++up;
            wup *= half / up;
            total += wup * term(up);
            mass += wup;
            moved = true;
        }
        if (dn > 0 && wdn > 0.0) {
            wdn *= dn / half;
            --dn;
            total += wdn * term(dn);
            mass += wdn;
            moved = true;
        }
        if (1.0 - mass < acc.abs_tol) return clamp01(total);
        if (!moved) break;
    }
    if (1.0 - mass < acc.abs_tol) return clamp01(total);
    throw SeriesError("noncentral series failed to converge within max_series_terms");
}

}  // namespace

double nc_chi2_sf(double x, double df, double lambda, const Accuracy& acc) {
    if (df <= 0.0) throw DomainError("nc_chi2_sf: df must be positive");
    if (x < 0.0) throw DomainError("nc_chi2_sf: x must be nonnegative");
    if (lambda < 0.0) throw DomainError("nc_chi2_sf: lambda must be nonnegative");
    if (lambda == 0.0) return chi2_sf(x, df, acc);
    return poisson_mixture_sf(lambda, acc, [&](int j) {
        return gamma_q(0.5 * df + j, 0.5 * x);
    });
}

double nc_f_sf(double x, double d1, double d2, double lambda, const Accuracy& acc) {
    if (d1 <= 0.0 || d2 <= 0.0) throw DomainError("nc_f_sf: degrees of freedom must be positive");
    if (x < 0.0) throw DomainError("nc_f_sf: x must be nonnegative");
    if (lambda < 0.0) throw DomainError("nc_f_sf: lambda must be nonnegative");
    if (lambda == 0.0) return f_sf(x, d1, d2, acc);
    if (x == 0.0) return 1.0;
    // Conditional on the Poisson index j the statistic is central F with
    // numerator df d1 + 2j; the beta argument is invariant across j.
    double y = d2 / (d2 + d1 * x);
    return poisson_mixture_sf(lambda, acc, [&](int j) {
        return ibeta(0.5 * d2, 0.5 * d1 + j, y);
    });
}

double normal_expectation(const std::function<double(double)>& f, int nodes) {
    if (nodes < 8) throw DomainError("normal_expectation: need at least 8 nodes");
    const HermiteRule& rule = hermite_rule(nodes);
    // E[f(Z)] = (1/sqrt(pi)) * sum_i w_i f(sqrt(2) x_i), symmetric node pairs.
    double sum = 0.0;
    bool odd_center = (nodes % 2 != 0);
    size_t m = rule.x.size();
    for (size_t i = 0; i < m; ++i) {
        double xi = rule.x[i] * kSqrt2;
        // For odd n the smallest computed root is the center node at 0.
        bool center = odd_center && (i + 1 == m);
        if (center) {
            sum += rule.w[i] * f(0.0);
        } else {
            sum += rule.w[i] * (f(xi) + f(-xi));
        }
    }
    return sum / kSqrtPi;
}

double normal_expectation_adaptive(const std::function<double(double)>& f, double tol) {
    int n = 96;
    double prev = normal_expectation(f, n);
    for (int round = 0; round < 4; ++round) {
        n *= 2;
        double next = normal_expectation(f, n);
        if (std::fabs(next - prev) <= tol) return next;
        prev = next;
    }
    return prev;
}

double regularized_gamma_q(double a, double x) { return gamma_q(a, x); }
double regularized_beta(double a, double b, double x) { return ibeta(a, b, x); }

}  // namespace rcbd::dist
