#include "rcbd/reproduce.hpp"

#include <cmath>
#include <cstdio>

#include "rcbd/dist.hpp"
#include "rcbd/errors.hpp"
#include "rcbd/mc_sim.hpp"
#include "rcbd/power.hpp"

namespace rcbd::repro {

namespace {

// The published comparison evaluated the approximations at critical values
// carrying five significant figures (the precision of its source tables).
double sig5(double x) {
    if (x == 0.0) return 0.0;
    double mag = std::pow(10.0, 4.0 - std::floor(std::log10(std::fabs(x))));
    return std::round(x * mag) / mag;
}

const std::vector<std::vector<double>>& patterns_k3() {
    static const std::vector<std::vector<double>> p = {
        {-1.0, 0.0, 1.0},
        {-2.0 / 3.0, 0.0, 2.0 / 3.0},
        {-0.5, 0.0, 0.5},
        {-1.0 / 3.0, 0.0, 1.0 / 3.0},
    };
    return p;
}

const std::vector<std::vector<double>>& patterns_k5() {
    static const std::vector<std::vector<double>> p = {
        {-1.0, -0.5, 0.0, 0.5, 1.0},
        {-2.0 / 3.0, -1.0 / 3.0, 0.0, 1.0 / 3.0, 2.0 / 3.0},
        {-0.5, -0.25, 0.0, 0.25, 0.5},
        {-1.0 / 3.0, -1.0 / 6.0, 0.0, 1.0 / 6.0, 1.0 / 3.0},
    };
    return p;
}

std::string pattern_label(const std::vector<double>& pattern, double sigma) {
    char buf[160];
    std::string inner;
    for (size_t i = 0; i < pattern.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%g", pattern[i]);
        if (i) inner += ", ";
        inner += buf;
    }
    if (sigma == 1.0) return "(" + inner + ")";
    std::snprintf(buf, sizeof buf, "%.4f*(%s)", sigma, inner.c_str());
    return buf;
}

}  // namespace

std::vector<ExactErrorRecipeRow> exact_error_recipe(int k) {
    switch (k) {
        case 3:
            return {{3, 14.0 / 3, 0.1944}, {3, 6.0, 0.0278},
                    {4, 4.5, 0.1250},      {4, 6.5, 0.0417},  {4, 8.0, 0.0046},
                    {5, 5.2, 0.0934},      {5, 6.4, 0.0394},  {5, 8.4, 0.0085},
                    {6, 13.0 / 3, 0.1416}, {6, 19.0 / 3, 0.0521}, {6, 25.0 / 3, 0.0120},
                    {7, 32.0 / 7, 0.1118}, {7, 6.0, 0.0515},  {7, 8.0, 0.0162},
                    {8, 5.25, 0.0789},     {8, 6.25, 0.0469}, {8, 9.0, 0.0099}};
        case 4:
            return {{3, 5.8, 0.1476},    {3, 7.0, 0.0538},   {3, 8.2, 0.0174},
                    {4, 6.0, 0.1053},    {4, 7.5, 0.0517},   {4, 9.3, 0.0115},
                    {5, 6.12, 0.1066},   {5, 7.32, 0.0548},  {5, 9.72, 0.0120},
                    {6, 6.2, 0.1081},    {6, 7.4, 0.0558},   {6, 10.0, 0.0103},
                    {7, 6.257, 0.1000},  {7, 7.629, 0.0520}, {7, 10.371, 0.0100},
                    {8, 6.3, 0.1000},    {8, 7.5, 0.0510},   {8, 10.35, 0.0110}};
        case 5:
            return {{3, 7.2, 0.1172},    {3, 8.267, 0.0559}, {3, 9.867, 0.0151},
                    {4, 7.4, 0.1129},    {4, 8.6, 0.0597},   {4, 11.0, 0.0102},
                    {5, 7.52, 0.1070},   {5, 8.80, 0.0560},  {5, 11.52, 0.0100},
                    {6, 7.60, 0.1025},   {6, 8.933, 0.0550}, {6, 11.733, 0.0109},
                    {7, 7.657, 0.1025},  {7, 9.029, 0.0527}, {7, 12.114, 0.0100},
                    {8, 7.6, 0.1039},    {8, 9.1, 0.0521},   {8, 12.2, 0.0104}};
        default:
            throw DomainError("exact error tables cover K = 3, 4, 5");
    }
}

std::vector<ExactErrorRow> exact_error_table(int table_number) {
    if (table_number < 1 || table_number > 3) throw DomainError("tables 1-3 only");
    const int k = table_number + 2;
    std::vector<ExactErrorRow> rows;
    int prev_b = -1;
    exact::ExactNullDist dist = exact::ExactNullDist::compute(k, 2);
    for (auto recipe : exact_error_recipe(k)) {
        if (recipe.blocks != prev_b) {
            dist = exact::ExactNullDist::compute(k, recipe.blocks);
            prev_b = recipe.blocks;
        }
        long long key = dist.nearest_key(recipe.c);
        ExactErrorRow row;
        row.blocks = recipe.blocks;
        row.c = dist.t_of_key(key);
        row.alpha = dist.tail_geq_key(key);
        row.alpha_published = recipe.alpha_published;

        const int b = recipe.blocks;
        double c5 = sig5(row.c);
        double m = static_cast<double>(b) * (k - 1);
        long long m_key = static_cast<long long>(b) * b * k * (k + 1) * (2 * k + 1) / 6;
        // Differences against the printed level, as published.
        auto fill = [&](double p, std::optional<double>& err, std::optional<double>& pct) {
            err = p - row.alpha_published;
            pct = 100.0 * *err / row.alpha_published;
        };
        fill(dist::chi2_sf(c5, k - 1.0), row.err_t, row.pct_t);
        if (key != m_key) {
            double f_rc = (b - 1) * c5 / (m - c5);
            auto dr = df_r_pair(k, b);
            auto dm = df_m_pair(k, b);
            fill(dist::f_sf(f_rc, dr.d1, dr.d2), row.err_r, row.pct_r);
            fill(dist::f_sf(f_rc, dm.d1, dm.d2), row.err_m, row.pct_m);
        }
        auto dl = df_l_pair(k, b);
        fill(dist::f_sf(f_ratio_l(c5, k, b), dl.d1, dl.d2), row.err_l, row.pct_l);
        rows.push_back(row);
    }
    return rows;
}

std::vector<SimErrorRow> sim_error_table(int table_number, bool with_sim, long reps,
                                         uint64_t seed, int workers) {
    if (table_number < 4 || table_number > 6) throw DomainError("tables 4-6 only");
    const int k = table_number - 1;
    const double alphas[] = {0.10, 0.05, 0.01};
    std::vector<SimErrorRow> rows;
    uint64_t stream = seed;
    for (int b : {5, 10, 15, 20}) {
        for (double alpha : alphas) {
            SimErrorRow row;
            row.blocks = b;
            row.alpha = alpha;
            if (with_sim) {
                ShiftModel null_model(Family::normal, std::vector<double>(k, 0.0));
                auto res = mc::simulate_rejections({null_model, b, alpha, reps,
                                                    ++stream, workers});
                row.err_t = res.rate_t - alpha;
                row.err_r = res.rate_r - alpha;
                row.err_m = res.rate_m - alpha;
                row.err_l = res.rate_l - alpha;
            }
            rows.push_back(row);
        }
    }
    return rows;
}

PowerTableSpec power_table_spec(int table_number) {
    PowerTableSpec spec;
    switch (table_number) {
        case 7: case 8: spec.family = Family::uniform; break;
        case 9: case 10: spec.family = Family::normal; break;
        case 11: case 12: spec.family = Family::laplace; break;
        case 13: case 14: spec.family = Family::exponential; break;
        default: throw DomainError("power tables cover 7-14");
    }
    spec.treatments = (table_number % 2 == 1) ? 3 : 5;
    spec.sigma = std::sqrt(family_variance(spec.family));
    spec.patterns = (spec.treatments == 3) ? patterns_k3() : patterns_k5();
    return spec;
}

std::vector<PowerRow> power_table(int table_number, bool with_sim, long reps,
                                  uint64_t seed, int workers) {
    auto spec = power_table_spec(table_number);
    const Variant methods[] = {Variant::H, Variant::MA, Variant::MB, Variant::LA,
                               Variant::LB};
    std::vector<PowerRow> rows;
    uint64_t stream = seed;
    for (const auto& pattern : spec.patterns) {
        std::vector<double> theta(pattern.size());
        for (size_t i = 0; i < pattern.size(); ++i) theta[i] = spec.sigma * pattern[i];
        ShiftModel model(spec.family, theta);
        std::string label = pattern_label(pattern, spec.sigma);
        for (Variant method : methods) {
            auto res = min_blocks(model, 0.05, 0.90, method);
            PowerRow row;
            row.shifts = label;
            row.method = method;
            row.min_b = res.min_blocks;
            row.estimated = res.achieved_power;
            if (with_sim) {
                auto sim = mc::simulate_power(
                    {model, res.min_blocks, 0.05, reps, ++stream, workers});
                double rate = 0.0;
                switch (method) {
                    case Variant::H: rate = sim.rate_t; break;
                    case Variant::MA:
                    case Variant::MB: rate = sim.rate_m; break;
                    case Variant::LA:
                    case Variant::LB: rate = sim.rate_l; break;
                }
                row.simulated = rate;
                row.difference = row.estimated - rate;
            }
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<CurvePoint> figure_curves(int figure_number, int b_max) {
    if (figure_number < 1 || figure_number > 2) throw DomainError("figures 1-2 only");
    const int k = (figure_number == 1) ? 3 : 5;
    std::vector<CurvePoint> points;
    for (Family family : {Family::uniform, Family::normal, Family::laplace,
                          Family::exponential}) {
        double sigma = std::sqrt(family_variance(family));
        const auto& pattern = (k == 3) ? patterns_k3()[0] : patterns_k5()[0];
        std::vector<double> theta(pattern.size());
        for (size_t i = 0; i < pattern.size(); ++i) theta[i] = sigma * pattern[i];
        ShiftModel model(family, theta);
        for (Variant method : {Variant::H, Variant::MA, Variant::MB, Variant::LA,
                               Variant::LB}) {
            for (int b = 3; b <= b_max; ++b) {
                points.push_back({family, method, b, power({model, b, 0.05, method})});
            }
        }
    }
    return points;
}

}  // namespace rcbd::repro
