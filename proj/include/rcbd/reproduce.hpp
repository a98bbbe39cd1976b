#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rcbd/exact_null.hpp"
#include "rcbd/shift_model.hpp"

namespace rcbd::repro {

// ---------------------------------------------------------------------------
// Tables 1-3: exact vs approximate Type I error, K = 3, 4, 5
// ---------------------------------------------------------------------------
// The (B, c) pairs come from the published comparison, which drew its exact
// critical values from Hollander's tables; everything else is recomputed.
// Errors and percentages follow the published arithmetic: differences are
// taken against the attained level rounded to four decimals.

struct ExactErrorRow {
    int blocks = 0;
    double c = 0.0;                // tabulated critical value (recipe input)
    double alpha = 0.0;            // attained exact level, recomputed here
    double alpha_published = 0.0;  // level printed alongside c in the source
    std::optional<double> err_t, err_r, err_m, err_l;
    std::optional<double> pct_t, pct_r, pct_m, pct_l;
};

struct ExactErrorRecipeRow {
    int blocks = 0;
    double c = 0.0;
    double alpha_published = 0.0;
};
std::vector<ExactErrorRecipeRow> exact_error_recipe(int k);
std::vector<ExactErrorRow> exact_error_table(int table_number);  // 1..3

// ---------------------------------------------------------------------------
// Tables 4-6: simulated Type I error, K = 3, 4, 5
// ---------------------------------------------------------------------------

struct SimErrorRow {
    int blocks = 0;
    double alpha = 0.0;
    // err_x = simulated rate - alpha; empty without simulation.
    std::optional<double> err_t, err_r, err_m, err_l;
};

std::vector<SimErrorRow> sim_error_table(int table_number, bool with_sim, long reps,
                                         uint64_t seed, int workers);  // 4..6

// ---------------------------------------------------------------------------
// Tables 7-14: estimated and simulated power, minimum block counts
// ---------------------------------------------------------------------------

struct PowerTableSpec {
    Family family = Family::normal;
    int treatments = 3;
    double sigma = 1.0;  // scale applied to the unit shift patterns
    std::vector<std::vector<double>> patterns;
};

PowerTableSpec power_table_spec(int table_number);  // 7..14

struct PowerRow {
    std::string shifts;  // display label
    Variant method = Variant::H;
    int min_b = 0;
    double estimated = 0.0;
    std::optional<double> simulated;   // with simulation only
    std::optional<double> difference;  // estimated - simulated
};

std::vector<PowerRow> power_table(int table_number, bool with_sim, long reps,
                                  uint64_t seed, int workers);

// Figure data: estimated power against B for the largest shift pattern,
// every family and method. figure 1 -> K=3, figure 2 -> K=5.
struct CurvePoint {
    Family family = Family::normal;
    Variant method = Variant::H;
    int blocks = 0;
    double power = 0.0;
};
std::vector<CurvePoint> figure_curves(int figure_number, int b_max = 30);

}  // namespace rcbd::repro
