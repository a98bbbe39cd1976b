#pragma once

#include "rcbd/shift_model.hpp"

namespace rcbd {

struct PowerRequest {
    ShiftModel model;
    int blocks = 3;
    double alpha = 0.05;
    Variant method = Variant::LB;
};

// Approximate power of the chosen procedure at the request's design size:
// the noncentral chi-square tail for H, noncentral F tails for the four
// F-transform variants.
double power(const PowerRequest& request);

struct SampleSizeResult {
    Variant method = Variant::LB;
    int min_blocks = 0;
    double achieved_power = 0.0;
    int total_n = 0;  // K * min_blocks
};

// Smallest B in [b_min, b_max] whose power reaches the target, by upward
// scan. Throws NotAttainableError when even b_max falls short.
SampleSizeResult min_blocks(const ShiftModel& model, double alpha, double target,
                            Variant method, int b_min = 3, int b_max = 5000);

}  // namespace rcbd
