#pragma once

#include <cstdint>

#include "rcbd/shift_model.hpp"

namespace rcbd::mc {

// xoshiro256++ with the state of replication r derived from (seed, r) by a
// splitmix64 hash: every rep owns an independent substream, so results do
// not depend on how reps are partitioned across workers.
struct Rng {
    uint64_t s[4];

    static Rng for_rep(uint64_t seed, uint64_t rep);
    uint64_t next_u64();
    double next_unit();  // strictly inside (0, 1)
};

// One standardized draw from the family (uniform on (-1/2,1/2), standard
// normal via the AS241 inverse cdf, Laplace(0,1), Exponential(1)).
double sample_variate(Family family, Rng& rng);

// Fills K responses X_i = theta_i + eps_i; block effects are omitted as
// within-block ranks are invariant to them. Redraws the block on the
// (measure-zero) chance of an exact tie.
void sample_block(const ShiftModel& model, Rng& rng, double* out);

struct SimConfig {
    ShiftModel model;
    int blocks = 5;
    double alpha = 0.05;
    long reps = 100000;
    uint64_t seed = 1;
    int workers = 1;
};

struct SimResult {
    // Rejection rates of the chi-square, F_R, F_M, and F_L procedures.
    double rate_t = 0.0, rate_r = 0.0, rate_m = 0.0, rate_l = 0.0;
    double se_t = 0.0, se_r = 0.0, se_m = 0.0, se_l = 0.0;
    long reps = 0;
    uint64_t seed = 0;
};

// Empirical Type I error (null shifts) or empirical power (heterogeneous
// shifts); the computation is identical, the entry points differ only in
// what they validate.
SimResult simulate_rejections(const SimConfig& config);
SimResult simulate_power(const SimConfig& config);

}  // namespace rcbd::mc
