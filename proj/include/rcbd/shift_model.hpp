#pragma once

#include <string>
#include <vector>

#include "rcbd/rank_core.hpp"

namespace rcbd {

// The four standardized populations with closed-form exceedance
// probabilities: Uniform(-1/2,1/2), Normal(0,1), Laplace(0,1),
// Exponential(1). Shifts are taken in raw distribution units.
enum class Family { uniform, normal, laplace, exponential };

Family family_from_string(const std::string& name);
std::string to_string(Family family);
double family_variance(Family family);  // 1/12, 1, 2, 1

// Integral of the squared density, the only distribution input of the
// local-alternative noncentrality.
double f_star_zero(Family family);

struct ShiftModel {
    Family family;
    std::vector<double> theta;

    ShiftModel(Family f, std::vector<double> shifts);
    int treatments() const { return static_cast<int>(theta.size()); }
};

// Pairwise and triple-wise exceedance probabilities under the shift model:
// p1 = P{X_i > X_l}, p2 = P{X_i > X_l, X_i > X_m} (symmetric in l, m).
// Indices refer to the caller's treatment labels; the appendix case split
// follows the nondecreasing-theta relabeling internally.
double p1(const ShiftModel& model, int i, int l);
double p2(const ShiftModel& model, int i, int l, int m);

struct RankMoments {
    std::vector<double> mu;      // E[R_i]
    std::vector<double> sigma2;  // Var[R_i]
    double mu_t = 0.0;           // E[T] under the shift model
};
RankMoments rank_moments(const ShiftModel& model, int blocks);

// Local-alternative noncentrality of the chi-square approximation; the
// shifts are centered before evaluation.
double tau_h(const ShiftModel& model, int blocks);

enum class Variant { H, MA, MB, LA, LB };
Variant variant_from_string(const std::string& name);
std::string to_string(Variant variant);

struct Noncentrality {
    Variant variant = Variant::H;
    double value = 0.0;
    DfPair dfs;
};
Noncentrality noncentrality(const ShiftModel& model, int blocks, Variant variant);

}  // namespace rcbd
