#include "rcbd/power.hpp"

#include <string>

#include "rcbd/dist.hpp"
#include "rcbd/errors.hpp"

namespace rcbd {

double power(const PowerRequest& request) {
    if (!(request.alpha > 0.0 && request.alpha < 1.0)) {
        throw DomainError("alpha must lie in (0,1)");
    }
    if (request.blocks < 2) throw DimensionError("power needs B >= 2");
    const int k = request.model.treatments();
    auto nc = noncentrality(request.model, request.blocks, request.method);
    if (request.method == Variant::H) {
        double crit = dist::chi2_quantile(request.alpha, k - 1.0);
        return dist::nc_chi2_sf(crit, k - 1.0, nc.value);
    }
    double crit = dist::f_quantile(request.alpha, nc.dfs.d1, nc.dfs.d2);
    return dist::nc_f_sf(crit, nc.dfs.d1, nc.dfs.d2, nc.value);
}

SampleSizeResult min_blocks(const ShiftModel& model, double alpha, double target,
                            Variant method, int b_min, int b_max) {
    if (!(target > 0.0 && target < 1.0)) throw DomainError("target power must lie in (0,1)");
    if (b_min < 2) throw DomainError("b_min must be at least 2");
    if (b_max < b_min) throw DomainError("b_max must be >= b_min");
    for (int b = b_min; b <= b_max; ++b) {
        double p = power({model, b, alpha, method});
        if (p >= target) {
            return {method, b, p, model.treatments() * b};
        }
    }
    throw NotAttainableError("target power " + std::to_string(target) +
                             " not reached by B = " + std::to_string(b_max));
}

}  // namespace rcbd
