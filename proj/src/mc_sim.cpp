#include "rcbd/mc_sim.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <thread>
#include <vector>

#include "rcbd/dist.hpp"
#include "rcbd/errors.hpp"

namespace rcbd::mc {

namespace {

inline uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

struct Thresholds {
    double chi2 = 0.0, f_r = 0.0, f_m = 0.0, f_l = 0.0;
};

struct Counts {
    long t = 0, r = 0, m = 0, l = 0;
};

// Rank-sum accumulation and the four rejection decisions for one data set.
class RepWorker {
  public:
    RepWorker(const SimConfig& cfg, const Thresholds& crit)
        : cfg_(cfg),
          crit_(crit),
          k_(cfg.model.treatments()),
          row_(k_),
          order_(k_),
          sums_(k_) {}

    void run(long rep_begin, long rep_end, Counts& out) {
        for (long rep = rep_begin; rep < rep_end; ++rep) {
            Rng rng = Rng::for_rep(cfg_.seed, static_cast<uint64_t>(rep));
            double t = statistic(rng);
#ifndef NDEBUG
            if (rep == rep_begin) {
                // Block effects cancel inside ranks; spot-check on one rep.
                Rng rng2 = Rng::for_rep(cfg_.seed, static_cast<uint64_t>(rep));
                block_offset_ = 0.37;
                double t2 = statistic(rng2);
                block_offset_ = 0.0;
                assert(t == t2);
            }
#endif
            double m = static_cast<double>(cfg_.blocks) * (k_ - 1);
            if (t > crit_.chi2) ++out.t;
            if (t >= m) {
                ++out.r;
                ++out.m;
            } else {
                double f = (cfg_.blocks - 1) * t / (m - t);
                if (f > crit_.f_r) ++out.r;
                if (f > crit_.f_m) ++out.m;
            }
            double l = static_cast<double>(cfg_.blocks) * (k_ + 1) - 2.0;
            double f_l = (k_ + 1) * (cfg_.blocks - 1) * t / ((k_ - 1) * (l - t));
            if (f_l > crit_.f_l) ++out.l;
        }
    }

  private:
    double statistic(Rng& rng) {
        std::fill(sums_.begin(), sums_.end(), 0);
        for (int j = 0; j < cfg_.blocks; ++j) {
            sample_block(cfg_.model, rng, row_.data());
            if (block_offset_ != 0.0) {
                for (int i = 0; i < k_; ++i) row_[i] += block_offset_ * (j + 1);
            }
            for (int i = 0; i < k_; ++i) order_[i] = i;
            std::sort(order_.begin(), order_.end(),
                      [&](int a, int b) { return row_[a] < row_[b]; });
            for (int rank = 0; rank < k_; ++rank) sums_[order_[rank]] += rank + 1;
        }
        double ssq = 0.0;
        for (int i = 0; i < k_; ++i) ssq += static_cast<double>(sums_[i]) * sums_[i];
        return 12.0 * ssq / (static_cast<double>(cfg_.blocks) * k_ * (k_ + 1)) -
               3.0 * cfg_.blocks * (k_ + 1);
    }

    const SimConfig& cfg_;
    const Thresholds& crit_;
    int k_;
    double block_offset_ = 0.0;
    std::vector<double> row_;
    std::vector<int> order_;
    std::vector<long long> sums_;
};

SimResult run_simulation(const SimConfig& cfg) {
    if (cfg.reps < 1) throw DomainError("reps must be positive");
    if (cfg.blocks < 2) throw DimensionError("simulation needs B >= 2");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
    const int k = cfg.model.treatments();

    Thresholds crit;
    crit.chi2 = dist::chi2_quantile(cfg.alpha, k - 1.0);
    auto dr = df_r_pair(k, cfg.blocks);
    auto dm = df_m_pair(k, cfg.blocks);
    auto dl = df_l_pair(k, cfg.blocks);
    crit.f_r = dist::f_quantile(cfg.alpha, dr.d1, dr.d2);
    crit.f_m = dist::f_quantile(cfg.alpha, dm.d1, dm.d2);
    crit.f_l = dist::f_quantile(cfg.alpha, dl.d1, dl.d2);

    int workers = std::max(1, cfg.workers);
    workers = static_cast<int>(std::min<long>(workers, cfg.reps));
    std::vector<Counts> parts(workers);
    if (workers == 1) {
        RepWorker(cfg, crit).run(0, cfg.reps, parts[0]);
    } else {
        std::vector<std::thread> pool;
        long chunk = (cfg.reps + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            long begin = w * chunk;
            long end = std::min<long>(cfg.reps, begin + chunk);
            pool.emplace_back([&, begin, end, w] {
                RepWorker(cfg, crit).run(begin, end, parts[w]);
            });
        }
        for (auto& th : pool) th.join();
    }

    Counts total;
    for (const auto& part : parts) {
        total.t += part.t;
        total.r += part.r;
        total.m += part.m;
        total.l += part.l;
    }
    SimResult res;
    res.reps = cfg.reps;
    res.seed = cfg.seed;
    auto rate = [&](long c) { return static_cast<double>(c) / cfg.reps; };
    auto se = [&](double r) { return std::sqrt(r * (1.0 - r) / cfg.reps); };
    res.rate_t = rate(total.t);
    res.rate_r = rate(total.r);
    res.rate_m = rate(total.m);
    res.rate_l = rate(total.l);
    res.se_t = se(res.rate_t);
    res.se_r = se(res.rate_r);
    res.se_m = se(res.rate_m);
    res.se_l = se(res.rate_l);
    return res;
}

}  // namespace

Rng Rng::for_rep(uint64_t seed, uint64_t rep) {
    uint64_t state = seed ^ (0xD1342543DE82EF95ULL * (rep + 1));
    Rng rng;
    for (auto& word : rng.s) word = splitmix64(state);
    return rng;
}

uint64_t Rng::next_u64() {
    uint64_t result = rotl(s[0] + s[3], 23) + s[0];
    uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
}

double Rng::next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double sample_variate(Family family, Rng& rng) {
    double u = rng.next_unit();
    switch (family) {
        case Family::uniform: return u - 0.5;
        case Family::normal: return dist::std_normal_quantile(u);
        case Family::laplace:
            return (u < 0.5) ? std::log(2.0 * u) : -std::log(2.0 * (1.0 - u));
        case Family::exponential: return -std::log1p(-u);
    }
    return 0.0;
}

void sample_block(const ShiftModel& model, Rng& rng, double* out) {
    const int k = model.treatments();
    for (int attempt = 0; attempt < 100; ++attempt) {
        for (int i = 0; i < k; ++i) out[i] = model.theta[i] + sample_variate(model.family, rng);
        bool tied = false;
        for (int a = 0; a < k && !tied; ++a)
            for (int b = a + 1; b < k; ++b)
                if (out[a] == out[b]) {
                    tied = true;
                    break;
                }
        if (!tied) return;
    }
    throw Error("sample_block: persistent ties from the generator");
}

SimResult simulate_rejections(const SimConfig& config) { return run_simulation(config); }

SimResult simulate_power(const SimConfig& config) {
    bool all_equal = std::all_of(config.model.theta.begin(), config.model.theta.end(),
                                 [&](double t) { return t == config.model.theta.front(); });
    if (all_equal) throw DomainError("power simulation needs heterogeneous shifts");
    return run_simulation(config);
}

}  // namespace rcbd::mc
