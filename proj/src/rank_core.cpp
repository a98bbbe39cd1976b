#include "rcbd/rank_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "rcbd/dist.hpp"
#include "rcbd/errors.hpp"

namespace rcbd {

BlockData::BlockData(int blocks, int treatments, std::vector<double> values)
    : blocks_(blocks), treatments_(treatments), values_(std::move(values)) {
    if (treatments_ < 2 || blocks_ < 2) {
        throw DimensionError("BlockData requires at least 2 blocks and 2 treatments, got B=" +
                             std::to_string(blocks_) + " K=" + std::to_string(treatments_));
    }
    if (values_.size() != static_cast<size_t>(blocks_) * treatments_) {
        throw DimensionError("BlockData values size does not match B*K");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw FormatError("BlockData entries must be finite");
    }
    for (int j = 0; j < blocks_; ++j) {
        for (int a = 0; a < treatments_; ++a) {
            for (int b = a + 1; b < treatments_; ++b) {
                if (at(j, a) == at(j, b)) {
                    throw TiesError("tied values within block " + std::to_string(j + 1));
                }
            }
        }
    }
}

RankTable rank_within_blocks(const BlockData& data) {
    const int B = data.blocks(), K = data.treatments();
    RankTable table;
    table.blocks = B;
    table.treatments = K;
    table.ranks.assign(static_cast<size_t>(B) * K, 0);
    table.rank_sums.assign(K, 0);
    std::vector<int> order(K);
    for (int j = 0; j < B; ++j) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return data.at(j, a) < data.at(j, b); });
        for (int r = 0; r < K; ++r) {
            table.ranks[static_cast<size_t>(j) * K + order[r]] = r + 1;
            table.rank_sums[order[r]] += r + 1;
        }
    }
    return table;
}

RankTable rank_table_from_sums(int blocks, int treatments, const std::vector<int>& sums) {
    if (treatments < 2 || blocks < 2) throw DimensionError("need K >= 2 and B >= 2");
    if (sums.size() != static_cast<size_t>(treatments)) {
        throw DimensionError("rank sums length must equal K");
    }
    long long total = 0;
    for (int s : sums) {
        if (s < blocks || s > blocks * treatments) {
            throw DomainError("rank sum outside [B, BK]: " + std::to_string(s));
        }
        total += s;
    }
    long long expected = static_cast<long long>(blocks) * treatments * (treatments + 1) / 2;
    if (total != expected) {
        throw DomainError("rank sums must total BK(K+1)/2 = " + std::to_string(expected));
    }
    RankTable table;
    table.blocks = blocks;
    table.treatments = treatments;
    table.rank_sums = sums;
    return table;  // per-cell ranks unknown; statistics only need the sums
}

double friedman_t(const RankTable& ranks) {
    const int B = ranks.blocks, K = ranks.treatments;
    double ssq = 0.0;
    for (int sum : ranks.rank_sums) ssq += static_cast<double>(sum) * sum;
    return 12.0 * ssq / (static_cast<double>(B) * K * (K + 1)) - 3.0 * B * (K + 1);
}

double f_ratio_shared(double t, int treatments, int blocks) {
    double m = static_cast<double>(blocks) * (treatments - 1);
    if (t >= m) throw DegenerateError("statistic at the pole T == B(K-1)");
    return (blocks - 1) * t / (m - t);
}

double f_ratio_l(double t, int treatments, int blocks) {
    double l = static_cast<double>(blocks) * (treatments + 1) - 2.0;
    return (treatments + 1) * (blocks - 1) * t / ((treatments - 1) * (l - t));
}

DfPair general_class_params(double s, int treatments, int blocks) {
    double mu0 = treatments - 1.0;
    if (s <= mu0) throw DomainError("general class requires S > K - 1");
    double sigma0sq = 2.0 * (treatments - 1.0) * (blocks - 1.0) / blocks;
    double d = (2.0 / s) * (mu0 * (s - mu0) / sigma0sq - 1.0);
    return {mu0 * d, (s - mu0) * d};
}

DfPair df_r_pair(int treatments, int blocks) {
    return {treatments - 1.0, (blocks - 1.0) * (treatments - 1.0)};
}

DfPair df_m_pair(int treatments, int blocks) {
    double m1 = treatments - 1.0 - 2.0 / blocks;
    return {m1, (blocks - 1.0) * m1};
}

DfPair df_l_pair(int treatments, int blocks) {
    return {treatments - 1.0, (blocks - 1.0) * (treatments + 1.0)};
}

TestReport run_tests(const RankTable& ranks, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
    const int B = ranks.blocks, K = ranks.treatments;
    TestReport rep;
    rep.alpha = alpha;
    rep.t = friedman_t(ranks);
    rep.df_r = df_r_pair(K, B);
    rep.df_m = df_m_pair(K, B);
    rep.df_l = df_l_pair(K, B);
    rep.p_chisq = dist::chi2_sf(rep.t, K - 1.0);
    rep.f_l = f_ratio_l(rep.t, K, B);
    rep.p_l = dist::f_sf(rep.f_l, rep.df_l.d1, rep.df_l.d2);

    double m = static_cast<double>(B) * (K - 1);
    if (rep.t >= m) {
        // Pole: report the F statistic as infinite with the exact minimum
        // p-value (zero); the chi-square route stays finite.
        rep.f_infinite = true;
        rep.f_statistic = std::numeric_limits<double>::infinity();
        rep.p_r = 0.0;
        rep.p_m = 0.0;
    } else {
        rep.f_statistic = f_ratio_shared(rep.t, K, B);
        rep.p_r = dist::f_sf(rep.f_statistic, rep.df_r.d1, rep.df_r.d2);
        rep.p_m = dist::f_sf(rep.f_statistic, rep.df_m.d1, rep.df_m.d2);
    }
    rep.reject_chisq = rep.p_chisq < alpha;
    rep.reject_r = rep.p_r < alpha;
    rep.reject_m = rep.p_m < alpha;
    rep.reject_l = rep.p_l < alpha;
    return rep;
}

TestReport run_tests(const BlockData& data, double alpha) {
    return run_tests(rank_within_blocks(data), alpha);
}

}  // namespace rcbd
