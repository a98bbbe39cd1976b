#include "rcbd/exact_null.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <unordered_map>

#include "rcbd/dist.hpp"
#include "rcbd/errors.hpp"
#include "rcbd/rank_core.hpp"

namespace rcbd::exact {

namespace {

// Sorted partial-sum vectors packed 8 bits per treatment (sums reach
// B*K <= 20*6 under the default caps).
uint64_t encode_state(const std::array<int, 8>& v, int k) {
    uint64_t code = 0;
    for (int i = 0; i < k; ++i) code = (code << 8) | static_cast<uint64_t>(v[i]);
    return code;
}

std::vector<std::array<int, 8>> all_permutations(int k) {
    std::array<int, 8> base{};
    std::iota(base.begin(), base.begin() + k, 1);
    std::vector<std::array<int, 8>> perms;
    do {
        perms.push_back(base);
    } while (std::next_permutation(base.begin(), base.begin() + k));
    return perms;
}

}  // namespace

ExactNullDist ExactNullDist::compute(int treatments, int blocks, const Caps& caps) {
    if (treatments < 2 || treatments > caps.max_treatments) {
        throw CapacityError("treatments outside supported range [2, " +
                            std::to_string(caps.max_treatments) + "]");
    }
    if (blocks < 2 || blocks > caps.max_blocks) {
        throw CapacityError("blocks outside supported range [2, " +
                            std::to_string(caps.max_blocks) + "]");
    }
    if (blocks * treatments > 255) {
        // Rank sums are packed 8 bits each in the state encoding.
        throw CapacityError("B*K exceeds the state encoding limit of 255");
    }
    const int k = treatments;
    const auto perms = all_permutations(k);

    // Counts are aggregated over ordered rank-sum vectors grouped by their
    // sorted representative; exchangeability across treatment labels makes
    // the per-class transition counts identical, so the fold below is exact.
    std::unordered_map<uint64_t, BigInt> states;
    std::array<int, 8> first{};
    std::iota(first.begin(), first.begin() + k, 1);
    states.emplace(encode_state(first, k), BigInt(perms.size()));

    std::array<int, 8> buf{};
    for (int b = 1; b < blocks; ++b) {
        std::unordered_map<uint64_t, BigInt> next;
        next.reserve(states.size() * 2);
        for (const auto& [code, count] : states) {
            std::array<int, 8> cur{};
            uint64_t c = code;
            for (int i = k - 1; i >= 0; --i) {
                cur[i] = static_cast<int>(c & 0xff);
                c >>= 8;
            }
            for (const auto& perm : perms) {
                for (int i = 0; i < k; ++i) buf[i] = cur[i] + perm[i];
                std::sort(buf.begin(), buf.begin() + k);
                next[encode_state(buf, k)] += count;
            }
            if (next.size() > caps.max_states) {
                throw CapacityError("exact-null state space exceeded cap of " +
                                    std::to_string(caps.max_states));
            }
        }
        states = std::move(next);
    }

    ExactNullDist dist;
    dist.treatments_ = k;
    dist.blocks_ = blocks;
    dist.total_ = 1;
    for (int b = 0; b < blocks; ++b) dist.total_ *= static_cast<unsigned>(perms.size());

    std::map<long long, BigInt> by_key;
    for (const auto& [code, count] : states) {
        uint64_t c = code;
        long long key = 0;
        for (int i = 0; i < k; ++i) {
            long long v = static_cast<long long>(c & 0xff);
            key += v * v;
            c >>= 8;
        }
        by_key[key] += count;
    }

    BigInt check = 0;
    dist.atoms_.reserve(by_key.size());
    for (const auto& [key, count] : by_key) {
        Atom atom;
        atom.key = key;
        atom.count = count;
        atom.probability = static_cast<double>(BigRational(count, dist.total_));
        atom.t = dist.t_of_key(key);
        check += count;
        dist.atoms_.push_back(std::move(atom));
    }
    if (check != dist.total_) throw Error("exact-null internal count mismatch");
    return dist;
}

double ExactNullDist::t_of_key(long long key) const {
    double denom = static_cast<double>(blocks_) * treatments_ * (treatments_ + 1);
    return 12.0 * static_cast<double>(key) / denom - 3.0 * blocks_ * (treatments_ + 1);
}

long long ExactNullDist::nearest_key(double t) const {
    // Invert t -> s in the integer key space, then snap to the closest
    // support atom; rounded decimals from published tables land within a
    // fraction of one key unit.
    double denom = static_cast<double>(blocks_) * treatments_ * (treatments_ + 1);
    double s = (t + 3.0 * blocks_ * (treatments_ + 1)) * denom / 12.0;
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), s,
                               [](const Atom& a, double v) { return a.key < v; });
    if (it == atoms_.end()) return atoms_.back().key;
    if (it == atoms_.begin()) return atoms_.front().key;
    auto prev = std::prev(it);
    return (s - prev->key <= it->key - s) ? prev->key : it->key;
}

double ExactNullDist::tail_greater(double t) const {
    double denom = static_cast<double>(blocks_) * treatments_ * (treatments_ + 1);
    double s = (t + 3.0 * blocks_ * (treatments_ + 1)) * denom / 12.0;
    // Values within a quarter key unit of an atom are treated as naming it.
    long long near = nearest_key(t);
    double threshold = (std::fabs(s - static_cast<double>(near)) <= 0.25)
                           ? static_cast<double>(near) + 0.5
                           : s;
    BigInt acc = 0;
    for (auto it = atoms_.rbegin(); it != atoms_.rend(); ++it) {
        if (static_cast<double>(it->key) > threshold) {
            acc += it->count;
        } else {
            break;
        }
    }
    return static_cast<double>(BigRational(acc, total_));
}

double ExactNullDist::tail_geq_key(long long key) const {
    BigInt acc = 0;
    for (auto it = atoms_.rbegin(); it != atoms_.rend(); ++it) {
        if (it->key >= key) {
            acc += it->count;
        } else {
            break;
        }
    }
    return static_cast<double>(BigRational(acc, total_));
}

double ExactNullDist::tail_geq(double t) const { return tail_geq_key(nearest_key(t)); }

BigRational ExactNullDist::mean_t_exact() const {
    BigInt sum = 0;
    for (const auto& atom : atoms_) sum += atom.count * atom.key;
    BigRational es(sum, total_);
    BigRational denom(static_cast<long long>(blocks_) * treatments_ * (treatments_ + 1));
    return BigRational(12) * es / denom - BigRational(3LL * blocks_ * (treatments_ + 1));
}

BigRational ExactNullDist::var_t_exact() const {
    // Var[T] = (12/(BK(K+1)))^2 * Var[s]
    BigInt sum = 0, sumsq = 0;
    for (const auto& atom : atoms_) {
        sum += atom.count * atom.key;
        sumsq += atom.count * BigInt(atom.key) * BigInt(atom.key);
    }
    BigRational es(sum, total_);
    BigRational es2(sumsq, total_);
    BigRational vars = es2 - es * es;
    BigRational scale(12, static_cast<long long>(blocks_) * treatments_ * (treatments_ + 1));
    return scale * scale * vars;
}

CriticalValue critical_value(const ExactNullDist& dist, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
    // The attained level of the rejection region T >= c is the weak tail at
    // c; pick the support point whose attained level sits closest to the
    // request, breaking ties toward the conservative side.
    CriticalValue best;
    double best_gap = 2.0;
    for (const auto& atom : dist.atoms()) {
        double attained = dist.tail_geq_key(atom.key);
        double gap = std::fabs(attained - alpha);
        if (gap < best_gap - 1e-15 ||
            (gap <= best_gap + 1e-15 && attained < best.attained)) {
            best_gap = gap;
            best = {atom.t, attained, atom.key};
        }
    }
    return best;
}

ApproxTailRow approx_tail_row(const ExactNullDist& dist, long long key) {
    const int k = dist.treatments(), b = dist.blocks();
    ApproxTailRow row;
    row.blocks = b;
    row.c = dist.t_of_key(key);
    row.alpha_exact = dist.tail_geq_key(key);
    row.p_t = dist::chi2_sf(row.c, k - 1.0);

    long long m_key = static_cast<long long>(b) * b * k * (k + 1) * (2 * k + 1) / 6;
    double m = static_cast<double>(b) * (k - 1);
    if (key != m_key) {
        double f_rc = (b - 1) * row.c / (m - row.c);
        auto dr = df_r_pair(k, b);
        auto dm = df_m_pair(k, b);
        row.p_r = dist::f_sf(f_rc, dr.d1, dr.d2);
        row.p_m = dist::f_sf(f_rc, dm.d1, dm.d2);
    }
    auto dl = df_l_pair(k, b);
    row.p_l = dist::f_sf(f_ratio_l(row.c, k, b), dl.d1, dl.d2);
    return row;
}

std::vector<ApproxTailRow> approximation_error_table(int treatments, int b_from, int b_to,
                                                     const std::vector<double>& alpha_targets,
                                                     const Caps& caps) {
    std::vector<ApproxTailRow> rows;
    for (int b = b_from; b <= b_to; ++b) {
        auto dist = ExactNullDist::compute(treatments, b, caps);
        long long prev_key = -1;
        for (double alpha : alpha_targets) {
            auto cv = critical_value(dist, alpha);
            if (cv.key == prev_key) continue;  // deduplicate coarse supports
            prev_key = cv.key;
            rows.push_back(approx_tail_row(dist, cv.key));
        }
    }
    return rows;
}

}  // namespace rcbd::exact
