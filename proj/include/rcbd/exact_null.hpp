#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <vector>

namespace rcbd::exact {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

// Resource limits for the enumeration. (K!)^B sequences are never walked
// explicitly; the caps bound the compressed state space instead.
struct Caps {
    int max_treatments = 6;
    int max_blocks = 20;
    std::size_t max_states = 4'000'000;
};

// One support atom of the exact null distribution, keyed by the integer
// rank-sum-square total s = sum_i R_i^2.
struct Atom {
    long long key = 0;
    BigInt count;
    double probability = 0.0;
    double t = 0.0;
};

class ExactNullDist {
  public:
    // Distribution of s under B iid uniform within-block rankings, by
    // per-block convolution over sorted partial rank-sum states.
    static ExactNullDist compute(int treatments, int blocks, const Caps& caps = {});

    int treatments() const { return treatments_; }
    int blocks() const { return blocks_; }
    const std::vector<Atom>& atoms() const { return atoms_; }  // ascending key
    const BigInt& total() const { return total_; }             // (K!)^B

    double t_of_key(long long key) const;
    // Maps a (possibly rounded) statistic value onto the closest support key.
    long long nearest_key(double t) const;
    long long max_key() const { return atoms_.back().key; }
    long long min_key() const { return atoms_.front().key; }

    double tail_greater(double t) const;  // strict: P{T > t}
    double tail_geq(double t) const;      // weak:   P{T >= t}
    double tail_geq_key(long long key) const;

    BigRational mean_t_exact() const;
    BigRational var_t_exact() const;

  private:
    int treatments_ = 0;
    int blocks_ = 0;
    std::vector<Atom> atoms_;
    BigInt total_;
};

// Critical value selection: the support point whose attained (weak) tail is
// closest to the requested level, ties resolved toward the smaller tail.
struct CriticalValue {
    double c = 0.0;
    double attained = 0.0;
    long long key = 0;
};
CriticalValue critical_value(const ExactNullDist& dist, double alpha);

// One row of the approximation error comparison: the chi-square and the
// three F transformations evaluated at an exact critical value. The R/M
// entries are undefined when c equals the statistic maximum M.
struct ApproxTailRow {
    int blocks = 0;
    double c = 0.0;
    double alpha_exact = 0.0;          // attained weak tail at c
    double p_t = 0.0;                  // chi-square tail, always defined
    std::optional<double> p_r, p_m;    // undefined at c == M
    double p_l = 0.0;
};

ApproxTailRow approx_tail_row(const ExactNullDist& dist, long long key);

// Rows for each block count and target level over a B range.
std::vector<ApproxTailRow> approximation_error_table(int treatments, int b_from, int b_to,
                                                     const std::vector<double>& alpha_targets,
                                                     const Caps& caps = {});

}  // namespace rcbd::exact
