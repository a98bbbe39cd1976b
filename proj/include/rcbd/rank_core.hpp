#pragma once

#include <vector>

namespace rcbd {

// B x K response matrix, rows = blocks, columns = treatments. Entries must
// be finite with no duplicates inside a row (ties are rejected, the methods
// assume continuous populations).
class BlockData {
  public:
    BlockData(int blocks, int treatments, std::vector<double> values);

    int blocks() const { return blocks_; }
    int treatments() const { return treatments_; }
    double at(int block, int treatment) const {
        return values_[static_cast<size_t>(block) * treatments_ + treatment];
    }
    const std::vector<double>& values() const { return values_; }

  private:
    int blocks_;
    int treatments_;
    std::vector<double> values_;  // row-major
};

// Within-block ranks (each row a permutation of 1..K) plus column rank sums.
struct RankTable {
    int blocks = 0;
    int treatments = 0;
    std::vector<int> ranks;      // row-major, B x K
    std::vector<int> rank_sums;  // length K

    int rank(int block, int treatment) const {
        return ranks[static_cast<size_t>(block) * treatments + treatment];
    }
};

// Builds a RankTable directly from rank sums; validates the totals. Used by
// the CLI --ranks path and by worked-example style inputs.
RankTable rank_table_from_sums(int blocks, int treatments, const std::vector<int>& sums);

struct DfPair {
    double d1 = 0.0;
    double d2 = 0.0;
};

struct TestReport {
    double t = 0.0;
    double f_statistic = 0.0;  // shared by the R and M procedures
    double f_l = 0.0;
    bool f_infinite = false;   // statistic pole at t == max
    DfPair df_r, df_m, df_l;
    double p_chisq = 1.0, p_r = 1.0, p_m = 1.0, p_l = 1.0;
    double alpha = 0.05;
    bool reject_chisq = false, reject_r = false, reject_m = false, reject_l = false;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

RankTable rank_within_blocks(const BlockData& data);

// T = 12/(BK(K+1)) * sum R_i^2 - 3B(K+1), in [0, B(K-1)].
double friedman_t(const RankTable& ranks);

// (B-1)T/(M-T): one statistic serving both the R and M reference
// distributions. Throws DegenerateError at the pole T == M.
double f_ratio_shared(double t, int treatments, int blocks);

// (K+1)(B-1)T / {(K-1)(L-T)} with L = B(K+1)-2; finite on the whole range.
double f_ratio_l(double t, int treatments, int blocks);

// Beta moment-matching parameters (f1, f2) for a scaling constant S > K-1.
DfPair general_class_params(double s, int treatments, int blocks);

// Reference degrees of freedom for the three procedures.
DfPair df_r_pair(int treatments, int blocks);
DfPair df_m_pair(int treatments, int blocks);
DfPair df_l_pair(int treatments, int blocks);

TestReport run_tests(const RankTable& ranks, double alpha);
TestReport run_tests(const BlockData& data, double alpha);

}  // namespace rcbd
