#pragma once

#include "lmo/info_measures.hpp"
#include "lmo/numeric.hpp"

#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace lmo {

// The (n, m, k) leave-m-out partition: k blocks of (n+m)/k supersamples, n/k of them training.
class PartitionConfig {
public:
    PartitionConfig(int n, int m, int k) : n_(n), m_(m), k_(k)
    {
        if (n < 1 || m < 1 || k < 1)
            throw std::invalid_argument("PartitionConfig: n, m, k must be positive (n=" + std::to_string(n) +
                                        ", m=" + std::to_string(m) + ", k=" + std::to_string(k) + ")");
        if (n % k != 0) throw std::invalid_argument("PartitionConfig: k=" + std::to_string(k) + " does not divide n=" + std::to_string(n));
        if (m % k != 0) throw std::invalid_argument("PartitionConfig: k=" + std::to_string(k) + " does not divide m=" + std::to_string(m));
        if ((n + m) / k < 2) throw std::invalid_argument("PartitionConfig: block size below 2");
    }

    int n() const { return n_; }
    int m() const { return m_; }
    int k() const { return k_; }
    int block_size() const { return (n_ + m_) / k_; }
    int train_per_block() const { return n_ / k_; }
    int test_per_block() const { return m_ / k_; }
    // Global supersample index of position j in block i (both 0-based).
    int global_index(int i, int j) const { return block_size() * i + j; }

    bool operator==(const PartitionConfig&) const = default;

private:
    int n_, m_, k_;
};

inline std::vector<int> divisor_set(int n, int m)
{
    if (n < 1 || m < 1) throw std::invalid_argument("divisor_set: n, m must be positive");
    const int g = std::gcd(n, m);
    std::vector<int> out;
    for (int d = 1; d <= g; ++d)
        if (g % d == 0) out.push_back(d);
    return out;
}

// All size-t subsets of {0..b-1} in lexicographic order.
inline std::vector<std::vector<int>> enumerate_subsets(int b, int t)
{
    std::vector<std::vector<int>> out;
    if (t < 0 || t > b) return out;
    std::vector<int> cur(t);
    std::iota(cur.begin(), cur.end(), 0);
    while (true) {
        out.push_back(cur);
        int i = t - 1;
        while (i >= 0 && cur[i] == b - t + i) --i;
        if (i < 0) break;
        ++cur[i];
        for (int j = i + 1; j < t; ++j) cur[j] = cur[j - 1] + 1;
    }
    return out;
}

struct MembershipDraw {
    std::vector<std::vector<int>> subsets;  // per block, sorted 0-based training positions

    // T^(i)_j indicators, one row per block.
    std::vector<std::vector<int>> indicators(const PartitionConfig& cfg) const
    {
        std::vector<std::vector<int>> t(cfg.k(), std::vector<int>(cfg.block_size(), 0));
        for (int i = 0; i < cfg.k(); ++i)
            for (int j : subsets[i]) t[i][j] = 1;
        return t;
    }
};

inline MembershipDraw sample_membership(const PartitionConfig& cfg, Rng& rng)
{
    const int b = cfg.block_size(), t = cfg.train_per_block();
    MembershipDraw d;
    d.subsets.resize(cfg.k());
    std::vector<int> idx(b);
    for (int i = 0; i < cfg.k(); ++i) {
        std::iota(idx.begin(), idx.end(), 0);
        for (int r = 0; r < t; ++r) {  // partial Fisher-Yates
            std::uniform_int_distribution<int> pick(r, b - 1);
            std::swap(idx[r], idx[pick(rng)]);
        }
        d.subsets[i].assign(idx.begin(), idx.begin() + t);
        std::sort(d.subsets[i].begin(), d.subsets[i].end());
    }
    return d;
}

inline MembershipDraw sample_membership(const PartitionConfig& cfg, std::uint64_t seed, std::uint64_t task = 0)
{
    Rng rng = make_rng(seed, task);
    return sample_membership(cfg, rng);
}

inline ProbValue training_prob(const PartitionConfig& cfg)
{
    return static_cast<double>(cfg.n()) / (cfg.n() + cfg.m());
}

inline ProbValue test_prob(const PartitionConfig& cfg)
{
    return static_cast<double>(cfg.m()) / (cfg.n() + cfg.m());
}

class LossTable {
public:
    LossTable(int blocks, int block_size) : k_(blocks), b_(block_size), v_(static_cast<std::size_t>(blocks) * block_size, 0.0) {}
    LossTable(const PartitionConfig& cfg) : LossTable(cfg.k(), cfg.block_size()) {}  // NOLINT

    int blocks() const { return k_; }
    int block_size() const { return b_; }
    double& at(int i, int j) { return v_[static_cast<std::size_t>(i) * b_ + j]; }
    double at(int i, int j) const { return v_[static_cast<std::size_t>(i) * b_ + j]; }

private:
    int k_, b_;
    std::vector<double> v_;
};

struct CvError {
    double value = 0.0;
    std::vector<double> per_block;  // epsilon^(i)
};

// Block error (k/m) sum_test - (k/n) sum_train for one block and one training subset.
inline double block_cv_error(const LossTable& losses, int block, const std::vector<int>& train, const PartitionConfig& cfg)
{
    double tr = 0.0, all = 0.0;
    for (int j = 0; j < cfg.block_size(); ++j) all += losses.at(block, j);
    for (int j : train) tr += losses.at(block, j);
    const double k = cfg.k();
    return k / cfg.m() * (all - tr) - k / cfg.n() * tr;
}

inline CvError cv_error(const LossTable& losses, const MembershipDraw& draw, const PartitionConfig& cfg)
{
    if (losses.blocks() != cfg.k() || losses.block_size() != cfg.block_size())
        throw std::invalid_argument("cv_error: loss table shape does not match the partition");
    if (static_cast<int>(draw.subsets.size()) != cfg.k())
        throw std::invalid_argument("cv_error: membership draw has the wrong number of blocks");
    CvError out;
    for (int i = 0; i < cfg.k(); ++i) {
        if (static_cast<int>(draw.subsets[i].size()) != cfg.train_per_block())
            throw std::invalid_argument("cv_error: block " + std::to_string(i) + " has the wrong subset size");
        const double e = block_cv_error(losses, i, draw.subsets[i], cfg);
        out.per_block.push_back(e);
        out.value += e;
    }
    out.value /= cfg.k();
    return out;
}

} // namespace lmo
