#pragma once

#include "lmo/bernoulli_exact.hpp"
#include "lmo/info_measures.hpp"
#include "lmo/supersample.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lmo {

enum class Algorithm { AverageErm, MajorityVote };
enum class Loss { Quadratic, ZeroOne };

struct TinyInstance {
    PartitionConfig cfg;
    double p = 0.5;
    Algorithm algorithm = Algorithm::AverageErm;
    Loss loss = Loss::Quadratic;
};

// A random variable derived from a table atom.
struct Var {
    enum class Type { W, Z, ZBlock, ZAll, U, UAll, T, Loss, LossBlock, ZTrain, ZTrainAll, ZTrainAt };
    Type type;
    int a = 0;
    int b = 0;

    static Var w() { return {Type::W}; }
    static Var z(int global) { return {Type::Z, global}; }
    static Var z_block(int i) { return {Type::ZBlock, i}; }
    static Var z_all() { return {Type::ZAll}; }
    static Var u(int i) { return {Type::U, i}; }
    static Var u_all() { return {Type::UAll}; }
    static Var t(int i, int j) { return {Type::T, i, j}; }
    static Var loss(int i, int j) { return {Type::Loss, i, j}; }
    static Var loss_block(int i) { return {Type::LossBlock, i}; }
    static Var z_train(int i) { return {Type::ZTrain, i}; }
    static Var z_train_all() { return {Type::ZTrainAll}; }
    static Var z_train_at(int i, int r) { return {Type::ZTrainAt, i, r}; }

    std::string name() const
    {
        static const char* names[] = {"W", "Z", "Zblock", "Zall", "U", "Uall", "T", "Loss", "LossBlock", "Ztrain", "ZtrainAll", "ZtrainAt"};
        return std::string(names[static_cast<int>(type)]) + "(" + std::to_string(a) + "," + std::to_string(b) + ")";
    }
};

using VarList = std::vector<Var>;

// I(A; B | C), optionally disintegrated at C = given.
struct Query {
    VarList a;
    VarList b;
    VarList c;
    std::optional<std::vector<std::int64_t>> given;
};

struct Atom {
    std::uint32_t z;  // bit g is supersample g
    std::uint32_t u;  // mixed-radix code of per-block subset indices
    std::int32_t w;   // hypothesis numerator: x for average-ERM (W = x/n), the label for majority vote
    double weight;
};

class JointTable {
public:
    explicit JointTable(const TinyInstance& inst) : inst_(inst)
    {
        const auto& cfg = inst.cfg;
        if (cfg.n() + cfg.m() > 14) throw std::invalid_argument("enumerate_joint: n+m must be <= 14");
        subsets_ = enumerate_subsets(cfg.block_size(), cfg.train_per_block());
        const double per_block = static_cast<double>(subsets_.size());
        const double size = std::ldexp(std::pow(per_block, cfg.k()), cfg.n() + cfg.m());
        if (size > 1e8) throw std::invalid_argument("enumerate_joint: enumeration size exceeds 1e8");
        for (const auto& s : subsets_) {
            std::uint32_t mask = 0;
            for (int j : s) mask |= 1u << j;
            masks_.push_back(mask);
        }
        enumerate();
    }

    const TinyInstance& instance() const { return inst_; }
    const PartitionConfig& cfg() const { return inst_.cfg; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<std::vector<int>>& subsets() const { return subsets_; }

    int subset_index(const Atom& at, int block) const
    {
        std::uint32_t code = at.u;
        for (int i = 0; i < block; ++i) code /= static_cast<std::uint32_t>(subsets_.size());
        return static_cast<int>(code % subsets_.size());
    }
    int z_bit(const Atom& at, int global) const { return (at.z >> global) & 1u; }
    int z_at(const Atom& at, int block, int j) const { return z_bit(at, cfg().global_index(block, j)); }
    bool in_train(const Atom& at, int block, int j) const { return (masks_[subset_index(at, block)] >> j) & 1u; }

    double w_value(std::int32_t w) const
    {
        return inst_.algorithm == Algorithm::AverageErm ? static_cast<double>(w) / cfg().n() : static_cast<double>(w);
    }

    // All hypothesis keys the algorithm can output.
    std::vector<std::int32_t> w_support() const
    {
        std::vector<std::int32_t> out;
        const int top = inst_.algorithm == Algorithm::AverageErm ? cfg().n() : 1;
        for (int x = 0; x <= top; ++x) out.push_back(x);
        return out;
    }

    // Exact integer key of the loss: scaled squared error for average-ERM, otherwise 0/1.
    std::int64_t loss_key(std::int32_t w, int z) const
    {
        if (inst_.loss == Loss::ZeroOne) return w_value(w) != static_cast<double>(z) ? 1 : 0;
        if (inst_.algorithm == Algorithm::AverageErm) {
            const std::int64_t d = w - static_cast<std::int64_t>(cfg().n()) * z;
            return d * d;
        }
        return (w - z) * (w - z);
    }
    double loss_value(std::int32_t w, int z) const
    {
        if (inst_.loss == Loss::ZeroOne) return w_value(w) != static_cast<double>(z) ? 1.0 : 0.0;
        const double d = w_value(w) - z;
        return d * d;
    }

    void append_key(const Atom& at, const Var& v, std::vector<std::int64_t>& key) const
    {
        const auto& c = cfg();
        auto check_block = [&](int i) {
            if (i < 0 || i >= c.k()) throw std::invalid_argument("info_query: undefined variable " + v.name());
        };
        auto check_pos = [&](int j) {
            if (j < 0 || j >= c.block_size()) throw std::invalid_argument("info_query: undefined variable " + v.name());
        };
        switch (v.type) {
        case Var::Type::W: key.push_back(at.w); break;
        case Var::Type::Z:
            if (v.a < 0 || v.a >= c.n() + c.m()) throw std::invalid_argument("info_query: undefined variable " + v.name());
            key.push_back(z_bit(at, v.a));
            break;
        case Var::Type::ZBlock:
            check_block(v.a);
            key.push_back((at.z >> (c.block_size() * v.a)) & ((1u << c.block_size()) - 1u));
            break;
        case Var::Type::ZAll: key.push_back(at.z); break;
        case Var::Type::U: check_block(v.a); key.push_back(subset_index(at, v.a)); break;
        case Var::Type::UAll: key.push_back(at.u); break;
        case Var::Type::T: check_block(v.a); check_pos(v.b); key.push_back(in_train(at, v.a, v.b)); break;
        case Var::Type::Loss: check_block(v.a); check_pos(v.b); key.push_back(loss_key(at.w, z_at(at, v.a, v.b))); break;
        case Var::Type::LossBlock:
            check_block(v.a);
            for (int j = 0; j < c.block_size(); ++j) key.push_back(loss_key(at.w, z_at(at, v.a, j)));
            break;
        case Var::Type::ZTrain: {
            check_block(v.a);
            std::int64_t bits = 0;
            for (int r = 0; const int j : subsets_[subset_index(at, v.a)]) bits |= static_cast<std::int64_t>(z_at(at, v.a, j)) << r++;
            key.push_back(bits);
            break;
        }
        case Var::Type::ZTrainAll: {
            std::int64_t bits = 0;
            int r = 0;
            for (int i = 0; i < c.k(); ++i)
                for (int j : subsets_[subset_index(at, i)]) bits |= static_cast<std::int64_t>(z_at(at, i, j)) << r++;
            key.push_back(bits);
            break;
        }
        case Var::Type::ZTrainAt:
            check_block(v.a);
            if (v.b < 0 || v.b >= c.train_per_block()) throw std::invalid_argument("info_query: undefined variable " + v.name());
            key.push_back(z_at(at, v.a, subsets_[subset_index(at, v.a)][v.b]));
            break;
        }
    }

    using Pmf = std::map<std::vector<std::int64_t>, double>;

    // Marginal PMF of a variable list; cached by signature.
    std::shared_ptr<const Pmf> marginal(const VarList& vars) const
    {
        std::string sig;
        for (const auto& v : vars) sig += v.name() + ";";
        {
            std::lock_guard<std::mutex> lock(mu_);
            if (auto it = cache_.find(sig); it != cache_.end()) return it->second;
        }
        auto pmf = std::make_shared<Pmf>();
        std::vector<std::int64_t> key;
        for (const auto& at : atoms_) {
            key.clear();
            for (const auto& v : vars) append_key(at, v, key);
            (*pmf)[key] += at.weight;
        }
        std::lock_guard<std::mutex> lock(mu_);
        cache_.emplace(sig, pmf);
        return pmf;
    }

    double total_weight() const
    {
        double s = 0.0;
        for (const auto& at : atoms_) s += at.weight;
        return s;
    }

private:
    void enumerate()
    {
        const auto& c = cfg();
        const int total = c.n() + c.m(), b = c.block_size(), k = c.k();
        const std::uint32_t per = static_cast<std::uint32_t>(subsets_.size());
        std::uint32_t codes = 1;
        for (int i = 0; i < k; ++i) codes *= per;
        const double p = inst_.p;
        std::vector<int> idx(k);
        for (std::uint32_t z = 0; z < (1u << total); ++z) {
            const int ones = __builtin_popcount(z);
            const double like = std::pow(p, ones) * std::pow(1.0 - p, total - ones);
            if (like == 0.0) continue;
            const double weight = like / codes;
            for (std::uint32_t u = 0; u < codes; ++u) {
                std::uint32_t rest = u;
                int x = 0;
                for (int i = 0; i < k; ++i) {
                    const std::uint32_t s = rest % per;
                    rest /= per;
                    x += __builtin_popcount((z >> (b * i)) & masks_[s]);
                }
                std::int32_t w = x;
                if (inst_.algorithm == Algorithm::MajorityVote) w = (2 * x >= c.n()) ? 1 : 0;
                atoms_.push_back({z, u, w, weight});
            }
        }
    }

    TinyInstance inst_;
    std::vector<std::vector<int>> subsets_;
    std::vector<std::uint32_t> masks_;
    std::vector<Atom> atoms_;
    mutable std::mutex mu_;
    mutable std::map<std::string, std::shared_ptr<const Pmf>> cache_;
};

inline JointTable enumerate_joint(const TinyInstance& inst) { return JointTable(inst); }

inline InfoQuantity info_query(const JointTable& table, const Query& q)
{
    if (q.a.empty() || q.b.empty()) throw std::invalid_argument("info_query: both sides of the query must be non-empty");
    VarList abc = q.a, ac = q.a, bc = q.b;
    abc.insert(abc.end(), q.b.begin(), q.b.end());
    abc.insert(abc.end(), q.c.begin(), q.c.end());
    ac.insert(ac.end(), q.c.begin(), q.c.end());
    bc.insert(bc.end(), q.c.begin(), q.c.end());
    const auto p_abc = table.marginal(abc), p_ac = table.marginal(ac), p_bc = table.marginal(bc);
    const auto p_c = table.marginal(q.c);

    // Key widths: each variable contributes a fixed number of entries.
    auto width = [&](const VarList& vars) {
        if (table.atoms().empty()) return std::size_t{0};
        std::vector<std::int64_t> key;
        for (const auto& v : vars) table.append_key(table.atoms().front(), v, key);
        return key.size();
    };
    const std::size_t wa = width(q.a), wb = width(q.b), wc = width(q.c);
    if (q.given && q.given->size() != wc) throw std::invalid_argument("info_query: conditioning value has the wrong width");

    double given_mass = 1.0;
    if (q.given) {
        auto it = p_c->find(*q.given);
        if (it == p_c->end() || it->second == 0.0) throw std::invalid_argument("info_query: conditioning value has zero probability");
        given_mass = it->second;
    }

    double s = 0.0;
    std::vector<std::int64_t> kac, kbc, kc;
    for (const auto& [key, w] : *p_abc) {
        if (w <= 0.0) continue;
        kc.assign(key.begin() + wa + wb, key.end());
        if (q.given && kc != *q.given) continue;
        kac.assign(key.begin(), key.begin() + wa);
        kac.insert(kac.end(), kc.begin(), kc.end());
        kbc.assign(key.begin() + wa, key.begin() + wa + wb);
        kbc.insert(kbc.end(), kc.begin(), kc.end());
        const double pc = q.c.empty() ? 1.0 : p_c->at(kc);
        s += w * std::log(w * pc / (p_ac->at(kac) * p_bc->at(kbc)));
    }
    InfoQuantity out;
    out.kind = "oracle";
    out.value = std::max(s / given_mass, 0.0);
    out.per_term = {out.value};
    out.provenance = Provenance::Oracle;
    return out;
}

inline InfoQuantity info_query(const JointTable& table, const VarList& a, const VarList& b, const VarList& c = {},
                               std::optional<std::vector<std::int64_t>> given = std::nullopt)
{
    return info_query(table, Query{a, b, c, std::move(given)});
}

// Largest loss difference |l(w,z) - l(w,z')| over the hypotheses the algorithm can output.
inline double loss_delta(const JointTable& table)
{
    double d = 0.0;
    for (auto w : table.w_support()) d = std::max(d, std::abs(table.loss_value(w, 0) - table.loss_value(w, 1)));
    return d;
}

struct RiskPair {
    double empirical;   // E (1/n) sum_train loss
    double population;  // E (1/m) sum_test loss
};

inline RiskPair exact_risks(const JointTable& table)
{
    const auto& c = table.cfg();
    RiskPair r{0.0, 0.0};
    for (const auto& at : table.atoms()) {
        double tr = 0.0, te = 0.0;
        for (int i = 0; i < c.k(); ++i)
            for (int j = 0; j < c.block_size(); ++j) {
                const double l = table.loss_value(at.w, table.z_at(at, i, j));
                (table.in_train(at, i, j) ? tr : te) += l;
            }
        r.empirical += at.weight * tr / c.n();
        r.population += at.weight * te / c.m();
    }
    return r;
}

// Exact expectation of the leave-m-out cross-validation error over the table.
inline double expected_cv_error(const JointTable& table)
{
    const auto r = exact_risks(table);
    return r.population - r.empirical;
}

struct CgfReport {
    double worst = 0.0;  // max over block realizations
    double mean = 0.0;   // probability-weighted average over block realizations
};

// psi(lambda) of the block error with W~ drawn from P(W | block data) and U~ uniform.
inline CgfReport exact_cgf(const JointTable& table, int block, double lambda)
{
    const auto& c = table.cfg();
    if (block < 0 || block >= c.k()) throw std::invalid_argument("exact_cgf: block out of range");
    const int b = c.block_size();
    const auto marg = table.marginal({Var::z_block(block), Var::w()});
    const auto pz = table.marginal({Var::z_block(block)});
    const auto& subs = table.subsets();
    CgfReport rep;
    rep.worst = -kInf;
    for (const auto& [zkey, zmass] : *pz) {
        if (zmass <= 0.0) continue;
        const auto zb = static_cast<std::uint32_t>(zkey[0]);
        std::vector<double> terms;
        for (const auto& [key, mass] : *marg) {
            if (key[0] != zkey[0] || mass <= 0.0) continue;
            const auto w = static_cast<std::int32_t>(key[1]);
            std::vector<double> loss(b);
            for (int j = 0; j < b; ++j) loss[j] = table.loss_value(w, (zb >> j) & 1u);
            std::vector<double> inner;
            for (const auto& s : subs) {
                double tr = 0.0, all = 0.0;
                for (int j = 0; j < b; ++j) all += loss[j];
                for (int j : s) tr += loss[j];
                const double eps = static_cast<double>(c.k()) / c.m() * (all - tr) - static_cast<double>(c.k()) / c.n() * tr;
                inner.push_back(lambda * eps);
            }
            terms.push_back(std::log(mass / zmass) + log_sum_exp(inner) - std::log(static_cast<double>(subs.size())));
        }
        const double psi = log_sum_exp(terms);
        rep.worst = std::max(rep.worst, psi);
        rep.mean += zmass * psi;
    }
    return rep;
}

struct ZeroOneReport {
    double emp_risk = 0.0;
    double pop_risk = 0.0;
    double djs = 0.0;
    double rhs = 0.0;
    double indicator_dev = 0.0;
    double k_invariance_dev = 0.0;
    double bac_dev = 0.0;
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
};

namespace detail {

inline std::string describe(const TinyInstance& t)
{
    return "(n=" + std::to_string(t.cfg.n()) + ",m=" + std::to_string(t.cfg.m()) + ",k=" + std::to_string(t.cfg.k()) +
           ",p=" + std::to_string(t.p) + ")";
}

// I^{z}(W; U^(0) | Z^(0)_0 = z) for z in {0,1}; missing values are NaN.
inline std::vector<double> scmi_profile(const JointTable& table)
{
    std::vector<double> out(2, std::nan(""));
    const auto pz = table.marginal({Var::z(0)});
    for (int z = 0; z < 2; ++z)
        if (auto it = pz->find({z}); it != pz->end() && it->second > 0.0)
            out[z] = info_query(table, {Var::w()}, {Var::u(0)}, {Var::z(0)}, std::vector<std::int64_t>{z}).value;
    return out;
}

} // namespace detail

inline ZeroOneReport zero_one_equality_check(const TinyInstance& inst, double tol = 1e-9)
{
    if (inst.loss != Loss::ZeroOne) throw std::invalid_argument("zero_one_equality_check: requires the zero-one loss");
    ZeroOneReport rep;
    const JointTable table(inst);
    const auto& c = inst.cfg;
    const auto risks = exact_risks(table);
    rep.emp_risk = risks.empirical;
    rep.pop_risk = risks.population;
    const double theta = static_cast<double>(c.n()) / (c.n() + c.m());
    rep.djs = d_js(theta, std::clamp(risks.empirical, 0.0, 1.0), std::clamp(risks.population, 0.0, 1.0));
    double s = 0.0;
    for (int i = 0; i < c.k(); ++i)
        for (int j = 0; j < c.block_size(); ++j) s += info_query(table, {Var::loss(i, j)}, {Var::u(i)}).value;
    rep.rhs = s / (c.n() + c.m());
    if (std::abs(rep.rhs - rep.djs) > tol)
        rep.failures.push_back("d_js equality violated on " + detail::describe(inst) + ": d_js=" + std::to_string(rep.djs) +
                               " rhs=" + std::to_string(rep.rhs));

    // Channel from the training indicator to the loss, with input prior (m/(n+m), n/(n+m)).
    const double mix = theta * rep.emp_risk + (1.0 - theta) * rep.pop_risk;
    const double bac = binary_entropy(std::clamp(mix, 0.0, 1.0)) - theta * binary_entropy(std::clamp(rep.emp_risk, 0.0, 1.0)) -
                       (1.0 - theta) * binary_entropy(std::clamp(rep.pop_risk, 0.0, 1.0));
    rep.bac_dev = std::max(std::abs(bac - rep.djs), std::abs(info_query(table, {Var::loss(0, 0)}, {Var::t(0, 0)}).value - rep.djs));
    if (rep.bac_dev > tol) rep.failures.push_back("BAC capacity identity violated on " + detail::describe(inst));

    // Processed (indicator) and unprocessed (membership) disintegrated quantities agree.
    for (int i = 0; i < c.k(); ++i)
        for (int j = 0; j < c.block_size(); ++j) {
            const int g = c.global_index(i, j);
            const auto pz = table.marginal({Var::z(g)});
            for (int z = 0; z < 2; ++z) {
                auto it = pz->find({z});
                if (it == pz->end() || it->second <= 0.0) continue;
                const std::vector<std::int64_t> given{z};
                const double it_val = info_query(table, {Var::w()}, {Var::t(i, j)}, {Var::z(g)}, given).value;
                const double iu_val = info_query(table, {Var::w()}, {Var::u(i)}, {Var::z(g)}, given).value;
                rep.indicator_dev = std::max(rep.indicator_dev, std::abs(it_val - iu_val));
            }
        }
    if (rep.indicator_dev > tol)
        rep.failures.push_back("indicator vs membership identity violated on " + detail::describe(inst));

    // The disintegrated single-sample quantity does not depend on k.
    const auto ref = detail::scmi_profile(table);
    for (int kk : divisor_set(c.n(), c.m())) {
        if (kk == c.k()) continue;
        TinyInstance other = inst;
        other.cfg = PartitionConfig(c.n(), c.m(), kk);
        const auto prof = detail::scmi_profile(JointTable(other));
        for (int z = 0; z < 2; ++z)
            if (!std::isnan(ref[z])) rep.k_invariance_dev = std::max(rep.k_invariance_dev, std::abs(prof[z] - ref[z]));
    }
    if (rep.k_invariance_dev > tol)
        rep.failures.push_back("k-invariance violated on " + detail::describe(inst));
    return rep;
}

struct DualReport {
    double emp_risk = 0.0;
    double loo_form = 0.0;  // inverse JS at theta = n/(n+1) with I(Lambda_1; U)
    double std_form = 0.0;  // inverse JS at theta = 1/2 with I(Lambda_1; R_1)
    bool applicable = false;  // empirical risk <= population risk
};

// The population risk recovered from the leave-one-out and the standard (paired) settings.
inline DualReport dual_representation_check(int n, double p, Algorithm alg = Algorithm::MajorityVote)
{
    DualReport rep;
    const JointTable loo(TinyInstance{PartitionConfig(n, 1, 1), p, alg, Loss::ZeroOne});
    const JointTable std_cmi(TinyInstance{PartitionConfig(n, n, n), p, alg, Loss::ZeroOne});
    const auto risks = exact_risks(loo);
    rep.emp_risk = std::clamp(risks.empirical, 0.0, 1.0);
    rep.applicable = risks.empirical <= risks.population + 1e-15;
    const double i_loo = info_query(loo, {Var::loss(0, 0)}, {Var::u(0)}).value;
    const double i_std = info_query(std_cmi, {Var::loss(0, 0)}, {Var::u(0)}).value;
    rep.loo_form = d_js_inverse(static_cast<double>(n) / (n + 1), rep.emp_risk, i_loo, 1e-14);
    rep.std_form = d_js_inverse(0.5, rep.emp_risk, i_std, 1e-14);
    return rep;
}

} // namespace lmo
