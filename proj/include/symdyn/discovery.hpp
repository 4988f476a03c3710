#ifndef SYMDYN_DISCOVERY_HPP
#define SYMDYN_DISCOVERY_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "symdyn/citest.hpp"
#include "symdyn/graph.hpp"
#include "symdyn/timeseries.hpp"

namespace symdyn {

struct DiscoveryParams {
    std::string test = "parcorr";
    int tau_max = 1;
    double alpha = 0.01;
    // Number of strongest source parents added to the MCI conditioning set.
    int p_j = 3;
    // Cap on contemporaneous conditioning subsets; kNN tests lose power fast
    // with dimension at the series lengths this targets.
    int max_contemp_cond = 3;
    std::uint64_t seed = 0;
    CmiParams cmi;
};

struct Parent {
    int var = 0;
    int lag = 1;
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Candidate lagged parents per target variable, strongest first.
struct ParentSets {
    std::vector<std::vector<Parent>> by_target;

    bool contains(int target, int var, int lag) const {
        for (const auto& p : by_target.at(target))
            if (p.var == var && p.lag == lag) return true;
        return false;
    }
};

/**
 * Conditional independence test plugged into the discovery loops. `signature`
 * is a canonical description of the tested variables; seeded testers derive
 * their stream from it so that repeating a test spec repeats its p-value.
 */
class CiTester {
  public:
    virtual ~CiTester() = default;
    virtual std::string name() const = 0;
    virtual CiResult run(const std::vector<double>& x,
                         const std::vector<double>& y, const Eigen::MatrixXd& Z,
                         double alpha, const std::string& signature) = 0;
};

class ParCorrTester final : public CiTester {
  public:
    std::string name() const override { return "parcorr"; }
    CiResult run(const std::vector<double>& x, const std::vector<double>& y,
                 const Eigen::MatrixXd& Z, double alpha,
                 const std::string&) override {
        return parcorr_test(x, y, Z, alpha);
    }
};

class CmiKnnTester final : public CiTester {
  public:
    explicit CmiKnnTester(std::uint64_t seed, const CmiParams& base = CmiParams{})
        : seed_(seed), base_(base) {}

    std::string name() const override { return "cmiknn"; }

    CiResult run(const std::vector<double>& x, const std::vector<double>& y,
                 const Eigen::MatrixXd& Z, double alpha,
                 const std::string& signature) override {
        CmiParams p = base_;
        p.seed = splitmix64(seed_ ^ fnv1a(signature));
        return cmi_knn_test(x, y, Z, p, alpha);
    }

  private:
    std::uint64_t seed_;
    CmiParams base_;
};

inline std::unique_ptr<CiTester> make_tester(const DiscoveryParams& params) {
    if (params.test == "parcorr") return std::make_unique<ParCorrTester>();
    if (params.test == "cmiknn")
        return std::make_unique<CmiKnnTester>(params.seed, params.cmi);
    throw ConfigError("unknown CI test: " + params.test);
}

namespace detail {

/// Variable at a positive lag into the past; lag 0 is the present.
struct VarLag {
    int var = 0;
    int lag = 0;
    friend bool operator==(const VarLag&, const VarLag&) = default;
    friend auto operator<=>(const VarLag& l, const VarLag& r) {
        return std::tie(l.var, l.lag) <=> std::tie(r.var, r.lag);
    }
};

inline void validate_discovery_input(const TimeSeries& ts,
                                     const DiscoveryParams& params) {
    if (params.tau_max < 1) throw ConfigError("tau_max must be >= 1");
    if (!(params.alpha > 0.0 && params.alpha < 1.0))
        throw ConfigError("alpha must be in (0, 1)");
    if (params.p_j < 0) throw ConfigError("p_j must be >= 0");
    if (ts.length() <= params.tau_max + 3)
        throw DataError("series too short for tau_max");
    for (int v = 0; v < ts.n_vars(); ++v) {
        const auto col = ts.column(v);
        if (stddev(col) == 0.0)
            throw DataError("constant column: " + ts.vars.at(v));
    }
}

/**
 * Runs CI tests against time-shifted slices of one series. The alignment
 * window starts at max(tau_max, deepest lag in the test), and results are
 * memoized by signature: the same test spec asked twice (PC iteration vs MCI
 * retest, or the two roles of a symmetric contemporaneous check) returns the
 * identical result without a second evaluation.
 */
class TestRunner {
  public:
    TestRunner(const TimeSeries& ts, CiTester& tester, int tau_max, double alpha)
        : ts_(ts), tester_(tester), tau_max_(tau_max), alpha_(alpha) {}

    CiResult run(VarLag x, VarLag y, std::vector<VarLag> zs) {
        std::sort(zs.begin(), zs.end());
        zs.erase(std::unique(zs.begin(), zs.end()), zs.end());
        if (x.lag == 0 && y.lag == 0 && y < x) std::swap(x, y);

        std::string sig = "x=" + slot(x) + ";y=" + slot(y) + ";z=";
        for (std::size_t i = 0; i < zs.size(); ++i) {
            if (i) sig += ',';
            sig += slot(zs[i]);
        }
        auto it = cache_.find(sig);
        if (it != cache_.end()) return it->second;

        int t0 = std::max({tau_max_, x.lag, y.lag});
        for (const auto& z : zs) t0 = std::max(t0, z.lag);

        const int n = static_cast<int>(ts_.length()) - t0;
        Eigen::MatrixXd Z(n, static_cast<Eigen::Index>(zs.size()));
        for (std::size_t c = 0; c < zs.size(); ++c) {
            auto col = slice(zs[c], t0);
            for (int r = 0; r < n; ++r) Z(r, static_cast<Eigen::Index>(c)) = col[r];
        }
        CiResult res = tester_.run(slice(x, t0), slice(y, t0), Z, alpha_, sig);
        cache_.emplace(std::move(sig), res);
        return res;
    }

  private:
    static std::string slot(VarLag v) {
        return std::to_string(v.var) + "@" + std::to_string(v.lag);
    }

    std::vector<double> slice(VarLag v, int t0) const {
        std::vector<double> out(ts_.length() - t0);
        for (Eigen::Index t = t0; t < ts_.length(); ++t)
            out[t - t0] = ts_.values(t - v.lag, v.var);
        return out;
    }

    const TimeSeries& ts_;
    CiTester& tester_;
    int tau_max_;
    double alpha_;
    std::map<std::string, CiResult> cache_;
};

/// Lexicographic size-s index combinations from [0, n).
template <typename Fn>
void for_each_combination(int n, int s, Fn&& fn) {
    if (s > n) return;
    std::vector<int> idx(s);
    for (int i = 0; i < s; ++i) idx[i] = i;
    while (true) {
        if (!fn(static_cast<const std::vector<int>&>(idx))) return;
        int i = s - 1;
        while (i >= 0 && idx[i] == n - s + i) --i;
        if (i < 0) return;
        ++idx[i];
        for (int k = i + 1; k < s; ++k) idx[k] = idx[k - 1] + 1;
    }
}

struct Pc1Candidate {
    VarLag vl;
    double statistic = 0.0;
    double p_value = 1.0;
};

inline std::vector<Pc1Candidate> pc1_for_target(TestRunner& runner, int target,
                                                int n_vars,
                                                const DiscoveryParams& params) {
    const VarLag y{target, 0};
    std::vector<Pc1Candidate> cands;
    for (int lag = 1; lag <= params.tau_max; ++lag)
        for (int var = 0; var < n_vars; ++var) {
            const VarLag x{var, lag};
            CiResult res = runner.run(x, y, {});
            if (res.dependent) cands.push_back({x, res.statistic, res.p_value});
        }

    for (int depth = 1; !cands.empty(); ++depth) {
        // Snapshot ranking for this sweep; removals land only at its end.
        std::vector<Pc1Candidate> ranked = cands;
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const Pc1Candidate& l, const Pc1Candidate& r) {
                             if (std::abs(l.statistic) != std::abs(r.statistic))
                                 return std::abs(l.statistic) > std::abs(r.statistic);
                             return l.vl < r.vl;
                         });
        bool any_tested = false;
        std::vector<char> keep(cands.size(), 1);
        for (std::size_t c = 0; c < cands.size(); ++c) {
            std::vector<VarLag> others;
            for (const auto& r : ranked) {
                if (r.vl == cands[c].vl) continue;
                others.push_back(r.vl);
                if (static_cast<int>(others.size()) == depth) break;
            }
            if (static_cast<int>(others.size()) < depth) continue;
            any_tested = true;
            CiResult res = runner.run(cands[c].vl, y, others);
            if (res.dependent) {
                cands[c].statistic = res.statistic;
                cands[c].p_value = res.p_value;
            } else {
                keep[c] = 0;
            }
        }
        std::vector<Pc1Candidate> next;
        for (std::size_t c = 0; c < cands.size(); ++c)
            if (keep[c]) next.push_back(cands[c]);
        cands = std::move(next);
        if (!any_tested) break;
    }

    std::stable_sort(cands.begin(), cands.end(),
                     [](const Pc1Candidate& l, const Pc1Candidate& r) {
                         if (std::abs(l.statistic) != std::abs(r.statistic))
                             return std::abs(l.statistic) > std::abs(r.statistic);
                         return l.vl < r.vl;
                     });
    return cands;
}

inline ParentSets pc1_impl(TestRunner& runner, const TimeSeries& ts,
                           const DiscoveryParams& params) {
    ParentSets ps;
    ps.by_target.resize(ts.n_vars());
    for (int i = 0; i < ts.n_vars(); ++i) {
        auto cands = pc1_for_target(runner, i, ts.n_vars(), params);
        for (const auto& c : cands)
            ps.by_target[i].push_back({c.vl.var, c.vl.lag, c.statistic, c.p_value});
    }
    return ps;
}

inline std::vector<LaggedEdge> mci_impl(TestRunner& runner,
                                        const ParentSets& parents,
                                        const DiscoveryParams& params) {
    std::vector<LaggedEdge> edges;
    const int n_vars = static_cast<int>(parents.by_target.size());
    for (int i = 0; i < n_vars; ++i) {
        const VarLag y{i, 0};
        for (const auto& cand : parents.by_target[i]) {
            const VarLag x{cand.var, cand.lag};
            std::set<VarLag> zs;
            for (const auto& p : parents.by_target[i]) {
                const VarLag vl{p.var, p.lag};
                if (vl != x) zs.insert(vl);
            }
            // Strongest parents of the source, shifted by the tested lag.
            int taken = 0;
            for (const auto& p : parents.by_target[cand.var]) {
                if (taken == params.p_j) break;
                const VarLag shifted{p.var, p.lag + cand.lag};
                if (shifted != x) zs.insert(shifted);
                ++taken;
            }
            CiResult res =
                runner.run(x, y, std::vector<VarLag>(zs.begin(), zs.end()));
            if (res.dependent)
                edges.push_back({cand.var, i, cand.lag, res.statistic, res.p_value});
        }
    }
    return edges;
}

struct ContempPairState {
    bool removed = false;
    std::vector<int> sepset;
    double statistic = 0.0;
    double p_value = -1.0;  // weakest (largest) p seen across the pair's tests
};

/**
 * Contemporaneous skeleton phase. Every same-time pair starts adjacent; for
 * growing subset size s the pair is retested conditioning on s of the
 * target's current contemporaneous neighbours plus all of the target's
 * lagged parents, in both target roles. Removals within one s-sweep use the
 * adjacency frozen at its start. Surviving edges keep the weakest evidence
 * seen (largest p with its statistic).
 */
inline std::map<std::pair<int, int>, ContempPairState> contemp_skeleton(
    TestRunner& runner, int n_vars,
    const std::vector<std::vector<VarLag>>& lagged_parents,
    const DiscoveryParams& params) {
    std::map<std::pair<int, int>, ContempPairState> state;
    std::vector<std::set<int>> adj(n_vars);
    for (int a = 0; a < n_vars; ++a)
        for (int b = a + 1; b < n_vars; ++b) {
            state[{a, b}] = ContempPairState{};
            adj[a].insert(b);
            adj[b].insert(a);
        }

    const int max_s = std::min(params.max_contemp_cond, n_vars - 2);
    for (int s = 0; s <= max_s; ++s) {
        const auto frozen = adj;
        std::vector<std::pair<int, int>> removals;
        for (auto& [pair, st] : state) {
            if (st.removed) continue;
            const auto [a, b] = pair;
            bool independent = false;
            for (int role = 0; role < 2 && !independent; ++role) {
                const int target = role == 0 ? b : a;
                const int other = role == 0 ? a : b;
                std::vector<int> nbrs;
                for (int n : frozen[target])
                    if (n != other) nbrs.push_back(n);
                if (static_cast<int>(nbrs.size()) < s) continue;
                for_each_combination(
                    static_cast<int>(nbrs.size()), s,
                    [&](const std::vector<int>& combo) {
                        std::vector<VarLag> zs = lagged_parents[target];
                        std::vector<int> sep;
                        for (int ci : combo) {
                            zs.push_back({nbrs[ci], 0});
                            sep.push_back(nbrs[ci]);
                        }
                        CiResult res = runner.run({a, 0}, {b, 0}, zs);
                        if (res.p_value > st.p_value) {
                            st.p_value = res.p_value;
                            st.statistic = res.statistic;
                        }
                        if (!res.dependent) {
                            independent = true;
                            st.sepset = sep;
                            return false;
                        }
                        return true;
                    });
            }
            if (independent) {
                st.removed = true;
                removals.push_back(pair);
            }
        }
        for (const auto& [a, b] : removals) {
            adj[a].erase(b);
            adj[b].erase(a);
        }
    }
    return state;
}

/**
 * Orientation of the surviving contemporaneous skeleton. Collider rule:
 * for every unshielded triple a - c - b whose separating set excludes c,
 * both edges get a vote into c; disagreeing votes mark an edge conflicting.
 * Then two propagation rules run to fixpoint on the remaining undirected
 * edges: a directed a->c with c - b and a,b nonadjacent orients c->b, and a
 * directed path a->c->b alongside a - b orients a->b. A propagation that
 * contradicts an earlier orientation marks the edge conflicting.
 */
inline std::map<std::pair<int, int>, Orientation> orient_contemporaneous(
    int n_vars, const std::map<std::pair<int, int>, ContempPairState>& state) {
    std::vector<std::set<int>> adj(n_vars);
    for (const auto& [pair, st] : state)
        if (!st.removed) {
            adj[pair.first].insert(pair.second);
            adj[pair.second].insert(pair.first);
        }

    // Votes per surviving edge: +1 into the larger endpoint, -1 into the
    // smaller one.
    std::map<std::pair<int, int>, std::pair<bool, bool>> votes;
    for (int c = 0; c < n_vars; ++c) {
        std::vector<int> nbrs(adj[c].begin(), adj[c].end());
        for (std::size_t i = 0; i < nbrs.size(); ++i)
            for (std::size_t k = i + 1; k < nbrs.size(); ++k) {
                const int a = nbrs[i], b = nbrs[k];
                if (adj[a].count(b)) continue;
                const auto it = state.find({std::min(a, b), std::max(a, b)});
                if (it == state.end() || !it->second.removed) continue;
                const auto& sep = it->second.sepset;
                if (std::find(sep.begin(), sep.end(), c) != sep.end()) continue;
                for (int endpoint : {a, b}) {
                    auto key = std::minmax(endpoint, c);
                    auto& v = votes[{key.first, key.second}];
                    (c == key.second ? v.first : v.second) = true;
                }
            }
    }

    std::map<std::pair<int, int>, Orientation> orient;
    for (const auto& [pair, st] : state)
        if (!st.removed) orient[pair] = Orientation::Undirected;
    for (const auto& [edge, v] : votes) {
        if (v.first && v.second)
            orient[edge] = Orientation::Conflicting;
        else if (v.first)
            orient[edge] = Orientation::AToB;
        else if (v.second)
            orient[edge] = Orientation::BToA;
    }

    auto directed = [&](int u, int v) {
        auto it = orient.find({std::min(u, v), std::max(u, v)});
        if (it == orient.end()) return false;
        if (it->second == Orientation::AToB) return u < v;
        if (it->second == Orientation::BToA) return u > v;
        return false;
    };
    auto set_direction = [&](int u, int v) {
        // Orient u -> v unless the edge already points the other way.
        auto key = std::minmax(u, v);
        auto& o = orient.at({key.first, key.second});
        const Orientation want =
            u < v ? Orientation::AToB : Orientation::BToA;
        if (o == Orientation::Undirected) {
            o = want;
            return true;
        }
        if (o != want && o != Orientation::Conflicting) {
            o = Orientation::Conflicting;
            return true;
        }
        return false;
    };

    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& [edge, o] : orient) {
            if (o != Orientation::Undirected) continue;
            const auto [p, q] = edge;
            for (auto [u, v] : {std::pair{p, q}, std::pair{q, p}}) {
                // u - v undirected; look for a -> u with a,v nonadjacent.
                bool done = false;
                for (int a : adj[u]) {
                    if (a != v && directed(a, u) && !adj[a].count(v)) {
                        changed |= set_direction(u, v);
                        done = true;
                        break;
                    }
                }
                if (done) break;
                // Chain u -> c -> v closes the triangle as u -> v.
                for (int c : adj[u]) {
                    if (c != v && directed(u, c) && directed(c, v)) {
                        changed |= set_direction(u, v);
                        done = true;
                        break;
                    }
                }
                if (done) break;
            }
        }
    }
    return orient;
}

}  // namespace detail

/**
 * PC1 lagged-parent preselection: iteration 0 keeps every lagged candidate
 * that is unconditionally dependent on the target; iteration p retests each
 * survivor given the p strongest other retained parents (ranking snapshot at
 * the sweep start, removals applied at its end) until no candidate has
 * enough co-parents to build the conditioning set. Candidates are returned
 * strongest first.
 */
inline ParentSets pc1_lagged(const TimeSeries& ts, const DiscoveryParams& params) {
    detail::validate_discovery_input(ts, params);
    auto tester = make_tester(params);
    detail::TestRunner runner(ts, *tester, params.tau_max, params.alpha);
    return detail::pc1_impl(runner, ts, params);
}

/**
 * Momentary conditional independence pruning: candidate (j -> i, tau) is kept
 * iff the pair is dependent given the other parents of i plus the p_j
 * strongest parents of j shifted by tau. Statistics and p-values on the
 * returned edges come from this final test.
 */
inline std::vector<LaggedEdge> mci_prune(const TimeSeries& ts,
                                         const ParentSets& parents,
                                         const DiscoveryParams& params) {
    detail::validate_discovery_input(ts, params);
    auto tester = make_tester(params);
    detail::TestRunner runner(ts, *tester, params.tau_max, params.alpha);
    return detail::mci_impl(runner, parents, params);
}

/// Full lagged + contemporaneous discovery on one series.
inline CausalGraph pcmci_plus(const TimeSeries& ts, const DiscoveryParams& params) {
    detail::validate_discovery_input(ts, params);
    auto tester = make_tester(params);
    detail::TestRunner runner(ts, *tester, params.tau_max, params.alpha);

    ParentSets parents = detail::pc1_impl(runner, ts, params);
    std::vector<LaggedEdge> lagged = detail::mci_impl(runner, parents, params);

    std::vector<std::vector<detail::VarLag>> lagged_parents(ts.n_vars());
    for (const auto& e : lagged) lagged_parents[e.dst].push_back({e.src, e.lag});
    for (auto& lp : lagged_parents) std::sort(lp.begin(), lp.end());

    auto state = detail::contemp_skeleton(runner, ts.n_vars(), lagged_parents, params);
    auto orient = detail::orient_contemporaneous(ts.n_vars(), state);

    CausalGraph g;
    g.var_names = ts.vars;
    g.lagged_edges = std::move(lagged);
    for (const auto& [pair, st] : state) {
        if (st.removed) continue;
        g.contemporaneous_edges.push_back(make_contemp_edge(
            pair.first, pair.second, orient.at(pair), st.statistic, st.p_value));
    }
    g.sort_edges();
    g.meta = {{"method", "pcmci+"},
              {"test", params.test},
              {"tau_max", params.tau_max},
              {"alpha", params.alpha},
              {"p_j", params.p_j},
              {"max_contemp_cond", params.max_contemp_cond},
              {"seed", params.seed}};
    if (params.test == "cmiknn") {
        g.meta["k"] = params.cmi.k;
        g.meta["n_perm"] = params.cmi.n_perm;
    }
    return g;
}

/**
 * VAR-Granger baseline: every variable is regressed on all variables at lags
 * 1..lag with an intercept; (j -> i, tau) becomes an edge when the
 * coefficient's two-sided t-test beats alpha. The statistic is the fitted
 * coefficient. No contemporaneous edges.
 */
inline CausalGraph var_granger(const TimeSeries& ts, int lag = 1,
                               double alpha = 0.01) {
    if (lag < 1) throw ConfigError("lag must be >= 1");
    const int N = ts.n_vars();
    const int T = static_cast<int>(ts.length());
    const int n_pred = N * lag + 1;
    if (T <= N * lag + 3) throw DataError("series too short for VAR fit");
    const int n = T - lag;

    Eigen::MatrixXd X(n, n_pred);
    X.col(0).setOnes();
    for (int tau = 1; tau <= lag; ++tau)
        for (int j = 0; j < N; ++j)
            for (int r = 0; r < n; ++r)
                X(r, 1 + (tau - 1) * N + j) = ts.values(r + lag - tau, j);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < n_pred) throw NumericalError("singular VAR design matrix");
    const Eigen::MatrixXd xtx_inv =
        (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(n_pred, n_pred));

    CausalGraph g;
    g.var_names = ts.vars;
    const double dof = n - n_pred;
    if (dof < 1) throw DataError("series too short for VAR fit");
    for (int i = 0; i < N; ++i) {
        Eigen::VectorXd y(n);
        for (int r = 0; r < n; ++r) y(r) = ts.values(r + lag, i);
        const Eigen::VectorXd beta = qr.solve(y);
        const double sigma2 = (y - X * beta).squaredNorm() / dof;
        for (int tau = 1; tau <= lag; ++tau)
            for (int j = 0; j < N; ++j) {
                const int c = 1 + (tau - 1) * N + j;
                const double se = std::sqrt(sigma2 * xtx_inv(c, c));
                if (se == 0.0) throw NumericalError("singular VAR design matrix");
                const double p = t_test_pvalue(beta(c) / se, dof);
                if (p < alpha) g.lagged_edges.push_back({j, i, tau, beta(c), p});
            }
    }
    g.sort_edges();
    g.meta = {{"method", "var_granger"}, {"lag", lag}, {"alpha", alpha}};
    return g;
}

/**
 * Pairwise transfer entropy baseline over all ordered pairs of distinct
 * variables at lags 1..lag. Each pair gets its own surrogate stream derived
 * from the seed and the pair's signature.
 */
inline CausalGraph te_discovery(const TimeSeries& ts, int lag, double alpha,
                                const TeParams& base = TeParams{},
                                std::uint64_t seed = 0) {
    if (lag < 1) throw ConfigError("lag must be >= 1");
    CausalGraph g;
    g.var_names = ts.vars;
    for (int tau = 1; tau <= lag; ++tau)
        for (int j = 0; j < ts.n_vars(); ++j)
            for (int i = 0; i < ts.n_vars(); ++i) {
                if (i == j) continue;
                TeParams p = base;
                const std::string sig = "te;x=" + std::to_string(j) + "@" +
                                        std::to_string(tau) +
                                        ";y=" + std::to_string(i);
                p.seed = splitmix64(seed ^ fnv1a(sig));
                CiResult res =
                    transfer_entropy(ts.column(j), ts.column(i), tau, p, alpha);
                if (res.dependent)
                    g.lagged_edges.push_back({j, i, tau, res.statistic, res.p_value});
            }
    g.sort_edges();
    g.meta = {{"method", "te"},
              {"lag", lag},
              {"alpha", alpha},
              {"bins", base.bins},
              {"n_surrogate", base.n_surrogate},
              {"seed", seed}};
    return g;
}

}  // namespace symdyn

#endif  // SYMDYN_DISCOVERY_HPP
