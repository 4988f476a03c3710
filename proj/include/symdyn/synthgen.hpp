#ifndef SYMDYN_SYNTHGEN_HPP
#define SYMDYN_SYNTHGEN_HPP

#include <algorithm>
#include <queue>
#include <string>
#include <vector>

#include "symdyn/rng.hpp"
#include "symdyn/timeseries.hpp"

namespace symdyn {

struct TrueEdge {
    int src;
    int dst;
    int lag;

    bool operator==(const TrueEdge&) const = default;
};

struct GroundTruth {
    std::vector<TrueEdge> edges;

    bool contains(int src, int dst, int lag) const {
        return std::find(edges.begin(), edges.end(),
                         TrueEdge{src, dst, lag}) != edges.end();
    }
};

enum class Scenario { Linear, Interaction, Quadratic };

inline Scenario parse_scenario(const std::string& s) {
    if (s == "linear") return Scenario::Linear;
    if (s == "interaction") return Scenario::Interaction;
    if (s == "quadratic") return Scenario::Quadratic;
    throw ConfigError("scenario must be linear, interaction or quadratic");
}

inline std::string scenario_name(Scenario s) {
    switch (s) {
        case Scenario::Linear: return "linear";
        case Scenario::Interaction: return "interaction";
        default: return "quadratic";
    }
}

/**
 * Three-variable benchmark system. X1 and X2 are independent unit normals;
 * X3 is driven by the previous step with coefficient 3 plus unit noise:
 *
 *   linear       X3_t = 3 * X2_{t-1}           + e_t
 *   interaction  X3_t = 3 * X1_{t-1} * X2_{t-1} + e_t
 *   quadratic    X3_t = 3 * X2_{t-1}^2          + e_t
 *
 * The first X3 sample has no parent value and is noise only. Draw order per
 * step is X1, X2, then the X3 noise, so a seed pins the whole series.
 */
inline TimeSeries gen_scenario(Scenario scenario, int T, std::uint64_t seed) {
    if (T < 2) throw ConfigError("scenario series need T >= 2");
    Rng rng(seed);
    TimeSeries ts;
    ts.vars = {"X1", "X2", "X3"};
    ts.values.resize(T, 3);
    for (int t = 0; t < T; ++t) {
        const double x1 = rng.normal();
        const double x2 = rng.normal();
        const double e = rng.normal();
        ts.values(t, 0) = x1;
        ts.values(t, 1) = x2;
        double drive = 0.0;
        if (t > 0) {
            const double p1 = ts.values(t - 1, 0);
            const double p2 = ts.values(t - 1, 1);
            switch (scenario) {
                case Scenario::Linear: drive = 3.0 * p2; break;
                case Scenario::Interaction: drive = 3.0 * p1 * p2; break;
                case Scenario::Quadratic: drive = 3.0 * p2 * p2; break;
            }
        }
        ts.values(t, 2) = drive + e;
    }
    return ts;
}

inline GroundTruth scenario_truth(Scenario scenario) {
    GroundTruth gt;
    if (scenario == Scenario::Interaction) gt.edges.push_back({0, 2, 1});
    gt.edges.push_back({1, 2, 1});
    return gt;
}

enum class LinkFunc { Linear, Product, Square };

/**
 * One structural term feeding a target variable. Product terms multiply two
 * (possibly differently lagged) sources; linear and square terms use src
 * only. The coefficient scales the whole term.
 */
struct ScmTerm {
    int dst = 0;
    int src = 0;
    int lag = 1;
    LinkFunc func = LinkFunc::Linear;
    double coef = 1.0;
    int src2 = -1;  // product terms only
    int lag2 = 1;
};

struct ScmSpec {
    int n_vars = 0;
    std::vector<std::string> names;  // defaults to X1..XN when empty
    std::vector<ScmTerm> terms;
};

namespace detail {

inline void check_contemporaneous_acyclic(const ScmSpec& spec) {
    std::vector<std::vector<int>> adj(spec.n_vars);
    std::vector<int> indeg(spec.n_vars, 0);
    for (const auto& term : spec.terms) {
        if (term.lag == 0) {
            adj[term.src].push_back(term.dst);
            ++indeg[term.dst];
        }
        if (term.func == LinkFunc::Product && term.lag2 == 0) {
            adj[term.src2].push_back(term.dst);
            ++indeg[term.dst];
        }
    }
    std::queue<int> q;
    for (int v = 0; v < spec.n_vars; ++v)
        if (indeg[v] == 0) q.push(v);
    int seen = 0;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        ++seen;
        for (int w : adj[v])
            if (--indeg[w] == 0) q.push(w);
    }
    if (seen != spec.n_vars)
        throw ConfigError("contemporaneous links form a cycle");
}

inline std::vector<int> contemporaneous_order(const ScmSpec& spec) {
    // Stable topological order over lag-0 edges; ties resolve by index.
    std::vector<std::vector<int>> adj(spec.n_vars);
    std::vector<int> indeg(spec.n_vars, 0);
    for (const auto& term : spec.terms) {
        if (term.lag == 0) {
            adj[term.src].push_back(term.dst);
            ++indeg[term.dst];
        }
        if (term.func == LinkFunc::Product && term.lag2 == 0) {
            adj[term.src2].push_back(term.dst);
            ++indeg[term.dst];
        }
    }
    std::vector<int> order;
    std::vector<bool> emitted(spec.n_vars, false);
    while (static_cast<int>(order.size()) < spec.n_vars) {
        for (int v = 0; v < spec.n_vars; ++v) {
            if (!emitted[v] && indeg[v] == 0) {
                emitted[v] = true;
                order.push_back(v);
                for (int w : adj[v]) --indeg[w];
            }
        }
    }
    return order;
}

inline bool has_recurrent_dependency(const ScmSpec& spec) {
    // Cycle over the variable graph where every term contributes an edge;
    // a cycle through lagged edges means a variable feeds its own future.
    std::vector<std::vector<int>> adj(spec.n_vars);
    for (const auto& term : spec.terms) {
        adj[term.src].push_back(term.dst);
        if (term.func == LinkFunc::Product) adj[term.src2].push_back(term.dst);
    }
    std::vector<int> state(spec.n_vars, 0);
    std::vector<int> stack;
    for (int start = 0; start < spec.n_vars; ++start) {
        if (state[start] != 0) continue;
        stack.push_back(start);
        while (!stack.empty()) {
            int v = stack.back();
            if (state[v] == 0) {
                state[v] = 1;
                for (int w : adj[v]) {
                    if (state[w] == 1) return true;
                    if (state[w] == 0) stack.push_back(w);
                }
            } else {
                if (state[v] == 1) state[v] = 2;
                stack.pop_back();
            }
        }
    }
    return false;
}

}  // namespace detail

/**
 * Simulates a structural causal model over lagged and contemporaneous links.
 * Each variable is its own unit-normal noise scaled by noise_sd plus the sum
 * of its incoming terms. Values before the series start count as zero; when
 * any variable (transitively) feeds its own future, 100 burn-in steps are
 * generated and discarded so the returned window is past initialization.
 */
inline TimeSeries gen_scm(const ScmSpec& spec, int T, double noise_sd,
                          std::uint64_t seed) {
    if (spec.n_vars <= 0) throw ConfigError("SCM needs at least one variable");
    if (T < 1) throw ConfigError("SCM series need T >= 1");
    for (const auto& term : spec.terms) {
        auto check_var = [&](int v) {
            if (v < 0 || v >= spec.n_vars)
                throw ConfigError("SCM term references unknown variable");
        };
        check_var(term.src);
        check_var(term.dst);
        if (term.lag < 0) throw ConfigError("SCM lags must be >= 0");
        if (term.func == LinkFunc::Product) {
            check_var(term.src2);
            if (term.lag2 < 0) throw ConfigError("SCM lags must be >= 0");
        }
    }
    detail::check_contemporaneous_acyclic(spec);

    const int burn = detail::has_recurrent_dependency(spec) ? 100 : 0;
    const int total = burn + T;
    const auto order = detail::contemporaneous_order(spec);

    Eigen::MatrixXd values(total, spec.n_vars);
    Rng rng(seed);
    std::vector<double> noise(spec.n_vars);
    for (int t = 0; t < total; ++t) {
        for (int v = 0; v < spec.n_vars; ++v) noise[v] = noise_sd * rng.normal();
        for (int v : order) {
            double val = noise[v];
            for (const auto& term : spec.terms) {
                if (term.dst != v) continue;
                const int ts1 = t - term.lag;
                const double a = ts1 >= 0 ? values(ts1, term.src) : 0.0;
                switch (term.func) {
                    case LinkFunc::Linear: val += term.coef * a; break;
                    case LinkFunc::Square: val += term.coef * a * a; break;
                    case LinkFunc::Product: {
                        const int ts2 = t - term.lag2;
                        const double b = ts2 >= 0 ? values(ts2, term.src2) : 0.0;
                        val += term.coef * a * b;
                        break;
                    }
                }
            }
            values(t, v) = val;
        }
    }

    TimeSeries ts;
    if (spec.names.empty()) {
        for (int v = 0; v < spec.n_vars; ++v)
            ts.vars.push_back("X" + std::to_string(v + 1));
    } else {
        if (static_cast<int>(spec.names.size()) != spec.n_vars)
            throw ConfigError("SCM name list does not match variable count");
        ts.vars = spec.names;
    }
    ts.values = values.bottomRows(T);
    return ts;
}

inline GroundTruth scm_truth(const ScmSpec& spec) {
    GroundTruth gt;
    auto add = [&](int src, int dst, int lag) {
        if (!gt.contains(src, dst, lag)) gt.edges.push_back({src, dst, lag});
    };
    for (const auto& term : spec.terms) {
        add(term.src, term.dst, term.lag);
        if (term.func == LinkFunc::Product) add(term.src2, term.dst, term.lag2);
    }
    return gt;
}

}  // namespace symdyn

#endif  // SYMDYN_SYNTHGEN_HPP
