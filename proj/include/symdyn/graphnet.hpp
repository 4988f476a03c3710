#ifndef SYMDYN_GRAPHNET_HPP
#define SYMDYN_GRAPHNET_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <deque>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "symdyn/graph.hpp"

namespace symdyn {

/**
 * Element-wise edge-count aggregate of a group of causal graphs. Lagged
 * counts live in one src x dst matrix per lag channel; contemporaneous
 * counts are split by orientation class. `contemp_directed(a, b)` counts
 * graphs with a directed a -> b link; the undirected and conflicting
 * matrices are symmetric.
 */
struct FusionNetwork {
    std::vector<std::string> var_names;
    int tau_max = 1;
    int group_size = 0;
    std::vector<Eigen::MatrixXi> lagged_counts;  // [lag-1](src, dst)
    Eigen::MatrixXi contemp_directed;
    Eigen::MatrixXi contemp_undirected;
    Eigen::MatrixXi contemp_conflicting;
    nlohmann::json meta = nlohmann::json::object();

    int n_vars() const { return static_cast<int>(var_names.size()); }
};

inline FusionNetwork fuse(const std::vector<CausalGraph>& graphs) {
    if (graphs.empty()) throw DataError("fuse: no graphs");
    FusionNetwork f;
    f.var_names = graphs.front().var_names;
    f.group_size = static_cast<int>(graphs.size());
    const int n = f.n_vars();
    for (const auto& g : graphs) {
        if (g.var_names != f.var_names)
            throw DataError("fuse: graphs disagree on variable sets");
        for (const auto& e : g.lagged_edges) f.tau_max = std::max(f.tau_max, e.lag);
    }
    f.lagged_counts.assign(f.tau_max, Eigen::MatrixXi::Zero(n, n));
    f.contemp_directed = Eigen::MatrixXi::Zero(n, n);
    f.contemp_undirected = Eigen::MatrixXi::Zero(n, n);
    f.contemp_conflicting = Eigen::MatrixXi::Zero(n, n);

    for (const auto& g : graphs) {
        for (const auto& e : g.lagged_edges)
            f.lagged_counts[e.lag - 1](e.src, e.dst) += 1;
        for (const auto& e : g.contemporaneous_edges) {
            switch (e.orientation) {
                case Orientation::AToB:
                    f.contemp_directed(e.a, e.b) += 1;
                    break;
                case Orientation::BToA:
                    f.contemp_directed(e.b, e.a) += 1;
                    break;
                case Orientation::Undirected:
                    f.contemp_undirected(e.a, e.b) += 1;
                    f.contemp_undirected(e.b, e.a) += 1;
                    break;
                case Orientation::Conflicting:
                    f.contemp_conflicting(e.a, e.b) += 1;
                    f.contemp_conflicting(e.b, e.a) += 1;
                    break;
            }
        }
    }
    f.meta = {{"group_size", f.group_size},
              {"closeness", "classic when all nodes reachable, else harmonic"}};
    return f;
}

enum class CentralityMode { DirectedLagged, Mixed };

inline CentralityMode parse_centrality_mode(const std::string& s) {
    if (s == "directed-lagged") return CentralityMode::DirectedLagged;
    if (s == "mixed") return CentralityMode::Mixed;
    throw ConfigError("unknown centrality mode: " + s);
}

struct CentralityReport {
    std::vector<std::string> var_names;
    std::vector<int> in_degree, out_degree, degree;
    std::vector<double> closeness, betweenness;
};

namespace detail {

/// Simple-graph view used by the centrality code: one-way arcs plus two-way
/// undirected links, self-loops already dropped.
struct MixedView {
    int n = 0;
    std::vector<std::set<int>> out;
    std::vector<std::set<int>> und;

    explicit MixedView(int n_vars)
        : n(n_vars), out(n_vars), und(n_vars) {}

    void add_directed(int u, int v) {
        if (u != v) out[u].insert(v);
    }
    void add_undirected(int u, int v) {
        if (u != v) {
            und[u].insert(v);
            und[v].insert(u);
        }
    }
    std::vector<int> successors(int u) const {
        std::set<int> s = out[u];
        s.insert(und[u].begin(), und[u].end());
        return {s.begin(), s.end()};
    }
};

inline MixedView view_of(const CausalGraph& g, CentralityMode mode) {
    MixedView v(g.n_vars());
    for (const auto& e : g.lagged_edges) v.add_directed(e.src, e.dst);
    if (mode == CentralityMode::Mixed) {
        for (const auto& e : g.contemporaneous_edges) {
            switch (e.orientation) {
                case Orientation::AToB: v.add_directed(e.a, e.b); break;
                case Orientation::BToA: v.add_directed(e.b, e.a); break;
                default: v.add_undirected(e.a, e.b); break;
            }
        }
    }
    return v;
}

inline MixedView view_of(const FusionNetwork& f, CentralityMode mode,
                         int min_count) {
    MixedView v(f.n_vars());
    const int n = f.n_vars();
    for (const auto& channel : f.lagged_counts)
        for (int s = 0; s < n; ++s)
            for (int d = 0; d < n; ++d)
                if (channel(s, d) >= min_count) v.add_directed(s, d);
    if (mode == CentralityMode::Mixed) {
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                if (f.contemp_directed(a, b) >= min_count) v.add_directed(a, b);
                if (b > a) {
                    if (f.contemp_undirected(a, b) >= min_count)
                        v.add_undirected(a, b);
                    if (f.contemp_conflicting(a, b) >= min_count)
                        v.add_undirected(a, b);
                }
            }
    }
    return v;
}

inline std::vector<int> bfs_distances(const MixedView& v, int s) {
    std::vector<int> dist(v.n, -1);
    dist[s] = 0;
    std::deque<int> q{s};
    while (!q.empty()) {
        const int u = q.front();
        q.pop_front();
        for (int w : v.successors(u))
            if (dist[w] < 0) {
                dist[w] = dist[u] + 1;
                q.push_back(w);
            }
    }
    return dist;
}

/// Brandes accumulation over ordered pairs, unnormalized.
inline std::vector<double> betweenness_of(const MixedView& v) {
    std::vector<double> bc(v.n, 0.0);
    for (int s = 0; s < v.n; ++s) {
        std::vector<int> order;
        std::vector<std::vector<int>> preds(v.n);
        std::vector<double> sigma(v.n, 0.0);
        std::vector<int> dist(v.n, -1);
        sigma[s] = 1.0;
        dist[s] = 0;
        std::deque<int> q{s};
        while (!q.empty()) {
            const int u = q.front();
            q.pop_front();
            order.push_back(u);
            for (int w : v.successors(u)) {
                if (dist[w] < 0) {
                    dist[w] = dist[u] + 1;
                    q.push_back(w);
                }
                if (dist[w] == dist[u] + 1) {
                    sigma[w] += sigma[u];
                    preds[w].push_back(u);
                }
            }
        }
        std::vector<double> delta(v.n, 0.0);
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const int w = *it;
            for (int p : preds[w])
                delta[p] += sigma[p] / sigma[w] * (1.0 + delta[w]);
            if (w != s) bc[w] += delta[w];
        }
    }
    return bc;
}

inline CentralityReport report_from_view(const MixedView& v,
                                         const std::vector<std::string>& names) {
    CentralityReport r;
    r.var_names = names;
    r.in_degree.assign(v.n, 0);
    r.out_degree.assign(v.n, 0);
    r.degree.assign(v.n, 0);
    r.closeness.assign(v.n, 0.0);
    for (int u = 0; u < v.n; ++u) {
        r.out_degree[u] = static_cast<int>(v.out[u].size());
        std::set<int> nbrs = v.und[u];
        nbrs.insert(v.out[u].begin(), v.out[u].end());
        for (int w = 0; w < v.n; ++w)
            if (v.out[w].count(u)) {
                ++r.in_degree[u];
                nbrs.insert(w);
            }
        r.degree[u] = static_cast<int>(nbrs.size());

        const auto dist = bfs_distances(v, u);
        long long total = 0;
        int reached = 0;
        double harmonic = 0.0;
        for (int w = 0; w < v.n; ++w) {
            if (w == u || dist[w] < 0) continue;
            ++reached;
            total += dist[w];
            harmonic += 1.0 / dist[w];
        }
        if (reached == v.n - 1 && total > 0)
            r.closeness[u] = static_cast<double>(v.n - 1) / total;
        else
            r.closeness[u] = harmonic;
    }
    r.betweenness = betweenness_of(v);
    return r;
}

}  // namespace detail

inline CentralityReport centralities(const CausalGraph& g,
                                     CentralityMode mode = CentralityMode::Mixed) {
    if (g.n_vars() == 0) throw DataError("centralities: empty graph");
    return detail::report_from_view(detail::view_of(g, mode), g.var_names);
}

inline CentralityReport centralities(const FusionNetwork& f,
                                     CentralityMode mode = CentralityMode::Mixed,
                                     int min_count = 1) {
    if (f.n_vars() == 0) throw DataError("centralities: empty graph");
    if (min_count < 1) throw ConfigError("min-count must be >= 1");
    return detail::report_from_view(detail::view_of(f, mode, min_count),
                                    f.var_names);
}

namespace detail {

inline nlohmann::json matrix_to_json(const Eigen::MatrixXi& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

inline Eigen::MatrixXi matrix_from_json(const nlohmann::json& j, int n) {
    Eigen::MatrixXi m(n, n);
    if (static_cast<int>(j.size()) != n) throw DataError("fusion json: bad matrix");
    for (int r = 0; r < n; ++r) {
        if (static_cast<int>(j.at(r).size()) != n)
            throw DataError("fusion json: bad matrix");
        for (int c = 0; c < n; ++c) m(r, c) = j.at(r).at(c).get<int>();
    }
    return m;
}

}  // namespace detail

inline nlohmann::json fusion_to_json(const FusionNetwork& f) {
    nlohmann::json j;
    j["vars"] = f.var_names;
    j["group_size"] = f.group_size;
    j["tau_max"] = f.tau_max;
    j["lagged_counts"] = nlohmann::json::array();
    for (const auto& m : f.lagged_counts)
        j["lagged_counts"].push_back(detail::matrix_to_json(m));
    j["contemporaneous"] = {
        {"directed", detail::matrix_to_json(f.contemp_directed)},
        {"undirected", detail::matrix_to_json(f.contemp_undirected)},
        {"conflicting", detail::matrix_to_json(f.contemp_conflicting)}};
    j["meta"] = f.meta;
    return j;
}

inline FusionNetwork fusion_from_json(const nlohmann::json& j) {
    FusionNetwork f;
    try {
        f.var_names = j.at("vars").get<std::vector<std::string>>();
        const int n = f.n_vars();
        f.group_size = j.at("group_size").get<int>();
        f.tau_max = j.at("tau_max").get<int>();
        for (const auto& m : j.at("lagged_counts"))
            f.lagged_counts.push_back(detail::matrix_from_json(m, n));
        if (static_cast<int>(f.lagged_counts.size()) != f.tau_max)
            throw DataError("fusion json: lag channel count mismatch");
        const auto& c = j.at("contemporaneous");
        f.contemp_directed = detail::matrix_from_json(c.at("directed"), n);
        f.contemp_undirected = detail::matrix_from_json(c.at("undirected"), n);
        f.contemp_conflicting = detail::matrix_from_json(c.at("conflicting"), n);
        if (j.contains("meta")) f.meta = j.at("meta");
    } catch (const nlohmann::json::exception& ex) {
        throw DataError(std::string("fusion json: ") + ex.what());
    }
    return f;
}

inline void save_fusion(const std::string& path, const FusionNetwork& f) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << fusion_to_json(f).dump(2) << "\n";
}

inline FusionNetwork load_fusion(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& ex) {
        throw DataError(path + ": " + ex.what());
    }
    return fusion_from_json(j);
}

inline void write_centrality_csv(const std::string& path,
                                 const CentralityReport& r) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << "node,in_degree,out_degree,degree,closeness,betweenness\n";
    for (std::size_t i = 0; i < r.var_names.size(); ++i) {
        out << r.var_names[i] << ',' << r.in_degree[i] << ',' << r.out_degree[i]
            << ',' << r.degree[i] << ',' << r.closeness[i] << ','
            << r.betweenness[i] << "\n";
    }
}

}  // namespace symdyn

#endif  // SYMDYN_GRAPHNET_HPP
