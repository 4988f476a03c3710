#ifndef SYMDYN_GRAPHKERNEL_HPP
#define SYMDYN_GRAPHKERNEL_HPP

#include <Eigen/Dense>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "symdyn/graph.hpp"

namespace symdyn {

/// Undirected simple view of a mixed graph: every lagged or contemporaneous
/// link becomes one edge regardless of direction class; self-loops dropped.
struct SimpleGraph {
    std::vector<std::string> node_names;
    std::vector<std::set<int>> adj;

    int n() const { return static_cast<int>(node_names.size()); }
};

inline SimpleGraph flatten(const CausalGraph& g) {
    SimpleGraph s;
    s.node_names = g.var_names;
    s.adj.resize(g.var_names.size());
    auto link = [&](int u, int v) {
        if (u == v) return;
        s.adj[u].insert(v);
        s.adj[v].insert(u);
    };
    for (const auto& e : g.lagged_edges) link(e.src, e.dst);
    for (const auto& e : g.contemporaneous_edges) link(e.a, e.b);
    return s;
}

/// Counts per degree value, indices 0..max_degree.
inline std::vector<long long> degree_histogram(const SimpleGraph& g) {
    std::vector<long long> hist(1, 0);
    for (const auto& nbrs : g.adj) {
        const std::size_t d = nbrs.size();
        if (d >= hist.size()) hist.resize(d + 1, 0);
        ++hist[d];
    }
    return hist;
}

inline double degree_kernel(const SimpleGraph& a, const SimpleGraph& b) {
    if (a.n() == 0 || b.n() == 0) throw DataError("degree_kernel: empty graph");
    const auto ha = degree_histogram(a);
    const auto hb = degree_histogram(b);
    const std::size_t m = std::min(ha.size(), hb.size());
    double k = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        k += static_cast<double>(ha[i]) * static_cast<double>(hb[i]);
    return k;
}

struct WlParams {
    int h = 3;
    // Structure-only comparison; default colors start from node names since
    // all graphs in a study share the symptom set.
    bool uniform_init = false;
};

/**
 * Weisfeiler-Lehman subtree kernel with an exactly injective relabeling: a
 * string dictionary shared by the pair maps (color, sorted neighbor colors)
 * to dense ids. The kernel is the sum over rounds 0..h of the dot product of
 * the two color-count histograms.
 */
inline double wl_kernel(const SimpleGraph& a, const SimpleGraph& b,
                        const WlParams& params = WlParams{}) {
    if (params.h < 0) throw ConfigError("wl_kernel: h must be >= 0");
    if (a.n() == 0 || b.n() == 0) throw DataError("wl_kernel: empty graph");

    std::map<std::string, int> dict;
    auto intern = [&](const std::string& s) {
        auto [it, inserted] = dict.emplace(s, static_cast<int>(dict.size()));
        return it->second;
    };

    std::vector<int> ca(a.n()), cb(b.n());
    for (int i = 0; i < a.n(); ++i)
        ca[i] = intern(params.uniform_init ? "*" : a.node_names[i]);
    for (int i = 0; i < b.n(); ++i)
        cb[i] = intern(params.uniform_init ? "*" : b.node_names[i]);

    auto refined = [&dict](const SimpleGraph& g, const std::vector<int>& colors) {
        std::vector<std::string> labels(g.n());
        for (int i = 0; i < g.n(); ++i) {
            std::vector<int> nc;
            for (int w : g.adj[i]) nc.push_back(colors[w]);
            std::sort(nc.begin(), nc.end());
            std::string s = std::to_string(colors[i]) + ":";
            for (std::size_t k = 0; k < nc.size(); ++k) {
                if (k) s += ',';
                s += std::to_string(nc[k]);
            }
            labels[i] = std::move(s);
        }
        return labels;
    };

    double kernel = 0.0;
    for (int round = 0;; ++round) {
        std::map<int, long long> ha, hb;
        for (int c : ca) ++ha[c];
        for (int c : cb) ++hb[c];
        for (const auto& [color, na] : ha) {
            auto it = hb.find(color);
            if (it != hb.end())
                kernel += static_cast<double>(na) * static_cast<double>(it->second);
        }
        if (round == params.h) break;
        auto la = refined(a, ca);
        auto lb = refined(b, cb);
        for (int i = 0; i < a.n(); ++i) ca[i] = intern(la[i]);
        for (int i = 0; i < b.n(); ++i) cb[i] = intern(lb[i]);
    }
    return kernel;
}

struct KernelMatrix {
    std::vector<std::string> labels;
    Eigen::MatrixXd values;
};

enum class KernelKind { Degree, Wl };

inline KernelKind parse_kernel_kind(const std::string& s) {
    if (s == "degree") return KernelKind::Degree;
    if (s == "wl") return KernelKind::Wl;
    throw ConfigError("unknown kernel kind: " + s);
}

inline KernelMatrix kernel_matrix(const std::vector<CausalGraph>& graphs,
                                  const std::vector<std::string>& labels,
                                  KernelKind kind,
                                  const WlParams& wl = WlParams{}) {
    if (graphs.empty()) throw DataError("kernel_matrix: no graphs");
    if (labels.size() != graphs.size())
        throw ConfigError("kernel_matrix: label count mismatch");
    for (const auto& g : graphs)
        if (g.var_names != graphs.front().var_names)
            throw DataError("kernel_matrix: graphs disagree on node sets");

    std::vector<SimpleGraph> flat;
    flat.reserve(graphs.size());
    for (const auto& g : graphs) flat.push_back(flatten(g));

    const int n = static_cast<int>(graphs.size());
    KernelMatrix km;
    km.labels = labels;
    km.values.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const double k = kind == KernelKind::Degree
                                 ? degree_kernel(flat[i], flat[j])
                                 : wl_kernel(flat[i], flat[j], wl);
            km.values(i, j) = k;
            km.values(j, i) = k;
        }
    return km;
}

/// Cosine normalization; diagonal becomes exactly 1 wherever K(a,a) > 0.
inline KernelMatrix normalized(const KernelMatrix& km) {
    KernelMatrix out;
    out.labels = km.labels;
    const Eigen::Index n = km.values.rows();
    out.values.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const double denom = std::sqrt(km.values(i, i) * km.values(j, j));
            out.values(i, j) = denom > 0.0 ? km.values(i, j) / denom : 0.0;
            if (i == j && km.values(i, i) > 0.0) out.values(i, j) = 1.0;
        }
    return out;
}

inline void write_kernel_csv(const std::string& path, const KernelMatrix& km) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << "id";
    for (const auto& l : km.labels) out << ',' << l;
    out << "\n";
    out.precision(17);
    for (Eigen::Index r = 0; r < km.values.rows(); ++r) {
        out << km.labels[r];
        for (Eigen::Index c = 0; c < km.values.cols(); ++c)
            out << ',' << km.values(r, c);
        out << "\n";
    }
}

}  // namespace symdyn

#endif  // SYMDYN_GRAPHKERNEL_HPP
