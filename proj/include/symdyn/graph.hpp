#ifndef SYMDYN_GRAPH_HPP
#define SYMDYN_GRAPH_HPP

#include <algorithm>
#include <fstream>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "symdyn/errors.hpp"

namespace symdyn {

/// Direction of a contemporaneous link between endpoints a < b.
enum class Orientation { AToB, BToA, Undirected, Conflicting };

inline std::string orientation_name(Orientation o) {
    switch (o) {
        case Orientation::AToB: return "a->b";
        case Orientation::BToA: return "b->a";
        case Orientation::Undirected: return "undirected";
        case Orientation::Conflicting: return "conflicting";
    }
    throw ConfigError("invalid orientation value");
}

inline Orientation parse_orientation(const std::string& s) {
    if (s == "a->b") return Orientation::AToB;
    if (s == "b->a") return Orientation::BToA;
    if (s == "undirected") return Orientation::Undirected;
    if (s == "conflicting") return Orientation::Conflicting;
    throw DataError("unknown orientation: " + s);
}

struct LaggedEdge {
    int src = 0;
    int dst = 0;
    int lag = 1;
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Contemporaneous link; endpoints are kept normalized with a < b.
struct ContempEdge {
    int a = 0;
    int b = 0;
    Orientation orientation = Orientation::Undirected;
    double statistic = 0.0;
    double p_value = 1.0;
};

inline ContempEdge make_contemp_edge(int a, int b, Orientation o, double stat,
                                     double p) {
    if (a == b) throw DataError("contemporaneous self-edge");
    if (a > b) {
        std::swap(a, b);
        if (o == Orientation::AToB)
            o = Orientation::BToA;
        else if (o == Orientation::BToA)
            o = Orientation::AToB;
    }
    return ContempEdge{a, b, o, stat, p};
}

/**
 * Mixed causal graph over named variables: directed lagged edges (lag >= 1,
 * self-loops allowed) plus at most one contemporaneous link per unordered
 * pair. `meta` carries the parameters that produced the graph and travels
 * through JSON round trips untouched.
 */
struct CausalGraph {
    std::vector<std::string> var_names;
    std::vector<LaggedEdge> lagged_edges;
    std::vector<ContempEdge> contemporaneous_edges;
    nlohmann::json meta = nlohmann::json::object();

    int n_vars() const { return static_cast<int>(var_names.size()); }

    void sort_edges() {
        std::sort(lagged_edges.begin(), lagged_edges.end(),
                  [](const LaggedEdge& l, const LaggedEdge& r) {
                      return std::tie(l.dst, l.src, l.lag) <
                             std::tie(r.dst, r.src, r.lag);
                  });
        std::sort(contemporaneous_edges.begin(), contemporaneous_edges.end(),
                  [](const ContempEdge& l, const ContempEdge& r) {
                      return std::tie(l.a, l.b) < std::tie(r.a, r.b);
                  });
    }

    const LaggedEdge* find_lagged(int src, int dst, int lag) const {
        for (const auto& e : lagged_edges)
            if (e.src == src && e.dst == dst && e.lag == lag) return &e;
        return nullptr;
    }

    const ContempEdge* find_contemp(int u, int v) const {
        if (u > v) std::swap(u, v);
        for (const auto& e : contemporaneous_edges)
            if (e.a == u && e.b == v) return &e;
        return nullptr;
    }
};

inline nlohmann::json graph_to_json(const CausalGraph& g) {
    CausalGraph c = g;
    c.sort_edges();
    nlohmann::json j;
    j["vars"] = c.var_names;
    j["lagged_edges"] = nlohmann::json::array();
    for (const auto& e : c.lagged_edges) {
        j["lagged_edges"].push_back({{"src", c.var_names.at(e.src)},
                                     {"dst", c.var_names.at(e.dst)},
                                     {"lag", e.lag},
                                     {"stat", e.statistic},
                                     {"p", e.p_value}});
    }
    j["contemporaneous_edges"] = nlohmann::json::array();
    for (const auto& e : c.contemporaneous_edges) {
        j["contemporaneous_edges"].push_back(
            {{"a", c.var_names.at(e.a)},
             {"b", c.var_names.at(e.b)},
             {"orientation", orientation_name(e.orientation)},
             {"stat", e.statistic},
             {"p", e.p_value}});
    }
    j["meta"] = c.meta;
    return j;
}

inline CausalGraph graph_from_json(const nlohmann::json& j) {
    CausalGraph g;
    try {
        g.var_names = j.at("vars").get<std::vector<std::string>>();
        auto index_of = [&](const std::string& name) {
            auto it = std::find(g.var_names.begin(), g.var_names.end(), name);
            if (it == g.var_names.end())
                throw DataError("graph json: unknown variable " + name);
            return static_cast<int>(it - g.var_names.begin());
        };
        for (const auto& e : j.value("lagged_edges", nlohmann::json::array())) {
            LaggedEdge le;
            le.src = index_of(e.at("src").get<std::string>());
            le.dst = index_of(e.at("dst").get<std::string>());
            le.lag = e.at("lag").get<int>();
            if (le.lag < 1) throw DataError("graph json: lagged edge with lag < 1");
            le.statistic = e.at("stat").get<double>();
            le.p_value = e.at("p").get<double>();
            g.lagged_edges.push_back(le);
        }
        for (const auto& e :
             j.value("contemporaneous_edges", nlohmann::json::array())) {
            g.contemporaneous_edges.push_back(make_contemp_edge(
                index_of(e.at("a").get<std::string>()),
                index_of(e.at("b").get<std::string>()),
                parse_orientation(e.at("orientation").get<std::string>()),
                e.at("stat").get<double>(), e.at("p").get<double>()));
        }
        if (j.contains("meta")) g.meta = j.at("meta");
    } catch (const nlohmann::json::exception& ex) {
        throw DataError(std::string("graph json: ") + ex.what());
    }
    for (std::size_t i = 0; i < g.contemporaneous_edges.size(); ++i)
        for (std::size_t k = i + 1; k < g.contemporaneous_edges.size(); ++k)
            if (g.contemporaneous_edges[i].a == g.contemporaneous_edges[k].a &&
                g.contemporaneous_edges[i].b == g.contemporaneous_edges[k].b)
                throw DataError("graph json: duplicate contemporaneous pair");
    g.sort_edges();
    return g;
}

inline void save_graph(const std::string& path, const CausalGraph& g) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << graph_to_json(g).dump(2) << "\n";
}

inline CausalGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& ex) {
        throw DataError(path + ": " + ex.what());
    }
    return graph_from_json(j);
}

}  // namespace symdyn

#endif  // SYMDYN_GRAPH_HPP
