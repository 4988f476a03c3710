#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "symdyn/graph.hpp"

namespace {

using symdyn::CausalGraph;
using symdyn::Orientation;

CausalGraph sample_graph() {
    CausalGraph g;
    g.var_names = {"worry", "down", "sleep"};
    g.lagged_edges.push_back({1, 2, 1, 0.61, 0.002});
    g.lagged_edges.push_back({0, 0, 1, 0.40, 0.0001});
    g.contemporaneous_edges.push_back(
        symdyn::make_contemp_edge(2, 0, Orientation::AToB, 0.3, 0.004));
    g.meta = {{"method", "pcmci+"}, {"alpha", 0.01}};
    return g;
}

std::filesystem::path temp_json(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

TEST(Graph, ContempEdgeNormalizesEndpointOrder) {
    auto e = symdyn::make_contemp_edge(2, 0, Orientation::AToB, 0.3, 0.004);
    EXPECT_EQ(e.a, 0);
    EXPECT_EQ(e.b, 2);
    EXPECT_EQ(e.orientation, Orientation::BToA);
    auto u = symdyn::make_contemp_edge(1, 0, Orientation::Undirected, 0.1, 0.5);
    EXPECT_EQ(u.orientation, Orientation::Undirected);
    EXPECT_THROW(symdyn::make_contemp_edge(1, 1, Orientation::AToB, 0, 0),
                 symdyn::DataError);
}

TEST(Graph, JsonRoundTrip) {
    auto g = sample_graph();
    auto path = temp_json("symdyn_graph_roundtrip.json");
    symdyn::save_graph(path.string(), g);
    auto r = symdyn::load_graph(path.string());
    std::filesystem::remove(path);

    EXPECT_EQ(r.var_names, g.var_names);
    ASSERT_EQ(r.lagged_edges.size(), 2u);
    // Canonical order: by destination first.
    EXPECT_EQ(r.lagged_edges[0].dst, 0);
    EXPECT_EQ(r.lagged_edges[0].src, 0);
    const auto* e = r.find_lagged(1, 2, 1);
    ASSERT_NE(e, nullptr);
    EXPECT_DOUBLE_EQ(e->statistic, 0.61);
    EXPECT_DOUBLE_EQ(e->p_value, 0.002);
    const auto* c = r.find_contemp(2, 0);
    ASSERT_NE(c, nullptr);
    EXPECT_EQ(c->orientation, Orientation::BToA);
    EXPECT_EQ(r.meta.at("method"), "pcmci+");
}

TEST(Graph, JsonUsesVariableNames) {
    auto j = symdyn::graph_to_json(sample_graph());
    EXPECT_TRUE(j.at("lagged_edges").at(1).at("src").is_string());
    EXPECT_EQ(j.at("lagged_edges").at(1).at("src"), "down");
    EXPECT_EQ(j.at("contemporaneous_edges").at(0).at("a"), "worry");
    EXPECT_EQ(j.at("contemporaneous_edges").at(0).at("orientation"), "b->a");
}

TEST(Graph, OrientationNamesRoundTrip) {
    for (auto o : {Orientation::AToB, Orientation::BToA, Orientation::Undirected,
                   Orientation::Conflicting})
        EXPECT_EQ(symdyn::parse_orientation(symdyn::orientation_name(o)), o);
    EXPECT_THROW(symdyn::parse_orientation("sideways"), symdyn::DataError);
}

TEST(Graph, RejectsMalformedInput) {
    using nlohmann::json;
    json base = symdyn::graph_to_json(sample_graph());

    json bad = base;
    bad["lagged_edges"][0]["src"] = "nonexistent";
    EXPECT_THROW(symdyn::graph_from_json(bad), symdyn::DataError);

    bad = base;
    bad["lagged_edges"][0]["lag"] = 0;
    EXPECT_THROW(symdyn::graph_from_json(bad), symdyn::DataError);

    bad = base;
    bad["contemporaneous_edges"][0]["b"] = "worry";  // same as a
    EXPECT_THROW(symdyn::graph_from_json(bad), symdyn::DataError);

    bad = base;
    bad["contemporaneous_edges"].push_back(bad["contemporaneous_edges"][0]);
    EXPECT_THROW(symdyn::graph_from_json(bad), symdyn::DataError);

    bad = base;
    bad.erase("vars");
    EXPECT_THROW(symdyn::graph_from_json(bad), symdyn::DataError);
}

TEST(Graph, LoadErrors) {
    EXPECT_THROW(symdyn::load_graph("/nonexistent/graph.json"), symdyn::DataError);
    auto path = temp_json("symdyn_graph_malformed.json");
    std::ofstream(path) << "{ not json";
    EXPECT_THROW(symdyn::load_graph(path.string()), symdyn::DataError);
    std::filesystem::remove(path);
}

TEST(Graph, MissingEdgeListsLoadAsEmpty) {
    nlohmann::json j;
    j["vars"] = {"a", "b"};
    auto g = symdyn::graph_from_json(j);
    EXPECT_TRUE(g.lagged_edges.empty());
    EXPECT_TRUE(g.contemporaneous_edges.empty());
    EXPECT_TRUE(g.meta.is_object());
}

}  // namespace
