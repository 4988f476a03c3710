#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "symdyn/graphkernel.hpp"
#include "symdyn/rng.hpp"

namespace {

using symdyn::CausalGraph;
using symdyn::KernelKind;
using symdyn::Orientation;
using symdyn::SimpleGraph;
using symdyn::WlParams;

SimpleGraph from_edges(int n, const std::vector<std::pair<int, int>>& edges,
                       bool generic_names = true) {
    SimpleGraph g;
    for (int i = 0; i < n; ++i)
        g.node_names.push_back((generic_names ? "n" : "m") + std::to_string(i));
    g.adj.resize(n);
    for (auto [u, v] : edges) {
        g.adj[u].insert(v);
        g.adj[v].insert(u);
    }
    return g;
}

WlParams uniform_wl(int h) {
    WlParams p;
    p.h = h;
    p.uniform_init = true;
    return p;
}

TEST(Flatten, MergesEdgeClassesDropsSelfLoops) {
    CausalGraph g;
    g.var_names = {"a", "b", "c"};
    g.lagged_edges.push_back({0, 1, 1, 0.4, 0.001});
    g.lagged_edges.push_back({1, 0, 1, 0.3, 0.002});  // reverse direction
    g.lagged_edges.push_back({2, 2, 1, 0.6, 0.0005});  // self-loop
    g.contemporaneous_edges.push_back(
        symdyn::make_contemp_edge(1, 2, Orientation::Conflicting, 0.2, 0.004));
    auto s = symdyn::flatten(g);
    EXPECT_EQ(s.adj[0], std::set<int>{1});
    EXPECT_EQ(s.adj[1], (std::set<int>{0, 2}));
    EXPECT_EQ(s.adj[2], std::set<int>{1});
}

TEST(DegreeKernel, PathVersusTriangleHandValue) {
    auto path3 = from_edges(3, {{0, 1}, {1, 2}});
    auto tri = from_edges(3, {{0, 1}, {1, 2}, {0, 2}});
    // Histograms [0,2,1] and [0,0,3]: dot product 3.
    EXPECT_DOUBLE_EQ(symdyn::degree_kernel(path3, tri), 3.0);
    EXPECT_DOUBLE_EQ(symdyn::degree_kernel(path3, path3), 5.0);
    EXPECT_DOUBLE_EQ(symdyn::degree_kernel(tri, tri), 9.0);
}

TEST(DegreeKernel, SelfKernelIsSquaredHistogramNorm) {
    auto g = from_edges(5, {{0, 1}, {1, 2}, {1, 3}, {3, 4}});
    auto h = symdyn::degree_histogram(g);
    double norm2 = 0;
    for (long long c : h) norm2 += static_cast<double>(c) * c;
    EXPECT_DOUBLE_EQ(symdyn::degree_kernel(g, g), norm2);
}

TEST(DegreeKernel, InvariantUnderRelabeling) {
    auto g = from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
    // Same shape with nodes renumbered.
    auto r = from_edges(4, {{3, 2}, {2, 0}, {0, 1}});
    auto probe = from_edges(4, {{0, 1}, {0, 2}, {0, 3}});
    EXPECT_DOUBLE_EQ(symdyn::degree_kernel(g, probe),
                     symdyn::degree_kernel(r, probe));
}

TEST(WlKernel, UniformInitAtDepthZeroIsNodeCountProduct) {
    auto g = from_edges(4, {{0, 1}, {1, 2}});
    auto h = from_edges(5, {{0, 1}});
    EXPECT_DOUBLE_EQ(symdyn::wl_kernel(g, h, uniform_wl(0)), 20.0);
}

TEST(WlKernel, PathVersusStarHandRefinement) {
    auto path4 = from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
    auto star4 = from_edges(4, {{0, 1}, {0, 2}, {0, 3}});
    // Round 0: both all one color, dot 16. Round 1: path splits 2 ends +
    // 2 middles, star splits 3 leaves + 1 hub; ends and leaves share the
    // same refined color (one neighbor of the base color): dot 2*3 = 6.
    EXPECT_DOUBLE_EQ(symdyn::wl_kernel(path4, star4, uniform_wl(1)), 22.0);
    EXPECT_DOUBLE_EQ(symdyn::wl_kernel(path4, path4, uniform_wl(1)), 24.0);
    EXPECT_DOUBLE_EQ(symdyn::wl_kernel(star4, star4, uniform_wl(1)), 26.0);
}

TEST(WlKernel, IsomorphismInvarianceUnderUniformInit) {
    auto g = from_edges(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}});
    auto iso = from_edges(5, {{2, 4}, {4, 1}, {1, 3}, {3, 0}, {0, 2}});
    for (int h = 0; h <= 3; ++h) {
        auto p = uniform_wl(h);
        EXPECT_DOUBLE_EQ(symdyn::wl_kernel(g, g, p), symdyn::wl_kernel(iso, iso, p));
        EXPECT_DOUBLE_EQ(symdyn::wl_kernel(g, iso, p), symdyn::wl_kernel(g, g, p));
    }
}

TEST(WlKernel, NamedInitSeparatesLabelings) {
    // Same topology, different node names: identity init keeps them apart.
    auto a = from_edges(3, {{0, 1}}, true);
    auto b = from_edges(3, {{0, 1}}, false);
    WlParams p;
    p.h = 1;
    EXPECT_GT(symdyn::wl_kernel(a, a, p), 0.0);
    EXPECT_DOUBLE_EQ(symdyn::wl_kernel(a, b, p), 0.0);
}

TEST(WlKernel, StableRefinementAddsConstantIncrements) {
    auto path4 = from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
    auto star4 = from_edges(4, {{0, 1}, {0, 2}, {0, 3}});
    const double k3 = symdyn::wl_kernel(path4, star4, uniform_wl(3));
    const double k4 = symdyn::wl_kernel(path4, star4, uniform_wl(4));
    const double k5 = symdyn::wl_kernel(path4, star4, uniform_wl(5));
    const double k6 = symdyn::wl_kernel(path4, star4, uniform_wl(6));
    EXPECT_DOUBLE_EQ(k4 - k3, k5 - k4);
    EXPECT_DOUBLE_EQ(k5 - k4, k6 - k5);
}

TEST(Kernels, CauchySchwarzOnRandomGraphs) {
    symdyn::Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 5;
        std::vector<std::pair<int, int>> ea, eb;
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v) {
                if (rng.uniform() < 0.4) ea.push_back({u, v});
                if (rng.uniform() < 0.4) eb.push_back({u, v});
            }
        auto a = from_edges(n, ea);
        auto b = from_edges(n, eb);
        const double dk = symdyn::degree_kernel(a, b);
        EXPECT_LE(dk * dk, symdyn::degree_kernel(a, a) * symdyn::degree_kernel(b, b) +
                              1e-9);
        WlParams p;
        p.h = 2;
        const double wk = symdyn::wl_kernel(a, b, p);
        EXPECT_LE(wk * wk,
                  symdyn::wl_kernel(a, a, p) * symdyn::wl_kernel(b, b, p) + 1e-9);
    }
}

std::vector<CausalGraph> random_graphs(int count, int n, std::uint64_t seed) {
    symdyn::Rng rng(seed);
    std::vector<CausalGraph> graphs;
    for (int k = 0; k < count; ++k) {
        CausalGraph g;
        for (int i = 0; i < n; ++i) g.var_names.push_back("s" + std::to_string(i));
        for (int u = 0; u < n; ++u)
            for (int v = 0; v < n; ++v)
                if (rng.uniform() < 0.25) g.lagged_edges.push_back({u, v, 1, 0.4, 0.001});
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                if (rng.uniform() < 0.2)
                    g.contemporaneous_edges.push_back(symdyn::make_contemp_edge(
                        a, b, static_cast<Orientation>(rng.uniform_int(4)), 0.2,
                        0.003));
        graphs.push_back(g);
    }
    return graphs;
}

TEST(KernelMatrix, SymmetricPositiveSemidefinite) {
    for (auto kind : {KernelKind::Degree, KernelKind::Wl}) {
        auto graphs = random_graphs(6, 5, kind == KernelKind::Degree ? 11 : 12);
        std::vector<std::string> labels;
        for (int i = 0; i < 6; ++i) labels.push_back("g" + std::to_string(i));
        auto km = symdyn::kernel_matrix(graphs, labels, kind);
        EXPECT_LT((km.values - km.values.transpose()).cwiseAbs().maxCoeff(), 1e-10);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(km.values);
        EXPECT_GE(es.eigenvalues().minCoeff(), -1e-8 * km.values.trace());

        auto norm = symdyn::normalized(km);
        for (int i = 0; i < 6; ++i) EXPECT_DOUBLE_EQ(norm.values(i, i), 1.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esn(norm.values);
        EXPECT_GE(esn.eigenvalues().minCoeff(), -1e-8 * norm.values.trace());
    }
}

TEST(KernelMatrix, SingleGraphAndValidation) {
    auto graphs = random_graphs(1, 4, 3);
    auto km = symdyn::kernel_matrix(graphs, {"only"}, KernelKind::Degree);
    EXPECT_EQ(km.values.rows(), 1);
    EXPECT_GT(km.values(0, 0), 0.0);

    auto two = random_graphs(2, 4, 4);
    two[1].var_names[2] = "renamed";
    EXPECT_THROW(symdyn::kernel_matrix(two, {"a", "b"}, KernelKind::Wl),
                 symdyn::DataError);
    EXPECT_THROW(symdyn::kernel_matrix(random_graphs(2, 4, 5), {"a"},
                                       KernelKind::Wl),
                 symdyn::ConfigError);
}

TEST(KernelMatrix, CsvRoundTripShape) {
    auto graphs = random_graphs(3, 4, 9);
    auto km = symdyn::kernel_matrix(graphs, {"p1", "p2", "p3"}, KernelKind::Wl);
    auto path = std::filesystem::temp_directory_path() / "symdyn_kernel.csv";
    symdyn::write_kernel_csv(path.string(), km);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    int rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    in.close();
    std::filesystem::remove(path);
    EXPECT_EQ(header, "id,p1,p2,p3");
    EXPECT_EQ(rows, 3);
}

}  // namespace
