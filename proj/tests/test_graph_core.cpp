#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "gkp/errors.hpp"
#include "gkp/graph.hpp"
#include "gkp/graph_algos.hpp"
#include "gkp/tu_loader.hpp"
#include "oracles.hpp"

using namespace gkp;
namespace fs = std::filesystem;

namespace {

fs::path make_dataset_dir(const std::string& name, const std::string& a,
                          const std::string& indicator, const std::string& graph_labels,
                          const std::string& node_labels) {
    fs::path dir = fs::temp_directory_path() / ("gkp_test_" + name) / name;
    fs::create_directories(dir);
    auto write = [&dir, &name](const std::string& suffix, const std::string& content) {
        std::ofstream out(dir / (name + suffix));
        out << content;
    };
    write("_A.txt", a);
    write("_graph_indicator.txt", indicator);
    write("_graph_labels.txt", graph_labels);
    write("_node_labels.txt", node_labels);
    return dir;
}

}  // namespace

TEST_CASE("graph construction canonicalizes edges") {
    Graph g(3, {{0, 1}, {1, 0}, {2, 2}, {1, 2}}, {0, 0, 1});
    CHECK(g.edges() == std::vector<std::pair<int, int>>{{0, 1}, {1, 2}});
    CHECK(g.dropped_self_loops() == 1);
    CHECK(g.dropped_duplicate_edges() == 1);
    CHECK(g.degree(1) == 2);
    CHECK(g.has_edge(2, 1));
    CHECK_FALSE(g.has_edge(0, 2));
}

TEST_CASE("graph rejects bad input") {
    CHECK_THROWS_AS(Graph(0, {}, {}), ContractViolation);
    CHECK_THROWS_AS(Graph(2, {{0, 2}}, {0, 0}), ContractViolation);
    CHECK_THROWS_AS(Graph(2, {}, {0}), ContractViolation);
    CHECK_THROWS_AS(Graph(2, {}, {0, -1}), ContractViolation);
}

TEST_CASE("smallest well-formed dataset loads") {
    fs::path dir = make_dataset_dir("tiny", "1, 2\n2, 1\n", "1\n1\n", "1\n", "0\n0\n");
    Dataset ds = load_tu_dataset(dir);
    CHECK(ds.size() == 1);
    CHECK(ds.graphs[0].node_count() == 2);
    CHECK(ds.graphs[0].edges().size() == 1);
    CHECK(ds.num_classes == 1);
    CHECK(ds.targets[0] == 0);
    CHECK(ds.label_alphabet == std::vector<long long>{0});
}

TEST_CASE("loader remaps labels and rebases nodes per graph") {
    // Two graphs; raw class labels -1/1; raw node labels 7 and 9.
    fs::path dir = make_dataset_dir("two",
                                    "1, 2\n2, 1\n3, 4\n4, 3\n4, 5\n5, 4\n",
                                    "1\n1\n2\n2\n2\n",
                                    "-1\n1\n",
                                    "7\n9\n7\n7\n9\n");
    Dataset ds = load_tu_dataset(dir);
    REQUIRE(ds.size() == 2);
    CHECK(ds.num_classes == 2);
    CHECK(ds.targets == std::vector<int>{0, 1});  // ascending raw order: -1 -> 0, 1 -> 1
    CHECK(ds.label_alphabet == std::vector<long long>{7, 9});
    CHECK(ds.graphs[0].node_labels() == std::vector<int>{0, 1});
    CHECK(ds.graphs[1].node_labels() == std::vector<int>{0, 0, 1});
    CHECK(ds.graphs[1].edges() == std::vector<std::pair<int, int>>{{0, 1}, {1, 2}});
    // Sum of per-graph node counts matches the node-label line count.
    std::size_t total = 0;
    for (const Graph& g : ds.graphs) total += g.node_count();
    CHECK(total == 5);
}

TEST_CASE("loader error paths name the problem") {
    fs::path dir = make_dataset_dir("broken", "1, 2\n2, 1\n", "1\n1\n", "1\n", "0\n0\n");
    SUBCASE("missing node label file") {
        fs::remove(dir / "broken_node_labels.txt");
        CHECK_THROWS_WITH_AS(load_tu_dataset(dir),
                             doctest::Contains("broken_node_labels.txt"), LoadError);
    }
    SUBCASE("edge crossing two graphs") {
        std::ofstream(dir / "broken_graph_indicator.txt") << "1\n2\n";
        std::ofstream(dir / "broken_graph_labels.txt") << "1\n1\n";
        CHECK_THROWS_WITH_AS(load_tu_dataset(dir), doctest::Contains("crosses two graphs"),
                             FormatError);
    }
    SUBCASE("node with no label") {
        std::ofstream(dir / "broken_node_labels.txt") << "0\n";
        CHECK_THROWS_WITH_AS(load_tu_dataset(dir), doctest::Contains("node with no label"),
                             FormatError);
    }
    SUBCASE("non-integer field") {
        std::ofstream(dir / "broken_A.txt") << "1, x\n";
        CHECK_THROWS_AS(load_tu_dataset(dir), FormatError);
    }
}

TEST_CASE("loader canonicalizes self-loops and duplicates with warning counts") {
    fs::path dir = make_dataset_dir("dirty", "1, 2\n2, 1\n1, 1\n1, 2\n", "1\n1\n", "1\n", "0\n0\n");
    Dataset ds = load_tu_dataset(dir);
    CHECK(ds.graphs[0].edges().size() == 1);
    CHECK(ds.dropped_self_loops == 1);
    CHECK(ds.dropped_duplicate_edges == 1);
}

TEST_CASE("tu round trip") {
    Dataset ds = load_tu_dataset(make_dataset_dir(
        "round", "1, 2\n2, 1\n3, 4\n4, 3\n4, 5\n5, 4\n", "1\n1\n2\n2\n2\n", "-1\n1\n", "7\n9\n7\n7\n9\n"));
    fs::path out = fs::temp_directory_path() / "gkp_test_round_out" / "round";
    write_tu_dataset(ds, out);
    Dataset back = load_tu_dataset(out);
    REQUIRE(back.size() == ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK(back.graphs[i].edges() == ds.graphs[i].edges());
        CHECK(back.graphs[i].node_labels() == ds.graphs[i].node_labels());
    }
    CHECK(back.targets == ds.targets);
}

TEST_CASE("shortest paths: spec examples") {
    SUBCASE("single node") {
        Graph g(1, {}, {0});
        DistanceMatrix d = shortest_paths(g);
        CHECK(d.at(0, 0) == 0);
    }
    SUBCASE("path graph") {
        Graph g(3, {{0, 1}, {1, 2}}, {0, 0, 0});
        DistanceMatrix d = shortest_paths(g);
        CHECK(d.at(0, 2) == 2);
        CHECK(d.at(0, 1) == 1);
        CHECK(d.at(1, 2) == 1);
    }
    SUBCASE("two isolated nodes") {
        Graph g(2, {}, {0, 0});
        DistanceMatrix d = shortest_paths(g);
        CHECK_FALSE(d.reachable(0, 1));
        CHECK(d.at(0, 1) == DistanceMatrix::kUnreachable);
    }
}

TEST_CASE("shortest paths agree with Floyd-Warshall on random graphs up to n = 30") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 29);
        Graph g = oracle::random_graph(rng, n, 0.15, 3);
        DistanceMatrix d = shortest_paths(g);
        auto ref = oracle::floyd_warshall(g);
        for (int u = 0; u < n; ++u)
            for (int v = 0; v < n; ++v) {
                REQUIRE(d.at(u, v) == ref[u][v]);
                REQUIRE(d.at(u, v) == d.at(v, u));
            }
    }
}

TEST_CASE("normalized adjacency: spec examples") {
    SUBCASE("single node") {
        auto m = normalized_adjacency(Graph(1, {}, {0})).to_dense();
        CHECK(m == std::vector<double>{1.0});
    }
    SUBCASE("two connected nodes") {
        auto m = normalized_adjacency(Graph(2, {{0, 1}}, {0, 0})).to_dense();
        CHECK(m == std::vector<double>{0.5, 0.5, 0.5, 0.5});
    }
    SUBCASE("triangle") {
        auto m = normalized_adjacency(Graph(3, {{0, 1}, {1, 2}, {0, 2}}, {0, 0, 0})).to_dense();
        for (double v : m) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    }
}

TEST_CASE("normalized adjacency is row-stochastic with the right sparsity") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 20);
        Graph g = oracle::random_graph(rng, n, 0.3, 2);
        CsrMatrix m = normalized_adjacency(g);
        auto dense = m.to_dense();
        for (int u = 0; u < n; ++u) {
            double row_sum = 0.0;
            for (int v = 0; v < n; ++v) {
                const double entry = dense[static_cast<std::size_t>(u) * n + v];
                row_sum += entry;
                const bool expected_nonzero = (u == v) || g.has_edge(u, v);
                REQUIRE((entry != 0.0) == expected_nonzero);
            }
            REQUIRE(row_sum == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}
