#include "brokerid/errors.hpp"
#include "brokerid/graph.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace brokerid;

TEST(Graph, ParsesTabAndCommaSeparators) {
    const auto g = parse_edge_list("# follower followee\na\tb\nb,c\n\nc\ta\n");
    ASSERT_EQ(g.node_count(), 3u);
    EXPECT_EQ(g.edge_count(), 3u);
    NodeId a, b, c;
    ASSERT_TRUE(g.find("a", a));
    ASSERT_TRUE(g.find("b", b));
    ASSERT_TRUE(g.find("c", c));
    EXPECT_EQ(a, 0u);
    EXPECT_EQ(b, 1u);
    EXPECT_EQ(c, 2u);
    EXPECT_TRUE(g.has_edge(a, b));
    EXPECT_FALSE(g.has_edge(b, a));
    EXPECT_EQ(g.in_degree(a), 1u);
}

TEST(Graph, EmptyInput) {
    const auto g = parse_edge_list("");
    EXPECT_EQ(g.node_count(), 0u);
    EXPECT_EQ(g.edge_count(), 0u);
}

TEST(Graph, DuplicatesAndSelfLoops) {
    const auto g = parse_edge_list("a\tb\na\tb\nb\tb\n");
    EXPECT_EQ(g.edge_count(), 1u);
    EXPECT_THROW(parse_edge_list("a\tb\na\tb\n", false), ValidationError);
    EXPECT_THROW(parse_edge_list("a\ta\n", false), ValidationError);
}

TEST(Graph, MalformedLineReportsLine) {
    try {
        parse_edge_list("a\tb\nlonely\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(Graph, OutOfRangeEdge) {
    std::vector<std::pair<NodeId, NodeId>> edges{{0, 5}};
    EXPECT_THROW(SocialGraph::from_edges(2, edges), ValidationError);
}

TEST(Graph, InAndOutAreTransposes) {
    std::vector<std::pair<NodeId, NodeId>> edges{{0, 1}, {0, 2}, {2, 1}, {3, 0}};
    const auto g = SocialGraph::from_edges(4, edges);
    std::size_t total = 0;
    for (NodeId u = 0; u < 4; ++u) {
        for (NodeId v : g.out_neighbors(u)) {
            const auto in = g.in_neighbors(v);
            EXPECT_NE(std::find(in.begin(), in.end(), u), in.end());
            ++total;
        }
    }
    EXPECT_EQ(total, g.edge_count());
}

TEST(Graph, FlowViewReversesEdges) {
    std::vector<std::pair<NodeId, NodeId>> edges{{0, 1}, {2, 1}};
    const auto g = SocialGraph::from_edges(3, edges);
    const auto f = information_flow_view(g);
    EXPECT_TRUE(f.has_edge(1, 0));
    EXPECT_TRUE(f.has_edge(1, 2));
    EXPECT_EQ(f.edge_count(), 2u);
    const DirectedView v(g, Orientation::information_flow);
    EXPECT_EQ(v.out->degree(1), 2u);
}

TEST(Graph, RoundTripThroughFile) {
    const auto dir = std::filesystem::temp_directory_path() / "brokerid_graph_rt";
    std::filesystem::create_directories(dir);
    const auto g = parse_edge_list("x\ty\ny\tz\nz\tx\nw\tx\n");
    write_edge_list(g, dir / "g.tsv");
    const auto h = load_edge_list(dir / "g.tsv");
    EXPECT_EQ(g, h);
}

TEST(Graph, UndirectedNeighborsAreSortedUnion) {
    std::vector<std::pair<NodeId, NodeId>> edges{{0, 2}, {1, 0}, {0, 1}};
    const auto g = SocialGraph::from_edges(3, edges);
    EXPECT_EQ(undirected_neighbors(g, 0), (std::vector<NodeId>{1, 2}));
}

TEST(Graph, OrientationNames) {
    EXPECT_EQ(orientation_from_string("follow"), Orientation::follow);
    EXPECT_EQ(orientation_from_string(to_string(Orientation::information_flow)),
              Orientation::information_flow);
    EXPECT_THROW(orientation_from_string("sideways"), ArgumentError);
}
