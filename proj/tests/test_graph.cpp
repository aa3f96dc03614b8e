#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "retrend/graph.hpp"

using namespace retrend;

TEST_CASE("a chain of records loads as nodes plus edges") {
    std::istringstream in(
        "a\tb\tsample\t2010-01\n"
        "b\tc\tcover\t2012-07\n");
    const auto graph = BorrowingGraph::load(in);
    CHECK(graph.node_count() == 3);
    CHECK(graph.edges().size() == 2);
    CHECK(graph.has_song("a"));
    CHECK(graph.has_song("c"));
    CHECK_FALSE(graph.has_song("d"));
    CHECK(graph.edges_of_borrowed("a").size() == 1);
    CHECK(graph.edges_of_borrowee("c").size() == 1);
    CHECK(graph.edges_of_borrowed("c").empty());
}

TEST_CASE("duplicate records collapse to one edge and are counted") {
    std::istringstream in(
        "a\tb\tsample\t2010-01\n"
        "a\tb\tsample\t2010-01\n"
        "a\tb\tsample\t2010-01\n"
        "a\tb\tremix\t2010-01\n");
    const auto graph = BorrowingGraph::load(in);
    CHECK(graph.edges().size() == 2);  // same pair, different kind stays
    CHECK(graph.duplicates_dropped() == 2);
}

TEST_CASE("the Somebody/Shots pair parses with its release month") {
    std::istringstream in(
        "# borrowed\tborrowee\tkind\trelease\n"
        "shots-lmfao\tsomebody-natalie-la-rose\tsample\t2014-12\n");
    const auto graph = BorrowingGraph::load(in);
    REQUIRE(graph.edges().size() == 1);
    const auto& edge = graph.edges().front();
    CHECK(edge.borrowed_id == "shots-lmfao");
    CHECK(edge.borrowee_id == "somebody-natalie-la-rose");
    CHECK(edge.kind == BorrowKind::sample);
    CHECK(edge.release == MonthKey(2014, 12));
}

TEST_CASE("malformed input is rejected with the line number") {
    std::istringstream self_loop("a\ta\tsample\t2010-01\n");
    CHECK_THROWS_AS(BorrowingGraph::load(self_loop), SelfLoopEdge);

    std::istringstream bad_kind("a\tb\tmashup\t2010-01\n");
    CHECK_THROWS_AS(BorrowingGraph::load(bad_kind), ParseError);

    std::istringstream missing_field("\n# comment\na\tb\tsample\n");
    try {
        BorrowingGraph::load(missing_field);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }

    std::istringstream bad_month("a\tb\tsample\t2010-13\n");
    CHECK_THROWS_AS(BorrowingGraph::load(bad_month), ParseError);
}

TEST_CASE("comments, blank lines, and CRLF are tolerated") {
    std::istringstream in(
        "# header comment\r\n"
        "\r\n"
        "a\tb\tremix\t2019-05\r\n");
    const auto graph = BorrowingGraph::load(in);
    CHECK(graph.edges().size() == 1);
    CHECK(graph.edges().front().kind == BorrowKind::remix);
}

TEST_CASE("song table loads and validates") {
    std::istringstream in(
        "s1\tShots\tLMFAO\t2009-10\n"
        "s2\tSomebody\tNatalie La Rose\t\n"
        "s3\tNo Release\tSomeone\n");
    const auto songs = load_songs(in);
    REQUIRE(songs.size() == 3);
    CHECK(songs[0].release == MonthKey(2009, 10));
    CHECK_FALSE(songs[1].release.has_value());
    CHECK_FALSE(songs[2].release.has_value());

    std::istringstream blank_title("s4\t \tArtist\n");
    CHECK_THROWS_AS(load_songs(blank_title), ParseError);
}
