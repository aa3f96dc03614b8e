#include <catch2/catch_amalgamated.hpp>

#include "retrend/month.hpp"
#include "retrend/rng.hpp"
#include "retrend/series.hpp"

using namespace retrend;

TEST_CASE("month arithmetic carries years exactly") {
    CHECK(MonthKey(2014, 12).successor() == MonthKey(2015, 1));
    CHECK(MonthKey(2004, 1).plus_months(23) == MonthKey(2005, 12));
    CHECK(MonthKey(2010, 3).plus_months(-3) == MonthKey(2009, 12));
    CHECK(months_between(MonthKey(2004, 1), MonthKey(2005, 1)) == 12);
    CHECK(months_between(MonthKey(2015, 2), MonthKey(2014, 12)) == -2);

    CounterRng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const int y = 1990 + static_cast<int>(rng.next_u64() % 60);
        const int m = 1 + static_cast<int>(rng.next_u64() % 12);
        const long long delta = static_cast<long long>(rng.next_u64() % 500) - 250;
        const MonthKey a(y, m);
        const MonthKey b = a.plus_months(delta);
        CHECK(months_between(a, b) == delta);
        CHECK(b.plus_months(-delta) == a);
    }
}

TEST_CASE("month parsing and formatting") {
    CHECK(parse_month("2014-12") == MonthKey(2014, 12));
    CHECK(parse_month("2004-01").str() == "2004-01");
    CHECK_THROWS_AS(parse_month("2014-13"), ParseError);
    CHECK_THROWS_AS(parse_month("December 2014"), ParseError);
    CHECK_THROWS_AS(parse_month("2014-12x"), ParseError);
    CHECK_THROWS_AS(MonthKey(2014, 0), DomainError);
}

TEST_CASE("normalize_peak rescales to a 100 peak") {
    MonthlySeries s("a", MonthKey(2010, 1), {5, 10, 20});
    CHECK(normalize_peak(s).values == std::vector<double>{25, 50, 100});

    MonthlySeries zeros("z", MonthKey(2010, 1), {0, 0, 0});
    CHECK(normalize_peak(zeros).values == std::vector<double>{0, 0, 0});

    MonthlySeries peaked("p", MonthKey(2010, 1), {100, 50});
    CHECK(normalize_peak(peaked).values == std::vector<double>{100, 50});

    MonthlySeries empty;
    CHECK_THROWS_AS(normalize_peak(empty), EmptySeries);

    SECTION("entity and start are preserved") {
        const auto out = normalize_peak(s);
        CHECK(out.entity_id == "a");
        CHECK(out.start == s.start);
    }
}

TEST_CASE("normalize_peak is idempotent bitwise") {
    CounterRng rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> values;
        const std::size_t n = 3 + rng.next_u64() % 40;
        for (std::size_t i = 0; i < n; ++i) values.push_back(73.0 * rng.next_uniform());
        MonthlySeries s("s", MonthKey(2004, 1), values);
        const auto once = normalize_peak(s);
        const auto twice = normalize_peak(once);
        CHECK(twice.values == once.values);
        CHECK(*std::max_element(once.values.begin(), once.values.end()) == 100.0);
    }
}

TEST_CASE("extract_window maps months around the release") {
    // Release 2014-12: pre is 2013-12..2014-11, post is 2015-01..2015-12.
    std::vector<double> values(40);
    const MonthKey start(2013, 6);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = static_cast<double>(i);
    MonthlySeries s("shots", start, values);
    const MonthKey release(2014, 12);
    const auto w = extract_window(s, release);

    CHECK(w.release == release);
    for (std::size_t i = 0; i < kWindowHalf; ++i) {
        const MonthKey pre_month = release.plus_months(-(12 - static_cast<long long>(i)));
        const MonthKey post_month = release.plus_months(static_cast<long long>(i) + 1);
        CHECK(w.pre[i] == s.at(pre_month));
        CHECK(w.post[i] == s.at(post_month));
    }
    CHECK(w.pre[0] == s.at(MonthKey(2013, 12)));
    CHECK(w.pre[11] == s.at(MonthKey(2014, 11)));
    CHECK(w.post[0] == s.at(MonthKey(2015, 1)));
    CHECK(w.post[11] == s.at(MonthKey(2015, 12)));

    SECTION("release month value is discarded") {
        const double release_value = s.at(release);
        const auto flat = w.flatten();
        CHECK(std::count(flat.begin(), flat.end(), release_value) == 0);
    }
}

TEST_CASE("extract_window rejects insufficient coverage and names months") {
    MonthlySeries s("short", MonthKey(2014, 6), std::vector<double>(24, 1.0));
    try {
        extract_window(s, MonthKey(2014, 12));
        FAIL("expected WindowOutOfRange");
    } catch (const WindowOutOfRange& e) {
        const std::string message = e.what();
        CHECK(message.find("2013-12") != std::string::npos);
        CHECK(message.find("2014-05") != std::string::npos);
    }

    MonthlySeries tail_short("tail", MonthKey(2014, 1), std::vector<double>(18, 1.0));
    CHECK_THROWS_AS(extract_window(tail_short, MonthKey(2015, 1)), WindowOutOfRange);
}

TEST_CASE("constant series propagates into both halves") {
    MonthlySeries s("c", MonthKey(2000, 1), std::vector<double>(30, 7.0));
    const auto w = extract_window(s, MonthKey(2001, 3));
    for (double v : w.pre) CHECK(v == 7.0);
    for (double v : w.post) CHECK(v == 7.0);
}

TEST_CASE("window scales pointwise with the series") {
    CounterRng rng(3);
    std::vector<double> values(30);
    for (auto& v : values) v = 50.0 * rng.next_uniform();
    const MonthKey start(2010, 1);
    const MonthKey release = start.plus_months(14);
    MonthlySeries s("s", start, values);
    std::vector<double> scaled_values = values;
    for (auto& v : scaled_values) v *= 3.0;
    MonthlySeries scaled("s", start, scaled_values);

    const auto w = extract_window(s, release);
    const auto ws = extract_window(scaled, release);
    for (std::size_t i = 0; i < kWindowHalf; ++i) {
        CHECK(ws.pre[i] == 3.0 * w.pre[i]);
        CHECK(ws.post[i] == 3.0 * w.post[i]);
    }
}

TEST_CASE("window month mapping is bijective back into the series") {
    CounterRng rng(11);
    std::vector<double> values(48);
    for (auto& v : values) v = 100.0 * rng.next_uniform();
    const MonthKey start(2005, 4);
    MonthlySeries s("bijective", start, values);
    const MonthKey release = start.plus_months(20);
    const auto w = extract_window(s, release);
    for (std::size_t k = 0; k < 2 * kWindowHalf; ++k) {
        const int t = EventWindow::t_of_index(k);
        CHECK(t != 0);
        const MonthKey month = release.plus_months(t);
        CHECK(w.value_at_index(k) == s.at(month));
    }
}

TEST_CASE("degenerate window predicates") {
    EventWindow w;
    CHECK(is_all_zero(w));
    CHECK_FALSE(has_zero_baseline(w));

    w.post[11] = 40.0;  // silent before, active after
    CHECK_FALSE(is_all_zero(w));
    CHECK(has_zero_baseline(w));

    w.pre[3] = 3.0;
    CHECK_FALSE(has_zero_baseline(w));
    CHECK_FALSE(is_all_zero(w));
}

TEST_CASE("series rejects negative values and gaps are impossible by construction") {
    CHECK_THROWS_AS(MonthlySeries("n", MonthKey(2010, 1), {1.0, -0.5}), DomainError);
    MonthlySeries s("ok", MonthKey(2010, 1), {1.0, 2.0});
    CHECK(s.month_at(1) == MonthKey(2010, 2));
    CHECK(s.end() == MonthKey(2010, 2));
    CHECK_THROWS_AS(s.at(MonthKey(2011, 1)), WindowOutOfRange);
}
