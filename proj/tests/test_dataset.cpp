#include "svmif/dataset.hpp"
#include "svmif/error.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

using namespace svmif;

TEST_CASE("dataset rejects empty, ragged and non-finite input") {
    CHECK_THROWS_AS(Dataset(std::vector<Sample>{}), InputError);
    CHECK_THROWS_AS(Dataset({{{1.0, 2.0}, 0.0}, {{1.0}, 0.0}}), InputError);
    CHECK_THROWS_AS(Dataset({{{std::nan("")}, 0.0}}), InputError);
    CHECK_THROWS_AS(Dataset({{{1.0}, std::numeric_limits<double>::infinity()}}), InputError);
    CHECK_THROWS_AS(Dataset({{{}, 1.0}}), InputError);
}

TEST_CASE("delimited reader accepts mixed separators and comments") {
    std::istringstream in("# x1,x2,y\n1,2,3\n\n4;5;6\n7 8\t9\n");
    const Dataset d = read_dataset(in);
    REQUIRE(d.size() == 3);
    CHECK(d.dimension() == 2);
    CHECK(d[1].x[1] == 5.0);
    CHECK(d[2].y == 9.0);
    CHECK(d.targets() == std::vector<double>{3.0, 6.0, 9.0});
}

TEST_CASE("reader errors name the offending line") {
    std::istringstream bad("1,2\n3,abc\n");
    try {
        read_dataset(bad);
        FAIL("expected an InputError");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    std::istringstream empty("# nothing\n\n");
    CHECK_THROWS_AS(read_dataset(empty), InputError);
    std::istringstream single("5\n");
    CHECK_THROWS_AS(read_dataset(single), InputError);
}

TEST_CASE("write then read reproduces the samples exactly") {
    const Dataset d({{{0.1, 1.0 / 3.0}, -2.5e-7}, {{1e10, -0.0}, 42.0}});
    std::stringstream s;
    write_dataset(s, d);
    const Dataset back = read_dataset(s);
    REQUIRE(back.size() == d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(back[i].x == d[i].x);
        CHECK(back[i].y == d[i].y);
    }
}

TEST_CASE("slice is half-open and bounds-checked") {
    const Dataset d({{{0.0}, 0.0}, {{1.0}, 1.0}, {{2.0}, 2.0}});
    const Dataset s = d.slice(1, 3);
    CHECK(s.size() == 2);
    CHECK(s[0].y == 1.0);
    CHECK_THROWS_AS(d.slice(2, 2), InputError);
    CHECK_THROWS_AS(d.slice(1, 4), InputError);
}
