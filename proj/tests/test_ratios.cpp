#include <doctest.h>

#include "mhd/ratios.hpp"

#include <cmath>

using namespace mhd;

TEST_CASE("inequality ratios are finite and thread independent") {
    auto a = inequality_ratios(32, 12, 3, 1);
    auto b = inequality_ratios(32, 12, 3, 3);
    REQUIRE(a.size() == 10);
    REQUIRE(b.size() == a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        MESSAGE(a[i].id << " max " << a[i].max << " mean " << a[i].mean);
        CHECK(std::isfinite(a[i].max));
        CHECK(a[i].max > 0);
        CHECK(a[i].mean <= a[i].max);
        CHECK(a[i].max == b[i].max);
        CHECK(a[i].samples == 12);
    }
}
