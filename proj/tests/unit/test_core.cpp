#include <doctest.h>

#include "drip/core/types.hpp"

using namespace drip;

TEST_CASE("parse_mode maps the three codes") {
    CHECK(parse_mode(1) == Mode::AI);
    CHECK(parse_mode(2) == Mode::AUTO);
    CHECK(parse_mode(3) == Mode::MANUAL);
}

TEST_CASE("parse_mode rejects out-of-range codes and the caller keeps its mode") {
    Mode current = Mode::AUTO;
    for (int code : {0, 4, -1, 100}) {
        CHECK_THROWS_AS(current = parse_mode(code), Error);
    }
    CHECK(current == Mode::AUTO);
}

TEST_CASE("mode codes round-trip") {
    for (Mode m : {Mode::AI, Mode::AUTO, Mode::MANUAL}) CHECK(parse_mode(mode_code(m)) == m);
}

TEST_CASE("relays are active-low") {
    CHECK(electrical_level(RelayState::ON) == Level::LOW);
    CHECK(electrical_level(RelayState::OFF) == Level::HIGH);
    CHECK(from_level(Level::LOW) == RelayState::ON);
    CHECK(from_level(Level::HIGH) == RelayState::OFF);
}

TEST_CASE("pot ids map to relay and soil channel pairs") {
    for (std::size_t i = 0; i < kPotCount; ++i) {
        PotId p(i);
        CHECK(p.relay() == i);
        CHECK(p.soil_channels()[0] == 2 * i);
        CHECK(p.soil_channels()[1] == 2 * i + 1);
    }
    CHECK(PotId(2).name() == "pot_3");
    CHECK_THROWS_AS(PotId(3), Error);
}

TEST_CASE("zone average floors the two-channel mean") {
    SoilArray soil{3000, 2980, 2101, 2100, 0, 1};
    CHECK(zone_average(soil, PotId(0)) == 2990);
    CHECK(zone_average(soil, PotId(1)) == 2100);
    CHECK(zone_average(soil, PotId(2)) == 0);
}
