#include <doctest.h>

#include <nlohmann/json.hpp>

#include "riskshare/errors.hpp"
#include "riskshare/io.hpp"

using namespace riskshare;
using nlohmann::json;

TEST_SUITE_BEGIN("io");

TEST_CASE("weighting specs round-trip") {
    const auto prelec = io::parse_weighting(json::parse(R"({"family":"prelec","alpha":0.8})"));
    CHECK(prelec(0.5) == doctest::Approx(Weighting::prelec(0.8)(0.5)));
    const auto heu = io::parse_weighting(
        json::parse(R"({"family":"heu","gamma":0.5,"kappa":0.5})"));
    CHECK(heu(0.5) == doctest::Approx(0.5));
    const auto mix = io::parse_weighting(json::parse(
        R"({"family":"mixture","base":{"family":"prelec","alpha":0.8},"weight":0.25})"));
    CHECK(mix(0.3) ==
          doctest::Approx(0.75 * Weighting::prelec(0.8)(0.3) + 0.25 * 0.3));
    const json back = io::weighting_to_json(mix);
    CHECK(back.at("family") == "mixture");
    CHECK(back.at("base").at("alpha") == doctest::Approx(0.8));
}

TEST_CASE("economy schema") {
    const auto econ = io::parse_economy(json::parse(R"({
        "rdu": {"weighting": {"family":"prelec","alpha":0.8}, "beta": 0.5},
        "eu": [{"beta": 0.5}, {"beta": 2}],
        "lambda": "auto_no_side_payment",
        "w": 0
    })"));
    CHECK(econ.num_agents() == 3);
    CHECK(econ.lambda[0] == doctest::Approx(econ.lambda[1]).epsilon(1e-12));
    const auto fixed = io::parse_economy(json::parse(R"({
        "rdu": {"weighting": {"family":"linear"}, "beta": 1},
        "eu": [{"beta": 1}],
        "lambda": [2.5],
        "w": 1.5
    })"));
    CHECK(fixed.lambda[0] == doctest::Approx(2.5));
    CHECK(fixed.endowment == doctest::Approx(1.5));
}

TEST_CASE("config errors carry context") {
    CHECK_THROWS_AS(io::parse_weighting(json::parse(R"({"family":"zipf"})")),
                    ConfigError);
    CHECK_THROWS_AS(io::parse_weighting(json::parse(R"({"family":"prelec"})")),
                    ConfigError);
    CHECK_THROWS_AS(io::parse_economy(json::parse(R"({"rdu":{}})")), ConfigError);
}

TEST_CASE("csv formatting is deterministic") {
    const auto build = [] {
        io::CsvWriter csv({"a", "b"});
        csv.add_row({1.0 / 3.0, 123456789.123456});
        csv.add_row({-1e-11, 0.0});
        return csv.str();
    };
    const std::string one = build();
    const std::string two = build();
    CHECK(one == two);
    CHECK(one == "a,b\n0.333333333333,123456789.123\n-1e-11,0\n");
}

TEST_CASE("envelope summary fields") {
    const auto env = build_envelope(Weighting::prelec(0.5));
    const json j = io::envelope_summary(env);
    CHECK(j.at("shape") == "InverseSShaped");
    CHECK(j.at("fi_mass").get<double>() == doctest::Approx(env.pstar()));
}

TEST_SUITE_END();
