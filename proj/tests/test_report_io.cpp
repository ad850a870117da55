#include "corpus.hpp"
#include "fixtures.hpp"

#include "hydrostate/errors.hpp"
#include "hydrostate/report_io.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace hydrostate;
using io::Json;

TEST_CASE("single-pipe network round trip") {
    const Network net = fixtures::single_pipe();
    const Json j = io::encode(net);
    CHECK(io::decode_network(j) == net);
    CHECK(io::dump(j) == io::dump(io::encode(io::decode_network(io::parse_text(io::dump(j))))));
}

TEST_CASE("empty node list is rejected at /nodes") {
    try {
        (void)io::decode_network(io::parse_text(R"({"nodes": []})"));
        FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
        CHECK(e.path() == "/nodes");
    }
}

TEST_CASE("model cell with m > M is rejected at that cell") {
    const std::string text = R"({"theta": 0.3, "gamma": [4, 4], "normalization": [[0, 1], [0, 1]],
        "labels": ["a"], "cells": [{"m": [0.1, 0.1], "M": [0.2, 0.2], "label": "a"},
                                   {"m": [0.5, 0.9], "M": [0.6, 0.8], "label": "a"}]})";
    try {
        (void)io::decode_model(io::parse_text(text));
        FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
        CHECK(e.path() == "/cells/1");
    }
}

TEST_CASE("schema errors report their location") {
    const auto path_of = [](const std::string& text) -> std::string {
        try {
            (void)io::decode_network(io::parse_text(text));
        } catch (const SchemaError& e) {
            return e.path();
        }
        return "<accepted>";
    };
    CHECK(path_of(R"([])") == "");
    CHECK(path_of(R"({"nodes": [{"id": "r", "kind": "fixed-head"}]})") == "/nodes/0/head");
    CHECK(path_of(R"({"nodes": [{"id": "r", "kind": "tank", "head": 1}]})") == "/nodes/0/kind");
    CHECK(path_of(R"({"version": 2, "nodes": []})") == "/version");
    CHECK(path_of(R"({"nodes": [{"id": "r", "kind": "fixed-head", "head": 1},
        {"id": "a", "kind": "demand", "demand": 1}],
        "pipes": [{"id": "p", "from": "r", "to": "b", "resistance": 1}]})") == "/pipes/0/to");
    CHECK(path_of(R"({"nodes": [{"id": "r", "kind": "fixed-head", "head": 1},
        {"id": "a", "kind": "demand", "demand": 1}],
        "pipes": [{"id": "p", "from": "r", "to": "a", "resistance": -1}]})") ==
          "/pipes/0/resistance");
    CHECK(path_of(R"({"nodes": [{"id": "r", "kind": "fixed-head", "head": 1},
        {"id": "a", "kind": "demand", "demand": 1}, {"id": "b", "kind": "demand", "demand": 1}],
        "pipes": [{"id": "p", "from": "r", "to": "a", "resistance": 1}]})") == "/pipes");
    CHECK_THROWS_AS(io::parse_text("{not json"), ParseError);
}

TEST_CASE("numbers use the shortest round-trip form") {
    CHECK(io::format_number(0.1) == "0.1");
    CHECK(io::format_number(2.0) == "2.0");
    CHECK(io::format_number(63.8999709015028) == "63.8999709015028");
    StreamRng rng(1, 1);
    for (int k = 0; k < 200; ++k) {
        const double v = std::ldexp(rng.uniform(-1.0, 1.0), static_cast<int>(rng.next() % 80) - 40);
        CHECK(std::stod(io::format_number(v)) == v);
        const Json j = io::parse_text(io::dump(Json::array({v})));
        CHECK(j[0].get<double>() == v);
    }
}

TEST_CASE("measurement, state, interval and pattern round trips") {
    const Network tri = fixtures::triangle();
    const StateVector truth = solve_steady_state(tri).state;
    MeasurementSet meas = fixtures::exact_measurements(tri, truth, 1);
    meas.demand_delta = Eigen::Vector2d(0.03, 0.02);
    CHECK(io::decode_measurements(io::encode(meas), tri) == meas);

    const StateVector back = io::decode_state(io::encode(truth, tri), tri);
    CHECK(back.q == truth.q);
    CHECK(back.H == truth.H);

    const IntervalState box{truth, Eigen::VectorXd::LinSpaced(5, 0.01, 0.05)};
    const IntervalState box_back = io::decode_interval_state(io::encode(box, tri), tri);
    CHECK(box_back.center.stacked() == box.center.stacked());
    CHECK(box_back.halfwidth == box.halfwidth);
    const Json encoded = io::encode(box, tri);
    CHECK(encoded.contains("lower"));
    CHECK(encoded.contains("upper"));

    std::vector<LabeledPattern> pats{
        {Pattern{Eigen::Vector2d(0.1, 0.2), Eigen::Vector2d(0.3, 0.4)}, "normal"},
        {Pattern::crisp(Eigen::Vector2d(0.5, 0.5)), ""}};
    const auto file = io::decode_patterns(io::encode_patterns(pats));
    CHECK(file.patterns == pats);
    CHECK_FALSE(file.manifest.has_value());
    // A bare list is accepted too.
    const auto bare = io::decode_patterns(io::parse_text(R"([{"inf": [0.1], "sup": [0.2]}])"));
    REQUIRE(bare.patterns.size() == 1);
    CHECK(bare.patterns[0].label.empty());
}

TEST_CASE("unknown measurement target is a located schema error") {
    const Network tri = fixtures::triangle();
    try {
        (void)io::decode_measurements(io::parse_text(R"({"demand_sigma": 1, "measurements": [
            {"kind": "pipe-flow", "target": "p1", "value": 1, "sigma": 1},
            {"kind": "node-head", "target": "res", "value": 1, "sigma": 1}]})"), tri);
        FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
        CHECK(e.path() == "/measurements/1/target");
    }
}

TEST_CASE("every shipped fixture round-trips") {
    for (const corpus::Fixture& f : corpus::shipped()) {
        CAPTURE(f.file);
        const Json doc = io::parse_text(fixtures::read_text(fixtures::data_path(f.file)));
        CHECK(f.round_trips(doc));
        const Json canonical = f.canonical(doc);
        CHECK(f.canonical(canonical) == canonical);
    }
}

TEST_CASE("single-field corruptions are accepted or rejected with a location") {
    const auto shipped = corpus::shipped();
    StreamRng rng(4242, 0);
    int accepted = 0, rejected = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const corpus::Fixture& f = shipped[static_cast<std::size_t>(trial) % shipped.size()];
        Json doc = io::parse_text(fixtures::read_text(fixtures::data_path(f.file)));
        const std::string what = corpus::corrupt(doc, rng);
        std::string why;
        const auto outcome = corpus::check_corruption(f, doc, &why);
        CAPTURE(f.file);
        CAPTURE(what);
        CAPTURE(why);
        CHECK(outcome != corpus::Outcome::bad);
        (outcome == corpus::Outcome::accepted ? accepted : rejected)++;
    }
    CHECK(rejected > 0);
    CHECK(accepted > 0);
}

TEST_CASE("error objects carry kind, detail and path") {
    const Json schema = io::error_object(SchemaError("/nodes", "array", "null"));
    CHECK(schema["error"] == "SchemaError");
    CHECK(schema["path"] == "/nodes");
    CHECK(schema["detail"].get<std::string>().find("/nodes") != std::string::npos);
    const Json plain = io::error_object(UnknownTarget("p9"));
    CHECK(plain["error"] == "UnknownTarget");
    CHECK_FALSE(plain.contains("path"));
}

TEST_CASE("CSV rows flatten one entity per line") {
    const Network tri = fixtures::triangle();
    const StateVector x{Eigen::Vector3d(1.5, -0.25, 2.0), Eigen::Vector2d(90.0, 91.5)};
    CHECK(io::csv_state(x, tri) ==
          "quantity,id,value\nq,p1,1.5\nq,p2,-0.25\nq,p3,2.0\nH,n1,90.0\nH,n2,91.5\n");
    const std::string intervals = io::csv_interval(IntervalState{x, Eigen::VectorXd::Constant(5, 0.5)}, tri);
    CHECK(intervals.rfind("quantity,id,lower,center,upper\nq,p1,1.0,1.5,2.0\n", 0) == 0);
}

TEST_CASE("encoding is deterministic with sorted keys") {
    const Network net = fixtures::random_network(5);
    const std::string a = io::dump(io::encode(net));
    const std::string b = io::dump(io::encode(net));
    CHECK(a == b);
    CHECK(a.find("\"nodes\"") < a.find("\"pipes\""));
    CHECK(a.find("\"pipes\"") < a.find("\"version\""));
}
