#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "dform/app.hpp"
#include "httplib.h"

using namespace dform;
using nlohmann::json;

namespace {

json wave_object(int n = 31) {
    return {{"kind", "form1"},
            {"grid", {{"x", {{"min", -5}, {"max", 5}, {"n", n}}}}},
            {"components", {{{"expr", "y*sin(x)"}}, {{"expr", "-x*cos(y)"}}}}};
}

json lorentz_job() {
    return {{"object",
             {{"kind", "form2"},
              {"grid", {{"x", {{"min", 0.5}, {"max", 5}, {"n", 19}}}, {"y", {{"min", -2}, {"max", 2}, {"n", 9}}}}},
              {"components", {{{"expr", "1/x"}}}}}},
            {"chain", {{{"op", "interior_d"}, {"v", {0, 1}}}}}};
}

template <class T>
std::vector<T> only(const Scene& s) {
    std::vector<T> out;
    for (const auto& p : s.primitives) {
        if (const T* t = std::get_if<T>(&p)) out.push_back(*t);
    }
    return out;
}

struct CliRun {
    int code;
    std::string out, err;
};

CliRun cli(std::vector<std::string> args) {
    args.insert(args.begin(), "dform");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    auto* old_out = std::cout.rdbuf(out.rdbuf());
    auto* old_err = std::cerr.rdbuf(err.rdbuf());
    const int code = cli_main(static_cast<int>(argv.size()), argv.data());
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
    return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "dform_test_app";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("object JSON round trip") {
    const Object a = object_from_json(wave_object(11));
    json j = object_to_json(a);
    CHECK(j["kind"] == "form1");
    CHECK(j["components"][0]["expr"] == "y*sin(x)");
    CHECK(j["components"][0]["values"].size() == 121);

    // Values only: drop expressions, rebuild.
    for (auto& c : j["components"]) c.erase("expr");
    j.erase("mask");
    const Object b = object_from_json(j);
    CHECK_FALSE(has_expressions(b));
    const auto ca = components(a), cb = components(b);
    for (std::size_t c = 0; c < 2; ++c) {
        for (std::size_t k = 0; k < 121; ++k) CHECK((*ca[c])[k] == (*cb[c])[k]);
    }

    // Singular points survive as null plus a mask entry.
    const Object s = object_from_json({{"kind", "form2"},
                                       {"grid", {{"x", {-1, 0, 1}}, {"y", {{"min", 0}, {"max", 1}, {"n", 2}}}}},
                                       {"components", {{{"expr", "1/x"}}}}});
    const json sj = object_to_json(s);
    CHECK(sj["mask"].size() == 2);
    CHECK(sj["mask"][0] == json{{"i", 1}, {"j", 0}, {"kind", "infinite"}});
    CHECK(sj["components"][0]["values"][2].is_null());
}

TEST_CASE("object JSON rejects bad input") {
    CHECK_THROWS_AS(object_from_json({{"kind", "form3"}, {"grid", {{"x", {{"min", 0}, {"max", 1}, {"n", 3}}}}}}), Error);
    json extra = wave_object(5);
    extra["colour"] = "red";
    CHECK_THROWS_WITH_AS(object_from_json(extra), "object: unknown key 'colour'", Error);
    CHECK_THROWS_WITH_AS(object_from_json(wave_object(202)), "grid too large: at most 201 points per axis", Error);
    json short_values = wave_object(3);
    short_values["components"][0] = {{"values", {1, 2, 3}}};
    CHECK_THROWS_AS(object_from_json(short_values), Error);
    json bad_expr = wave_object(3);
    bad_expr["components"][1] = {{"expr", "y sin(x)"}};
    CHECK_THROWS_AS(object_from_json(bad_expr), ParseError);
}

TEST_CASE("chain_from_cli") {
    CHECK(chain_from_cli("ext_d") == json::parse(R"j([{"op":"ext_d"}])j"));
    CHECK(chain_from_cli("interior_d:v=0;1,hodge:keep_object=true:mode=numeric") ==
          json::parse(R"j([{"op":"interior_d","v":[0.0,1.0]},{"op":"hodge","keep_object":true,"mode":"numeric"}])j"));
    CHECK(chain_from_cli("covariant:metric=1+x^2;0;0;2")[0]["metric"] == json::parse(R"j(["1+x^2",0.0,0.0,2.0])j"));
    CHECK_THROWS_AS(chain_from_cli("ext_d,,hodge"), Error);
    CHECK_THROWS_AS(chain_from_cli("scale:factor"), Error);
}

TEST_CASE("typecheck") {
    const auto kinds = typecheck(Kind::Form0, chain_from_cli("ext_d,hodge,ext_d"));
    CHECK(kinds == std::vector<Kind>{Kind::Form0, Kind::Form1, Kind::Form1, Kind::Form2});
    CHECK(typecheck(Kind::Form0, json::array({"ext_d", "ext_d"})).back() == Kind::Form2);
    CHECK(typecheck(Kind::Form1, json::parse(R"j([{"op":"wedge","with":"self"},{"op":"hodge"}])j")).back() == Kind::Form0);
    CHECK(typecheck(Kind::Form2, json::parse(R"j([{"op":"wedge","with":"self"}])j")).back() == Kind::Zero);
    CHECK(typecheck(Kind::Form2, json::parse(R"j([{"op":"wedge","with":"hodge"}])j")).back() == Kind::Form2);
    CHECK(typecheck(Kind::VectorField, json::array({"covariant", "contravariant"})).back() == Kind::VectorField);

    CHECK_THROWS_WITH_AS(typecheck(Kind::Form0, json::array({"ext_d", "ext_d", "ext_d"})),
                         doctest::Contains("exterior derivative of a top-degree form"), KindError);
    CHECK_THROWS_AS(typecheck(Kind::Form0, json::array({"interior_d"})), KindError);
    CHECK_THROWS_AS(typecheck(Kind::Form2, json::parse(R"j([{"op":"hodge","keep_object":true}])j")), KindError);
    CHECK_THROWS_AS(typecheck(Kind::Form1, json::array({"covariant"})), KindError);
    CHECK_THROWS_AS(typecheck(Kind::Form0, json::array({"log_scale"})), KindError);
    CHECK_THROWS_WITH_AS(typecheck(Kind::Form1, json::array({"frobnicate"})), "unknown op 'frobnicate'", Error);
    CHECK_THROWS_WITH_AS(typecheck(Kind::Form1, json::parse(R"j([{"op":"hodge","keep":true}])j")),
                         "hodge: unknown argument 'keep'", Error);
    CHECK_THROWS_AS(typecheck(Kind::Form1, json::parse(R"j([{"op":"set_density","n":500}])j")), Error);
    CHECK_THROWS_AS(typecheck(Kind::Form1, json::parse(R"j([{"op":"ext_d","mode":"symbolic"}])j")), Error);
}

TEST_CASE("run_job type-checks before sampling") {
    // Malformed values would fail while building the object; the chain error wins.
    json job = {{"object",
                 {{"kind", "form2"},
                  {"grid", {{"x", {{"min", 0}, {"max", 1}, {"n", 3}}}}},
                  {"components", {{{"values", {1}}}}}}},
                {"chain", {"ext_d"}}};
    CHECK_THROWS_AS(run_job(JobSpec::from_json(job)), KindError);
    job["chain"] = json::array();
    CHECK_THROWS_WITH_AS(run_job(JobSpec::from_json(job)), doctest::Contains("row-major"), Error);
}

TEST_CASE("apply_op matches the library calls") {
    const Object phi = make_field(Kind::Form0, Grid2::square(-2, 2, 9), {"x^2*y"});
    const Object d = apply_op(phi, "ext_d");
    const auto& f = std::get<Form1>(d);
    CHECK(to_string(*f.dx().expr()) == to_string(*std::get<Form1>(ext_d(phi)).dx().expr()));

    const Object scaled = apply_op(d, json{{"op", "scale"}, {"factor", -2}});
    CHECK(std::get<Form1>(scaled).dx().at(8, 8) == -2 * f.dx().at(8, 8));

    const Object kept = apply_op(d, json{{"op", "hodge"}, {"keep_object", true}});
    CHECK(std::get<Form1>(kept).dx().at(3, 4) == -f.dy().at(3, 4));

    const Object dense = apply_op(d, json{{"op", "set_density"}, {"n", 5}});
    CHECK(grid_of(dense).nx() == 5);

    const Object w = apply_op(d, json{{"op", "wedge"}, {"with", "hodge"}});
    const auto& w2 = std::get<Form2>(w).w;
    for (std::size_t k = 0; k < w2.grid().size(); ++k) {
        const double a = f.dx()[k], b = f.dy()[k];
        CHECK(w2[k] == doctest::Approx(a * a + b * b));
    }

    const Object vf = apply_op(d, json{{"op", "contravariant"}, {"metric", {"1+x^2", 0, 0, 2}}});
    const auto& v = std::get<VectorField>(vf);
    const double x = grid_of(vf).x_at(1);
    CHECK(v.u().at(1, 2) == doctest::Approx(f.dx().at(1, 2) / (1 + x * x)));
    CHECK(v.v().at(1, 2) == doctest::Approx(f.dy().at(1, 2) / 2));
}

TEST_CASE("service: health, routing and errors") {
    const auto h = handle_request("GET", "/api/health", "");
    CHECK(h.status == 200);
    CHECK(json::parse(h.body) == json{{"status", "ok"}, {"version", kVersion}});
    CHECK(handle_request("POST", "/api/health", "").status == 405);
    CHECK(handle_request("GET", "/api/scene", "").status == 405);
    CHECK(handle_request("POST", "/api/nope", "{}").status == 404);

    const auto garbage = handle_request("POST", "/api/scene", "{not json");
    CHECK(garbage.status == 400);
    CHECK(json::parse(garbage.body).contains("error"));

    Config small;
    small.body_limit = 64;
    CHECK(handle_request("POST", "/api/scene", std::string(65, ' '), small).status == 413);

    const auto kind = handle_request("POST", "/api/scene",
                                     json{{"object", wave_object(5)}, {"chain", {"ext_d", "ext_d"}}}.dump());
    CHECK(kind.status == 400);
    CHECK(json::parse(kind.body)["error"].get<std::string>().find("top-degree") != std::string::npos);
}

TEST_CASE("service: parse endpoint") {
    const auto ok = handle_request("POST", "/api/parse", R"j({"expr":"y*sin(x)"})j");
    CHECK(ok.status == 200);
    const json j = json::parse(ok.body);
    CHECK(j["canonical"] == "y*sin(x)");
    CHECK(j["variables"] == json::array({"x", "y"}));
    CHECK(j["ast"]["type"] == "binary");
    CHECK(j["ast"]["op"] == "*");
    CHECK(j["ast"]["rhs"]["func"] == "sin");

    const auto pi = json::parse(handle_request("POST", "/api/parse", R"j({"expr":"pi"})j").body);
    CHECK(pi["ast"]["name"] == "pi");
    CHECK(pi["variables"].empty());

    // "y*sin(x": the '(' at offset 5 is never closed.
    const auto bad = handle_request("POST", "/api/parse", R"j({"expr":"y*sin(x"})j");
    CHECK(bad.status == 400);
    const json e = json::parse(bad.body);
    CHECK(e["offset"] == 5);
    CHECK(e.contains("error"));

    const auto implicit = json::parse(handle_request("POST", "/api/parse", R"j({"expr":"y sin(x)"})j").body);
    CHECK(implicit["offset"] == 2);
}

TEST_CASE("service: zoom job has exactly one inset") {
    const json job = {{"object", wave_object()},
                      {"style", {{"max_sheets", 6}}},
                      {"zoom", {{"target", {2, 3}}, {"mag", 2}, {"dpd", 7}, {"insize", 0.3}}}};
    const auto r = handle_request("POST", "/api/scene", job.dump());
    REQUIRE(r.status == 200);
    CHECK(r.content_type == "application/json");
    const Scene s = scene_from_json(json::parse(r.body));
    const auto insets = only<Inset>(s);
    REQUIRE(insets.size() == 1);
    CHECK(insets[0].anchor_x == 2);
    CHECK(insets[0].anchor_y == 3);
    CHECK(insets[0].size == 0.3);
    CHECK(only<Stack>(*insets[0].scene).size() == 49);
    CHECK(only<Stack>(s).size() == 31 * 31);
    for (const auto& st : only<Stack>(s)) CHECK(st.n <= 6);
}

TEST_CASE("service: Lorentz chain gives a -1/x dx stack scene") {
    const auto r = handle_request("POST", "/api/scene", lorentz_job().dump());
    REQUIRE(r.status == 200);
    const Scene s = scene_from_json(json::parse(r.body));
    const auto stacks = only<Stack>(s);
    REQUIRE(stacks.size() == 19 * 9);
    CHECK(only<Marker>(s).empty());
    // Every stack points along -x; counts fall off as 1/x.
    for (const auto& st : stacks) {
        CHECK(std::abs(std::abs(st.angle) - std::numbers::pi) < 1e-12);
        const int oracle = std::clamp(static_cast<int>(std::ceil(5 * (0.5 / st.x) - 1e-9)), 1, 5);
        CHECK(st.n == oracle);
    }
    const JobResult jr = run_job(JobSpec::from_json(lorentz_job()));
    CHECK(jr.kinds == std::vector<Kind>{Kind::Form2, Kind::Form1});
    const auto& f = std::get<Form1>(jr.object);
    for (std::size_t i = 0; i < 19; ++i) {
        CHECK(f.dx().at(i, 4) == doctest::Approx(-1 / f.grid().x_at(i)).epsilon(1e-15));
        CHECK(f.dy().at(i, 4) == 0);
    }
}

TEST_CASE("service: vector-field insets and values output") {
    json job = {{"object",
                 {{"kind", "vf"},
                  {"grid", {{"x", {{"min", -5}, {"max", 5}, {"n", 21}}}}},
                  {"components", {{{"expr", "x"}}, {{"expr", "y"}}}}}},
                {"zoom", {{"target", {2, 3}}, {"mag", 1.5}, {"dpd", 9}, {"mode", "curl"}, {"inset", false}}},
                {"format", "values-json"}};
    const JobResult r = run_job(JobSpec::from_json(job));
    const auto& v = std::get<VectorField>(r.object);
    CHECK(v.grid().nx() == 9);
    for (std::size_t k = 0; k < v.grid().size(); ++k) {
        CHECK(std::abs(v.u()[k]) < 1e-14);
        CHECK(std::abs(v.v()[k]) < 1e-14);
    }
    const json out = json::parse(render_output(r, OutputFormat::ValuesJson));
    CHECK(out["object"]["kind"] == "vf");

    job["zoom"]["mode"] = "div";
    job["object"]["kind"] = "form2";
    job["object"]["components"] = {{{"expr", "x"}}};
    CHECK_THROWS_AS(run_job(JobSpec::from_json(job)), KindError);
}

TEST_CASE("service is stateless") {
    const std::vector<std::pair<std::string, std::string>> reqs = {
        {"/api/scene", lorentz_job().dump()},
        {"/api/render", json{{"object", wave_object(9)}}.dump()},
        {"/api/parse", R"j({"expr":"exp(-x)"})j"},
        {"/api/scene", json{{"object", wave_object(7)}, {"chain", {"ext_d"}}}.dump()},
    };
    std::vector<std::string> first;
    for (const auto& [p, b] : reqs) first.push_back(handle_request("POST", p, b).body);
    std::vector<std::size_t> order{3, 1, 0, 2, 2, 0};
    for (std::size_t k : order) CHECK(handle_request("POST", reqs[k].first, reqs[k].second).body == first[k]);
}

TEST_CASE("HTTP transport on a real socket") {
    Config config;
    config.port = 0;
    config.body_limit = 4096;
    HttpServer server(config);
    const int port = server.bind();
    REQUIRE(port > 0);
    std::thread t([&] { server.listen(); });

    httplib::Client c("127.0.0.1", port);
    c.set_connection_timeout(5);
    httplib::Result health;
    for (int tries = 0; tries < 50 && !health; ++tries) {
        health = c.Get("/api/health");
        if (!health) std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    REQUIRE(health);
    CHECK(health->status == 200);

    const std::string body = json{{"object", wave_object(11)}}.dump();
    const auto svg = c.Post("/api/render", body, "application/json");
    REQUIRE(svg);
    CHECK(svg->status == 200);
    CHECK(svg->get_header_value("Content-Type") == "image/svg+xml");
    CHECK(svg->body == handle_request("POST", "/api/render", body).body);

    const auto parse = c.Post("/api/parse", R"j({"expr":"y*sin(x"})j", "application/json");
    REQUIRE(parse);
    CHECK(parse->status == 400);
    CHECK(json::parse(parse->body)["offset"] == 5);

    const auto big = c.Post("/api/scene", std::string(8192, ' '), "application/json");
    REQUIRE(big);
    CHECK(big->status == 413);

    // Concurrent requests are independent.
    std::vector<std::future<std::string>> futures;
    for (int k = 0; k < 8; ++k) {
        futures.push_back(std::async(std::launch::async, [port, k] {
            httplib::Client cc("127.0.0.1", port);
            const json job = {{"object", wave_object(5 + 2 * (k % 3))}};
            auto res = cc.Post("/api/scene", job.dump(), "application/json");
            return res ? res->body : std::string();
        }));
    }
    for (int k = 0; k < 8; ++k) {
        const json job = {{"object", wave_object(5 + 2 * (k % 3))}};
        CHECK(futures[k].get() == handle_request("POST", "/api/scene", job.dump()).body);
    }

    server.stop();
    t.join();
}

TEST_CASE("CLI: op example and exit codes") {
    const auto r = cli({"op", "--kind", "form0", "--comp", "x*y", "--chain", "ext_d", "--out", "-", "--format", "values-json"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["object"]["kind"] == "form1");
    CHECK(j["object"]["components"][0]["expr"] == "y");
    CHECK(j["object"]["components"][1]["expr"] == "x");

    const auto dd = cli({"op", "--kind", "form0", "--comp", "x*y", "--chain", "ext_d,ext_d,ext_d"});
    CHECK(dd.code == 1);
    CHECK(dd.err.find("exterior derivative of a top-degree form") != std::string::npos);
    const auto dd1 = cli({"op", "--kind", "form1", "--comp", "y", "--comp", "x", "--chain", "ext_d,ext_d"});
    CHECK(dd1.code == 1);
    CHECK(dd1.err.find("exterior derivative of a top-degree form") != std::string::npos);

    const auto parse = cli({"plot", "--kind", "form0", "--comp", "y*sin(x"});
    CHECK(parse.code == 1);
    CHECK(parse.err.find("offset 5") != std::string::npos);

    CHECK(cli({"plot", "--kind", "form0", "--bogus"}).code == 1);
    CHECK(cli({"plot", "--kind", "form7", "--comp", "x"}).code == 1);
    CHECK(cli({"plot", "--kind", "form0", "--comp", "x", "--range", "5"}).code == 1);
    CHECK(cli({"--help"}).code == 0);

    const auto chk = cli({"check", "--kind", "form2", "--comp", "1/x", "--chain", "interior_d:v=0;1,contravariant"});
    CHECK(chk.code == 0);
    CHECK(chk.out == "ok: form2 -> form1 -> vf\n");
    CHECK(cli({"plot", "--check", "--kind", "form2", "--comp", "1/x", "--chain", "ext_d"}).code == 1);
}

TEST_CASE("CLI and service give byte-identical SVG") {
    const auto out = scratch("wave.svg");
    const auto r = cli({"plot", "--kind", "form1", "--comp", "y*sin(x)", "--comp", "-x*cos(y)", "--range", "-5:5", "--n",
                        "31", "--max-sheets", "6", "--out", out.string()});
    REQUIRE(r.code == 0);
    const json job = {{"object", wave_object()}, {"style", {{"max_sheets", 6}}}};
    const auto svc = handle_request("POST", "/api/render", job.dump());
    REQUIRE(svc.status == 200);
    CHECK(slurp(out) == svc.body);

    // Same through a job file, with a zoom inset.
    const json zjob = {{"object", wave_object()}, {"zoom", {{"target", {2, 3}}, {"mag", 2}, {"dpd", 7}}}};
    const auto job_path = scratch("job.json");
    std::ofstream(job_path) << zjob.dump();
    const auto rz = cli({"plot", "--job", job_path.string()});
    REQUIRE(rz.code == 0);
    CHECK(rz.out == handle_request("POST", "/api/render", zjob.dump()).body);

    const auto rz2 = cli({"zoom", "--kind", "form1", "--comp", "y*sin(x)", "--comp", "-x*cos(y)", "--range", "-5:5",
                          "--target", "2,3", "--mag", "2", "--dpd", "7"});
    REQUIRE(rz2.code == 0);
    CHECK(rz2.out == rz.out);
}

TEST_CASE("config") {
    const Config c = Config::from_json({{"max_grid", 51}, {"canvas", 400}});
    CHECK(c.max_grid == 51);
    CHECK(c.canvas == 400);
    CHECK(c.port == 7325);
    CHECK_THROWS_AS(Config::from_json({{"colour", 1}}), Error);
    CHECK_THROWS_AS(Config::from_json({{"threshold", -1}}), Error);
    CHECK_THROWS_AS(object_from_json(wave_object(61), c), Error);

    const JobResult r = run_job(JobSpec::from_json({{"object", wave_object(5)}}), c);
    CHECK(render_output(r, OutputFormat::Svg, c).find("width=\"480\"") != std::string::npos);
}
