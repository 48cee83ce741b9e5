#include <catch_amalgamated.hpp>

#include <graphon_spectra/experiment.hpp>
#include <graphon_spectra/io.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace gs = graphon_spectra;
using gs::json;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

std::filesystem::path scratch_dir() {
    auto p = std::filesystem::temp_directory_path() / "graphon_spectra_unit";
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("graphon JSON parsing") {
    const auto step = gs::graphon_from_json(json::parse(R"({"kind":"step","fractions":[0.5,0.5],"weights":[[1,2],[2,3]]})"));
    REQUIRE(step.kind() == gs::AnalyticGraphon::Kind::Step);
    CHECK(step(0.25, 0.75) == 2.0);
    CHECK(step(0.75, 0.75) == 3.0);
    const auto c = gs::graphon_from_json(json::parse(R"({"kind":"constant","value":0.7})"));
    CHECK(c(0.1, 0.9) == 0.7);
    const auto p = gs::graphon_from_json(json::parse(R"({"kind":"analytic","name":"product","scale":2})"));
    CHECK_THAT(p(0.5, 0.5), WithinAbs(0.5, 1e-15));

    // round trip through to_json
    const auto back = gs::graphon_from_json(gs::to_json(step));
    CHECK(back.step_graphon()->weights() == step.step_graphon()->weights());
    CHECK(gs::graphon_from_json(gs::to_json(p))(0.3, 0.4) == p(0.3, 0.4));

    for (const char* bad : {R"([1,2])", R"({"fractions":[1],"weights":[[1]]})", R"({"kind":"step","fractions":[1]})",
                            R"({"kind":"step","fractions":[0.5,0.6],"weights":[[1,1],[1,1]]})",
                            R"({"kind":"step","fractions":[0.5,0.5],"weights":[[1,2],[3,1]]})",
                            R"({"kind":"analytic","name":"sin"})", R"({"kind":"bogus"})",
                            R"({"kind":"constant"})"}) {
        INFO(bad);
        CHECK_THROWS_AS(gs::graphon_from_json(json::parse(bad)), gs::ConfigError);
    }
    CHECK(gs::step_graphon_from_json(json::parse(R"({"kind":"analytic","name":"min","panels":8})")).blocks() == 8);
}

TEST_CASE("graphon files") {
    const auto dir = scratch_dir();
    const auto good = (dir / "g.json").string();
    std::ofstream(good) << R"({"kind":"constant","value":1})";
    CHECK(gs::load_graphon(good)(0.2, 0.2) == 1.0);
    const auto broken = (dir / "broken.json").string();
    std::ofstream(broken) << "{ not json";
    CHECK_THROWS_AS(gs::load_graphon(broken), gs::ConfigError);
    CHECK_THROWS_WITH(gs::load_graphon((dir / "missing.json").string()), ContainsSubstring("missing.json"));
}

TEST_CASE("ensemble spec JSON") {
    const auto s = gs::spec_from_json(json::parse(
        R"({"kind":"sbm","sizes":[100,50],"block_weights":[[0.2,0.1],[0.1,0.3]],"seed":4})"));
    CHECK(s.kind == gs::EnsembleKind::Sbm);
    CHECK(s.n == 150);
    CHECK(s.seed == 4);
    const auto round = gs::spec_from_json(gs::to_json(s));
    CHECK(round.sizes == s.sizes);
    CHECK(round.block_weights == s.block_weights);

    const auto g = gs::spec_from_json(json::parse(
        R"({"kind":"gram","m":20,"n":40,"gram_profile":{"left":[1],"right":[0.5,0.5],"weights":[[1,2]]},"dist":"rademacher"})"));
    CHECK(g.gram_profile->weights.cols() == 2);
    CHECK(g.dist == gs::EntryDist::Rademacher);
    CHECK(gs::spec_from_json(gs::to_json(g)).gram_profile->right == g.gram_profile->right);

    CHECK_THROWS_AS(gs::spec_from_json(json::parse(R"({"kind":"goe","n":4})")), gs::ConfigError);
    CHECK_THROWS_AS(gs::spec_from_json(json::parse(R"({"kind":"wigner-type"})")), gs::ConfigError);
    CHECK_THROWS_AS(gs::spec_from_json(json::parse(R"({"kind":"wigner-type","n":"ten"})")), gs::ConfigError);
    CHECK_THROWS_AS(gs::spec_from_json(json::parse(R"({"n":5,"dist":"cauchy"})")), gs::ConfigError);
}

TEST_CASE("GSPC sample files round trip") {
    const auto dir = scratch_dir();
    const auto w = gs::sample_w_random_graph(gs::AnalyticGraphon::product(), 40, 0.5, 3);
    const auto path = (dir / "w.gspc").string();
    gs::write_sample(path, w);
    const auto back = gs::read_sample(path);
    CHECK(back.n == 40);
    CHECK(back.m == 0);
    CHECK(back.matrix == w.matrix);
    CHECK(back.latent == w.latent);
    CHECK(std::filesystem::file_size(path) == 4 + 4 + 16 + 8 * (40 * 40 + 40));

    // header bytes are little-endian
    std::ifstream in(path, std::ios::binary);
    unsigned char head[12];
    in.read(reinterpret_cast<char*>(head), 12);
    CHECK(std::string(reinterpret_cast<char*>(head), 4) == "GSPC");
    CHECK(head[4] == 1);
    CHECK(head[8] == 40);

    const auto gram = gs::sample_gram(6, 10, gs::GramProfile::constant(1.0), gs::EntryDist::Gaussian, 1);
    const auto gpath = (dir / "g.gspc").string();
    gs::write_sample(gpath, gram);
    const auto gb = gs::read_sample(gpath);
    CHECK(gb.n == 10);
    CHECK(gb.m == 6);
    CHECK(gb.latent.empty());
    CHECK(gb.matrix == gram.matrix);

    const auto bad = (dir / "bad.gspc").string();
    std::ofstream(bad) << "NOPE and more";
    CHECK_THROWS_AS(gs::read_sample(bad), gs::ValidationError);
    std::filesystem::resize_file(path, 4 + 4 + 16 + 8 * 100);
    CHECK_THROWS_AS(gs::read_sample(path), gs::ValidationError);
    CHECK_THROWS_AS(gs::read_sample((dir / "absent.gspc").string()), gs::ConfigError);
}

TEST_CASE("CSV writers") {
    std::ostringstream os;
    gs::write_eigenvalues_csv(os, gs::Spectrum::from_values({2.0, -1.0}));
    CHECK_THAT(os.str(), ContainsSubstring("-1"));
    CHECK(os.str().find("-1") < os.str().find('2', os.str().find("-1")));
    CHECK(gs::format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("FNV-1a reference values") {
    CHECK(gs::hex64(gs::fnv1a64("")) == "cbf29ce484222325");
    CHECK(gs::hex64(gs::fnv1a64("a")) == "af63dc4c8601ec8c");
    CHECK(gs::hex64(gs::fnv1a64("foobar")) == "85944171f73967e8");
}

TEST_CASE("experiment config validation") {
    const json base = json::parse(R"({
        "name": "t", "ensemble": {"kind": "wigner-type", "n": 200, "profile": {"kind": "constant", "value": 1}},
        "seeds": [1, 2]})");
    const auto c = gs::experiment_from_json(base);
    CHECK(c.seeds.size() == 2);
    CHECK(c.tolerances.ks == 0.05);

    json dup = base;
    dup["seeds"] = {1, 1};
    CHECK_THROWS_WITH(gs::experiment_from_json(dup), ContainsSubstring("distinct"));

    json path = base;
    path["prediction"] = {{"graphon_path", "no/such/graphon.json"}};
    CHECK_THROWS_WITH(gs::experiment_from_json(path), ContainsSubstring("no/such/graphon.json"));

    json eta = base;
    eta["prediction"] = {{"eta", 0}};
    CHECK_THROWS_AS(gs::experiment_from_json(eta), gs::ConfigError);
    json tol = base;
    tol["tolerances"] = {{"ks", -1}};
    CHECK_THROWS_AS(gs::experiment_from_json(tol), gs::ConfigError);
    json nul = base;
    nul["tolerances"] = {{"ks", nullptr}};
    CHECK_FALSE(gs::experiment_from_json(nul).tolerances.ks.has_value());
    json noens = base;
    noens.erase("ensemble");
    CHECK_THROWS_AS(gs::experiment_from_json(noens), gs::ConfigError);

    // relative graphon paths resolve against the config directory
    const auto dir = scratch_dir();
    std::ofstream(dir / "limit.json") << R"({"kind":"constant","value":1})";
    json rel = base;
    rel["prediction"] = {{"graphon_path", "limit.json"}};
    std::ofstream(dir / "cfg.json") << rel.dump();
    CHECK(gs::load_experiment((dir / "cfg.json").string()).prediction.graphon_path == (dir / "limit.json").string());

    // hashes: stable, sensitive to content, blind to the seed of the ensemble spec
    CHECK(gs::config_hash(c) == gs::config_hash(gs::experiment_from_json(base)));
    json other = base;
    other["ensemble"]["n"] = 201;
    CHECK(gs::config_hash(c) != gs::config_hash(gs::experiment_from_json(other)));
    CHECK(gs::config_hash(c).rfind("fnv1a64:", 0) == 0);
    CHECK(gs::config_hash(c).size() == 8 + 16);
}

TEST_CASE("run_experiment") {
    json j = json::parse(R"({
        "name": "t", "ensemble": {"kind": "wigner-type", "n": 300, "profile": {"kind": "constant", "value": 1}},
        "prediction": {"max_order": 4}, "tolerances": {"ks": 0.2, "l1": null, "moment_rel": 0.3}, "seeds": []})");
    const auto empty = gs::run_experiment(gs::experiment_from_json(j));
    CHECK(empty["replicates"].empty());
    CHECK(empty["pass"] == true);
    CHECK(empty["summary"]["note"] == "no replicates; prediction only");
    CHECK_THAT(empty["prediction"]["moments"]["4"].get<double>(), WithinAbs(2.0, 1e-12));

    j["seeds"] = {5, 6};
    const auto cfg = gs::experiment_from_json(j);
    const auto r1 = gs::run_experiment(cfg);
    const auto r2 = gs::run_experiment(cfg);
    CHECK(r1["replicates"].size() == 2);
    CHECK(r1["replicates"][0]["seed"] == 5);
    CHECK(r1["pass"] == true);
    CHECK(gs::report_fingerprint(r1) == gs::report_fingerprint(r2));
    CHECK(r1["config_hash"] == gs::config_hash(cfg));
    CHECK(r1["tool"]["name"] == "graphon-spectra");

    j["tolerances"]["ks"] = 1e-6;
    CHECK(gs::run_experiment(gs::experiment_from_json(j))["pass"] == false);
}

TEST_CASE("builtin catalog") {
    const auto all = gs::builtin_experiments();
    CHECK(all.size() == 9);
    std::set<std::string> names;
    for (const auto& c : all) {
        names.insert(c.name);
        CHECK_FALSE(c.seeds.empty());
        // every builtin survives a JSON round trip with an unchanged hash
        CHECK(gs::config_hash(gs::experiment_from_json(gs::to_json(c))) == gs::config_hash(c));
    }
    CHECK(names.size() == 9);
    CHECK(gs::builtin_experiment("semicircle-gw").name == "semicircle-gw");
    CHECK_THROWS_AS(gs::builtin_experiment("nope"), gs::ConfigError);
}
