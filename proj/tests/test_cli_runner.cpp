#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "geoflow/runner.hpp"

using namespace geoflow;
using namespace geoflow::config;
using namespace geoflow::runner;

namespace fs = std::filesystem;

namespace {

ParseResult parse(const std::string& text) { return parse_config(text, schema_for); }

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(is)),
                       std::istreambuf_iterator<char>());
}

const std::string kEulerConfig =
    "experiment = euler2d.run\n"
    "seed = 42\n"
    "out = cli_test_out/a\n"
    "[euler2d]\n"
    "nx = 32\n"
    "ny = 32\n"
    "dt = 0.005\n"
    "t_end = 0.05\n"
    "output_every = 5\n";

}  // namespace

TEST_CASE("sha256 known test vector") {
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("parse_config: empty file reports the missing experiment") {
    const ParseResult r = parse("");
    REQUIRE(!r.config.has_value());
    REQUIRE(r.errors.size() >= 1);
    CHECK(r.errors[0].message.find("experiment") != std::string::npos);
}

TEST_CASE("parse_config: valid euler2d config round-trips through serialization") {
    const ParseResult r = parse(kEulerConfig);
    REQUIRE(r.errors.empty());
    REQUIRE(r.config.has_value());
    CHECK(r.config->experiment == "euler2d.run");
    CHECK(r.config->seed == 42);
    CHECK(r.config->get_int("euler2d.nx") == 32);
    CHECK(r.config->get_real("euler2d.blob_threshold") == 0.2);  // default filled

    const std::string canon = serialize(*r.config);
    const ParseResult r2 = parse(canon);
    REQUIRE(r2.errors.empty());
    CHECK(*r2.config == *r.config);
    CHECK(serialize(*r2.config) == canon);
}

TEST_CASE("parse_config: duplicate keys, unknown keys and type mismatches are all reported") {
    const std::string text =
        "experiment = euler2d.run\n"
        "seed = 1\n"
        "[euler2d]\n"
        "nx = 32\n"
        "nx = 64\n"
        "bogus = 3\n"
        "dt = fast\n"
        "ny = 32\n"
        "t_end = 0.1\n";
    const ParseResult r = parse(text);
    REQUIRE(!r.config.has_value());
    bool dup = false, unknown = false, mismatch = false;
    for (const auto& e : r.errors) {
        if (e.message.find("duplicate key 'euler2d.nx'") != std::string::npos) {
            dup = true;
            CHECK(e.line == 5);
            CHECK(e.message.find("line 4") != std::string::npos);
        }
        if (e.message.find("unknown key 'euler2d.bogus'") != std::string::npos) unknown = true;
        if (e.message.find("type mismatch for 'euler2d.dt'") != std::string::npos)
            mismatch = true;
    }
    CHECK(dup);
    CHECK(unknown);
    CHECK(mismatch);
}

TEST_CASE("parse_config: unknown experiment and missing seed") {
    const ParseResult r = parse("experiment = warpdrive.run\n");
    REQUIRE(!r.config.has_value());
    CHECK(r.errors[0].message.find("unknown experiment") != std::string::npos);

    const ParseResult r2 = parse(
        "experiment = euler2d.run\n[euler2d]\nnx = 32\nny = 32\ndt = 0.01\nt_end = 0.1\n");
    REQUIRE(!r2.config.has_value());
    bool seed_missing = false;
    for (const auto& e : r2.errors)
        if (e.message.find("seed is mandatory") != std::string::npos) seed_missing = true;
    CHECK(seed_missing);
}

TEST_CASE("run_experiment: identical config and seed give bit-identical outputs") {
    fs::remove_all("cli_test_out");
    ParseResult r = parse(kEulerConfig);
    REQUIRE(r.config.has_value());

    config::ExperimentConfig cfg1 = *r.config;
    const RunStatus s1 = run_experiment(cfg1);
    REQUIRE(s1.exit_code == 0);

    config::ExperimentConfig cfg2 = *r.config;
    cfg2.out_dir = "cli_test_out/b";
    const RunStatus s2 = run_experiment(cfg2);
    REQUIRE(s2.exit_code == 0);

    REQUIRE(s1.manifest["files"].size() == s2.manifest["files"].size());
    for (std::size_t i = 0; i < s1.manifest["files"].size(); ++i) {
        CHECK(s1.manifest["files"][i]["name"] == s2.manifest["files"][i]["name"]);
        const std::string name = s1.manifest["files"][i]["name"].get<std::string>();
        if (name.ends_with(".json")) continue;  // metadata echoes the out dir
        CHECK(s1.manifest["files"][i]["sha256"] == s2.manifest["files"][i]["sha256"]);
    }

    // a different seed produces different diagnostics
    config::ExperimentConfig cfg3 = *r.config;
    cfg3.seed = 43;
    cfg3.out_dir = "cli_test_out/c";
    const RunStatus s3 = run_experiment(cfg3);
    REQUIRE(s3.exit_code == 0);
    CHECK(s1.manifest["files"][0]["sha256"] != s3.manifest["files"][0]["sha256"]);
}

TEST_CASE("seed sweep of 8 produces 8 distinct manifests") {
    fs::remove_all("cli_test_out");
    ParseResult r = parse(kEulerConfig);
    REQUIRE(r.config.has_value());
    std::vector<std::string> hashes;
    for (int i = 0; i < 8; ++i) {
        config::ExperimentConfig c = *r.config;
        c.seed = r.config->seed + i;
        c.out_dir = "cli_test_out/sweep_" + std::to_string(i);
        const RunStatus s = run_experiment(c);
        REQUIRE(s.exit_code == 0);
        hashes.push_back(s.manifest["files"][0]["sha256"].get<std::string>());
    }
    for (int i = 0; i < 8; ++i)
        for (int j = i + 1; j < 8; ++j) CHECK(hashes[i] != hashes[j]);
    fs::remove_all("cli_test_out");
}

TEST_CASE("run_experiment: manifest lists every produced file with a correct hash") {
    fs::remove_all("cli_test_out");
    ParseResult r = parse(kEulerConfig);
    REQUIRE(r.config.has_value());
    const RunStatus s = run_experiment(*r.config);
    REQUIRE(s.exit_code == 0);
    int counted = 0;
    for (const auto& f : s.manifest["files"]) {
        const fs::path p = fs::path(r.config->out_dir) / f["name"].get<std::string>();
        REQUIRE(fs::exists(p));
        CHECK(sha256_hex(slurp(p)) == f["sha256"].get<std::string>());
        ++counted;
    }
    // every file in the directory except the manifest itself is listed
    int on_disk = 0;
    for (const auto& entry : fs::directory_iterator(r.config->out_dir))
        if (entry.path().filename() != "manifest.json") ++on_disk;
    CHECK(on_disk == counted);
}

TEST_CASE("run_experiment: CFL violation exits 1; config errors exit 2") {
    config::ExperimentConfig cfg;
    cfg.experiment = "euler2d.run";
    cfg.seed = 7;
    cfg.has_seed = true;
    cfg.out_dir = "cli_test_out/cfl";
    cfg.values = {{"euler2d.nx", "32"},       {"euler2d.ny", "32"},
                  {"euler2d.dt", "0.5"},      {"euler2d.t_end", "5"},
                  {"euler2d.nu_h", "0"},      {"euler2d.hyper_order", "4"},
                  {"euler2d.output_every", "10"}, {"euler2d.snapshot_every", "0"},
                  {"euler2d.blob_threshold", "0.2"}, {"euler2d.init", "random"},
                  {"euler2d.kolmogorov_k", "1"}, {"euler2d.k0", "6"}};
    // crank the amplitude indirectly: huge dt at unit energy violates CFL
    const RunStatus s = run_experiment(cfg);
    CHECK(s.exit_code == 1);
    CHECK(s.message.find("CFL") != std::string::npos);

    config::ExperimentConfig bad = cfg;
    bad.experiment = "zeitlin.run";
    bad.values = {{"zeitlin.n", "9"},
                  {"zeitlin.dt", "0.01"},
                  {"zeitlin.steps", "5"},
                  {"zeitlin.output_every", "1"},
                  {"zeitlin.snapshot_every", "0"},
                  {"zeitlin.laplacian", "hoppe"}};
    bad.out_dir = "cli_test_out/bad";
    const RunStatus s2 = run_experiment(bad);
    CHECK(s2.exit_code == 2);
    CHECK(s2.message.find("not implemented") != std::string::npos);
}

TEST_CASE("topo3d pipeline: abc generator feeds helicity and beltrami through GFL1") {
    fs::remove_all("cli_test_out");
    config::ExperimentConfig gen;
    gen.experiment = "topo3d.abc";
    gen.out_dir = "cli_test_out/abc";
    gen.values = {{"topo3d.n", "32"}, {"topo3d.A", "1"}, {"topo3d.B", "1"}, {"topo3d.C", "1"}};
    REQUIRE(run_experiment(gen).exit_code == 0);

    config::ExperimentConfig hel;
    hel.experiment = "topo3d.helicity";
    hel.out_dir = "cli_test_out/hel";
    hel.values = {{"topo3d.input", "cli_test_out/abc/abc.gfl1"}};
    const RunStatus hs = run_experiment(hel);
    REQUIRE(hs.exit_code == 0);
    const auto j = nlohmann::json::parse(slurp("cli_test_out/hel/result.json"));
    const double V = two_pi * two_pi * two_pi;
    CHECK(std::abs(j["energy"].get<double>() - 1.5 * V) < 1e-9);
    CHECK(std::abs(j["helicity"].get<double>() - 3.0 * V) < 1e-9);

    config::ExperimentConfig bel;
    bel.experiment = "topo3d.beltrami";
    bel.out_dir = "cli_test_out/bel";
    bel.values = {{"topo3d.input", "cli_test_out/abc/abc.gfl1"}, {"topo3d.lambda", "1"}};
    const RunStatus bs = run_experiment(bel);
    REQUIRE(bs.exit_code == 0);
    const auto jb = nlohmann::json::parse(slurp("cli_test_out/bel/result.json"));
    CHECK(jb["beltrami_residual"].get<double>() < 1e-12);
    fs::remove_all("cli_test_out");
}

TEST_CASE("remaining experiments produce outputs at smoke scale") {
    fs::remove_all("cli_test_out");
    auto quick = [&](const std::string& text) {
        const ParseResult r = parse(text);
        REQUIRE_MESSAGE(r.errors.empty(),
                        (r.errors.empty() ? "" : r.errors[0].message));
        return run_experiment(*r.config);
    };
    CHECK(quick("experiment = zeitlin.run\nseed = 3\nout = cli_test_out/z\n[zeitlin]\n"
                "n = 9\ndt = 0.01\nsteps = 20\noutput_every = 5\n")
              .exit_code == 0);
    CHECK(quick("experiment = pv.run\nseed = 5\nout = cli_test_out/p\n[pv]\n"
                "geometry = sphere\nn = 3\nt_end = 2.0\nsection_coord = y\n")
              .exit_code == 0);
    CHECK(quick("experiment = sticky.run\nseed = 8\nout = cli_test_out/s\n[sticky]\nn = 5\n")
              .exit_code == 0);
    CHECK(quick("experiment = sticky.minimize\nseed = 8\nout = cli_test_out/sm\n[sticky]\n"
                "n = 4\n")
              .exit_code == 0);
    CHECK(quick("experiment = sticky.continuum\nseed = 8\nout = cli_test_out/sc\n[sticky]\n"
                "n = 4\ngrid = 64\n")
              .exit_code == 0);
    CHECK(quick("experiment = madelung.verify\nout = cli_test_out/m\n[madelung]\n"
                "nx = 64\nt_end = 0.05\nlevels = 2\n")
              .exit_code == 0);
    CHECK(quick("experiment = filament.run\nout = cli_test_out/f\n[filament]\n"
                "shape = circle\nm = 64\ndt = 1e-4\nsteps = 50\noutput_every = 25\n")
              .exit_code == 0);
    CHECK(quick("experiment = entropy.run\nseed = 2\nout = cli_test_out/e\n[entropy]\n"
                "nx = 32\nmembers = 4\ndt = 0.01\nt_end = 0.05\noutput_every = 5\n"
                "n_coords = 4\neps_list = 0.05,0.1\n")
              .exit_code == 0);
    // spot-check one CSV header
    const std::string csv = slurp("cli_test_out/e/entropy.csv");
    CHECK(csv.rfind("t,H_eps_", 0) == 0);
    fs::remove_all("cli_test_out");
}
