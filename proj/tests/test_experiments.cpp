#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "cfma/experiments.hpp"
#include "cfma/rng.hpp"

using namespace cfma;
using nlohmann::json;

namespace {

SweepConfig small_config()
{
    SweepConfig cfg;
    cfg.scenario = Scenario::generic_mimo;
    cfg.dist = {1.0, 2.0};
    cfg.power_grid_db = power_grid(0.0, 12.0, 4.0);
    cfg.realizations = 40;
    cfg.seed = 5;
    cfg.schemes = {Scheme::scs, Scheme::pcs};
    cfg.pcs_search.entry_bound = 2;
    return cfg;
}

std::string strip_meta(const std::string& csv)
{
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line))
        if (line.empty() || line[0] != '#')
            out += line + "\n";
    return out;
}

std::filesystem::path temp_path(const std::string& name)
{
    return std::filesystem::temp_directory_path() / ("cfma_test_" + std::to_string(::getpid()) + "_" + name);
}

int run_cli(const std::string& args, const std::string& stdout_file = "/dev/null")
{
    const std::string cmd = std::string(CFMA_CLI_PATH) + " " + args + " > " + stdout_file + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

} // namespace

TEST_CASE("power grid construction")
{
    const auto g = power_grid(0.0, 24.0, 2.0);
    CHECK(g.size() == 13);
    CHECK(g.back() == doctest::Approx(24.0));
    CHECK(power_grid(0.0, 1.0, 0.1).size() == 11);
    CHECK_THROWS_AS(power_grid(0.0, 1.0, 0.0), Error);
    CHECK_THROWS_AS(power_grid(2.0, 1.0, 1.0), Error);
}

TEST_CASE("config parsing")
{
    const json j = json::parse(R"({
        "scenario": "simo", "r": 3, "dist": {"lo": 1, "hi": 2},
        "power_grid_db": {"start": 0, "stop": 10, "step": 5},
        "realizations": 12, "seed": 77, "schemes": ["scs", "pcs"],
        "pcs_search": {"entry_bound": 2, "beta_grid": {"points": 3}}, "threads": 2
    })");
    const SweepConfig cfg = config_from_json(j);
    CHECK(cfg.scenario == Scenario::simo);
    CHECK(cfg.r == 3);
    CHECK(cfg.t == 1);
    CHECK(cfg.dist.lo == 1.0);
    CHECK(cfg.power_grid_db == std::vector<double>{0.0, 5.0, 10.0});
    CHECK(cfg.realizations == 12);
    CHECK(cfg.seed == 77);
    CHECK(cfg.schemes.size() == 2);
    CHECK(cfg.pcs_search.entry_bound == 2);
    CHECK(cfg.pcs_search.beta_grid.points == 3);
    CHECK(cfg.threads == 2);

    const SweepConfig back = config_from_json(config_to_json(cfg));
    CHECK(config_to_json(back) == config_to_json(cfg));
}

TEST_CASE("config errors")
{
    auto code_of = [](const std::string& text) {
        try {
            config_from_json(json::parse(text));
        } catch (const Error& e) {
            return e.code();
        }
        return Errc::io_failure;
    };
    CHECK(code_of(R"({"bogus": 1})") == Errc::config_error);
    CHECK(code_of(R"({"scenario": "triangle"})") == Errc::config_error);
    CHECK(code_of(R"({"realizations": 0})") == Errc::config_error);
    CHECK(code_of(R"({"realizations": "many"})") == Errc::config_error);
    CHECK(code_of(R"({"dist": {"lo": 2, "hi": 1}})") == Errc::config_error);
    CHECK(code_of(R"({"scenario": "diagonal-mimo", "r": 2, "t": 3})") == Errc::config_error);
    CHECK(code_of(R"({"pcs_search": {"entry_bound": 9}})") == Errc::config_error);
    CHECK(code_of(R"({"power_grid_db": [4, 2]})") == Errc::config_error);
    CHECK(code_of(R"([1, 2])") == Errc::config_error);

    try {
        load_config("/nonexistent/dir/config.json");
        FAIL("expected an io failure");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::io_failure);
    }
}

TEST_CASE("channel draws depend only on seed and index")
{
    const SweepConfig cfg = small_config();
    const ChannelPair a = draw_channel(cfg, 7);
    SweepConfig other = cfg;
    other.power_grid_db = {3.0};
    other.realizations = 1000;
    CHECK(draw_channel(other, 7).h1 == a.h1);
    other.seed = 6;
    CHECK(draw_channel(other, 7).h1 != a.h1);
}

TEST_CASE("sweeps are deterministic and shard-invariant")
{
    SweepConfig cfg = small_config();
    const RaCurve one = run_ra_sweep(cfg);
    cfg.threads = 3;
    const RaCurve three = run_ra_sweep(cfg);
    const RaCurve manual = merge_curves(run_ra_shard(cfg, 0, 13), run_ra_shard(cfg, 13, 40));
    const json meta = artifact_meta(config_to_json(cfg), false);
    CHECK(curve_csv(one, meta) == curve_csv(three, meta));
    CHECK(curve_csv(one, meta) == curve_csv(manual, meta));
    CHECK(curve_csv(one, meta) == curve_csv(run_ra_sweep(cfg), meta));
    for (const RaRow& row : one.rows) {
        CHECK(row.realizations == 40);
        CHECK(row.achievable <= row.realizations);
        CHECK(row.errors == 0);
    }
}

TEST_CASE("csv layout and round trip")
{
    const SweepConfig cfg = small_config();
    const RaCurve curve = run_ra_sweep(cfg);
    const std::string csv = curve_csv(curve, artifact_meta(config_to_json(cfg)));
    CHECK(csv.find('\r') == std::string::npos);
    const std::string body = strip_meta(csv);
    CHECK(body.rfind("p_db,scheme,realizations,achievable,errors,r_a\n", 0) == 0);
    CHECK(csv.find("# rng=" + std::string(rng_identifier)) != std::string::npos);
    const auto rows = read_csv_rows(csv);
    REQUIRE(rows.size() == curve.rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].p_db == curve.rows[i].p_db);
        CHECK(rows[i].scheme == curve.rows[i].scheme);
        CHECK(rows[i].achievable == curve.rows[i].achievable);
        CHECK(rows[i].errors == curve.rows[i].errors);
    }
    CHECK_THROWS_AS(read_csv_rows("a,b\n1,2\n"), Error);

    RaCurve precise;
    precise.rows.push_back(RaRow{1.0 / 3.0, "scs", 3, 1, 0});
    CHECK(strip_meta(curve_csv(precise, json::object())) ==
          "p_db,scheme,realizations,achievable,errors,r_a\n0.333333,scs,3,1,0,0.333333\n");
}

TEST_CASE("json artifact carries the configuration and rng")
{
    const SweepConfig cfg = small_config();
    const json out = curve_json(run_ra_sweep(cfg), artifact_meta(config_to_json(cfg)));
    CHECK(out.at("config").at("seed") == 5);
    CHECK(out.at("config").at("pcs_search").at("entry_bound") == 2);
    CHECK(out.at("config").at("pcs_search").at("max_candidates") == cfg.pcs_search.max_candidates);
    CHECK(out.at("rng") == rng_identifier);
    CHECK(out.contains("generated_at"));
    CHECK(out.at("rows").size() == cfg.power_grid_db.size() * 2);
    CHECK(out.at("rows")[0].contains("r_a"));
}

TEST_CASE("permutation precoders never lose a realization")
{
    SweepConfig cfg = small_config();
    cfg.dist = {0.0, 1.0};
    cfg.power_grid_db = power_grid(0.0, 30.0, 5.0);
    cfg.realizations = 60;
    const RaCurve curve = run_permutation_compare(cfg);
    for (const RaRow& row : curve.rows)
        if (row.scheme == "delta")
            CHECK(row.achievable >= 0);

    for (std::uint64_t n = 0; n < 60; ++n) {
        const ChannelPair ch = draw_channel(cfg, n);
        for (double p_db : {0.0, 15.0, 30.0}) {
            const CapacityResult cap = sum_capacity(ch, db_to_linear(p_db));
            if (scs_check(ch, cap).achievable)
                CHECK(scs_check(ch, cap, PrecoderStrategy::permutations).achievable);
        }
    }
}

TEST_CASE("fixed-channel table")
{
    const auto rows = run_table1(table1_channel(), {0.0, 8.0}, {}, true, true);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].scs->achievable);
    CHECK_FALSE(rows[1].scs->achievable);
    const RaCurve curve = table1_curve(rows);
    CHECK(curve.rows.size() == 4);
    const json details = table1_json(rows);
    CHECK(details[0].at("scs").at("precoder") == "cholesky");
    CHECK(details[0].at("pcs").contains("witness"));
}

TEST_CASE("write failures surface as io errors")
{
    try {
        write_text_file("/nonexistent/dir/out.csv", "x");
        FAIL("expected an io failure");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::io_failure);
    }
}

TEST_CASE("command line exit codes and outputs")
{
    const auto out = temp_path("sweep.csv");
    CHECK(run_cli("sweep --realizations 5 --power-grid 0:4:2 --seed 3 --out " + out.string()) == 0);
    const std::string csv = slurp(out);
    CHECK(strip_meta(csv).rfind("p_db,scheme,realizations,achievable,errors,r_a\n", 0) == 0);

    const auto again = temp_path("again.csv");
    CHECK(run_cli("sweep --realizations 5 --power-grid 0:4:2 --seed 3", again.string()) == 0);
    CHECK(strip_meta(slurp(again)) == strip_meta(csv));

    const auto js = temp_path("sweep.json");
    CHECK(run_cli("sweep --realizations 3 --power-grid 0 --scheme both --format json --entry-bound 1 --out " +
                  js.string()) == 0);
    const json parsed = json::parse(slurp(js));
    CHECK(parsed.contains("config"));
    CHECK(parsed.contains("rng"));
    CHECK(parsed.at("rows").size() == 2);

    CHECK(run_cli("table1 --power-grid 0:4:2 --scheme scs") == 0);
    CHECK(run_cli("check --p-db 0 --h1 \"1.3,1.2;1.3,1.8\" --h2 \"1.4,1.2;1.2,1.9\"") == 0);
    CHECK(run_cli("perm-compare --realizations 3 --power-grid 0:10:5") == 0);

    const auto bad_cfg = temp_path("bad.json");
    std::ofstream(bad_cfg) << R"({"realizations": -4})";
    CHECK(run_cli("sweep --config " + bad_cfg.string()) == 2);
    std::ofstream(bad_cfg) << "{not json";
    CHECK(run_cli("sweep --config " + bad_cfg.string()) == 2);
    CHECK(run_cli("sweep --format xml") == 2);
    CHECK(run_cli("sweep --entry-bound 9") == 2);
    CHECK(run_cli("check --p-db 0 --h1 \"1,2\" --h2 \"1,2;3,4\"") == 2);
    CHECK(run_cli("sweep --config /nonexistent/dir/c.json") == 3);
    CHECK(run_cli("sweep --realizations 2 --power-grid 0 --out /nonexistent/dir/out.csv") == 3);

    for (const auto& p : {out, again, js, bad_cfg})
        std::filesystem::remove(p);
}
