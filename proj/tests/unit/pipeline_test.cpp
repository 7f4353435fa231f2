#include "heavytails/config.hpp"
#include "heavytails/errors.hpp"
#include "heavytails/pipeline.hpp"

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace heavytails;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("heavytails_pipeline_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

PipelineConfig pareto_config(const fs::path& out) {
    auto c = parse_config(
        "[pipeline]\n"
        "dt = 1, 10\n"
        "seed = 5\n"
        "[asset PARETO]\n"
        "synth = pareto(alpha=3)\n"
        "ticks = 200001\n");
    c.out_dir = out;
    return c;
}

}  // namespace

TEST(Pipeline, SyntheticParetoThroughFullPipeline) {
    const auto out = scratch("pareto");
    const auto r = run_pipeline(pareto_config(out));
    EXPECT_TRUE(r.ok());
    EXPECT_EQ(r.exit_code(), 0);
    ASSERT_EQ(r.assets.size(), 1u);
    const auto& dt1 = r.assets[0].per_dt.at(0);
    EXPECT_EQ(dt1.dt_s, 1);
    EXPECT_EQ(dt1.n_returns, 200000u);
    const auto table = table_from(r.assets, {1, 10});
    ASSERT_EQ(table.rows.size(), 1u);
    ASSERT_TRUE(table.rows[0].alpha[0].has_value());
    EXPECT_NEAR(*table.rows[0].alpha[0], 3.0, 0.3);

    for (const char* f : {"manifest.json", "table.txt", "table.csv", "fits.csv", "ccdf/PARETO_dt1.txt"}) {
        EXPECT_TRUE(fs::exists(out / f)) << f;
    }
    const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
    EXPECT_EQ(manifest["config_hash"], pareto_config(out).hash());
    EXPECT_EQ(manifest["seed"], 5);
    EXPECT_TRUE(manifest["outputs"].contains("table.txt"));
    fs::remove_all(out);
}

TEST(Pipeline, ZeroAssetsRejected) {
    EXPECT_THROW(parse_config("[pipeline]\nseed = 1\n"), DomainError);
    PipelineConfig c;
    c.out_dir = scratch("none");
    EXPECT_THROW(run_pipeline(c), DomainError);
    EXPECT_FALSE(fs::exists(c.out_dir));
}

TEST(Pipeline, RerunIsByteIdentical) {
    auto c = parse_config(
        "[pipeline]\n"
        "dt = 1, 60\n"
        "seed = 11\n"
        "analyses = epps, index\n"
        "excise = 2018-01-01T01:00..2018-01-01T02:00\n"
        "[asset A]\nsynth = student_t(nu=3)\nticks = 20000\n"
        "[asset B]\nsynth = gaussian\nticks = 20000\n");
    const auto a = scratch("rerun_a");
    const auto b = scratch("rerun_b");
    c.out_dir = a;
    const auto ra = run_pipeline(c);
    c.out_dir = b;
    const auto rb = run_pipeline(c);
    ASSERT_EQ(ra.files, rb.files);
    EXPECT_GT(ra.files.size(), 8u);
    for (const auto& f : ra.files) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    std::size_t on_disk = 0;
    for (const auto& e : fs::recursive_directory_iterator(a)) on_disk += e.is_regular_file();
    EXPECT_EQ(on_disk, ra.files.size());
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Pipeline, SeedChangesSyntheticOutput) {
    auto c = pareto_config(scratch("seed_a"));
    const auto ra = run_pipeline(c);
    const auto first = slurp(c.out_dir / "table.csv");
    fs::remove_all(c.out_dir);
    c.seed = 6;
    run_pipeline(c);
    EXPECT_NE(slurp(c.out_dir / "table.csv"), first);
    fs::remove_all(c.out_dir);
}

TEST(Pipeline, AssetFailuresAreIsolated) {
    auto c = parse_config(
        "[pipeline]\ndt = 1\n"
        "[asset GOOD]\nsynth = student_t(nu=3)\nticks = 20000\n"
        "[asset MISSING]\npath = /nonexistent/ticks.csv\n");
    c.out_dir = scratch("isolated");
    const auto r = run_pipeline(c);
    EXPECT_EQ(r.exit_code(), 0);
    ASSERT_EQ(r.assets.size(), 2u);
    EXPECT_EQ(r.assets[0].id, "GOOD");
    EXPECT_TRUE(r.assets[0].error.empty());
    EXPECT_FALSE(r.assets[1].error.empty());
    EXPECT_FALSE(r.warnings.empty());
    const auto table = slurp(c.out_dir / "table.txt");
    EXPECT_NE(table.find("MISSING"), std::string::npos);
    EXPECT_NE(table.find("--"), std::string::npos);
    fs::remove_all(c.out_dir);
}

TEST(Pipeline, EmptyResultSetGivesNonzeroExit) {
    auto c = parse_config("[asset MISSING]\npath = /nonexistent/ticks.csv\n");
    c.out_dir = scratch("empty");
    const auto r = run_pipeline(c);
    EXPECT_FALSE(r.ok());
    EXPECT_NE(r.exit_code(), 0);
    fs::remove_all(c.out_dir);
}

TEST(Pipeline, FileAssetMatchesSyntheticSource) {
    const auto dir = scratch("file_asset");
    fs::create_directories(dir);
    {
        std::ofstream f(dir / "ticks.csv");
        f << "ts,price\n";
        double p = 100.0;
        for (int i = 0; i < 5000; ++i) {
            p *= (i % 3 == 0) ? 1.001 : (i % 3 == 1 ? 0.9995 : 1.0002 + 1e-6 * (i % 17));
            f << 1514764800000LL + i * 1000LL << ',' << p << '\n';
        }
    }
    auto c = parse_config("[pipeline]\ndt = 1\n[asset F]\npath = ticks.csv\nformat = ts,price;unit=ms\nprice = trade\n",
                          dir);
    c.out_dir = dir / "out";
    const auto r = run_pipeline(c);
    ASSERT_EQ(r.assets.size(), 1u);
    EXPECT_TRUE(r.assets[0].error.empty()) << r.assets[0].error;
    EXPECT_EQ(r.assets[0].n_ticks, 5000u);
    EXPECT_EQ(r.assets[0].per_dt[0].n_returns, 4999u);
    EXPECT_EQ(r.assets[0].input_hash.size(), 16u);
    fs::remove_all(dir);
}
