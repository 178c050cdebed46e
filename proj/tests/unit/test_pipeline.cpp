#include "approxdt/cli/pipeline.hpp"
#include "approxdt/error.hpp"

#include "synthetic.hpp"
#include "temp_dir.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <sstream>

using namespace approxdt;
using namespace approxdt::cli;
namespace fs = std::filesystem;
using approxdt::testing::read_file;
using approxdt::testing::TempDir;

namespace {

std::string to_csv(Dataset const& d)
{
    std::ostringstream s;
    s.precision(17);
    s << "a,b,c,d,label\n";
    for (std::size_t r = 0; r < d.rows(); ++r) {
        for (std::size_t c = 0; c < d.cols(); ++c) {
            s << d.at(r, c) << ',';
        }
        s << "k" << d.label(r) << '\n';
    }
    return s.str();
}

RunConfig small_run(TempDir const& dir, std::string const& name = "run")
{
    RunConfig cfg;
    if (!fs::exists(dir.path() / "coarse.csv")) {
        dir.write("coarse.csv", to_csv(approxdt::testing::coarse_threshold_dataset(300, 4, 0.03)));
    }
    cfg.dataset = dir.path() / "coarse.csv";
    cfg.seed = 17;
    cfg.ga.population_size = 20;
    cfg.ga.generations = 8;
    cfg.out = dir.path() / name;
    return cfg;
}

SavedFront toy_front()
{
    SavedFront f;
    f.baseline = {Chromosome{}, {0.10, 100.0}};
    f.members = {{Chromosome{}, {0.08, 90.0}},
                 {Chromosome{}, {0.10, 40.0}},
                 {Chromosome{}, {0.105, 40.0}},
                 {Chromosome{}, {0.115, 10.0}},
                 {Chromosome{}, {0.30, 0.0}}};
    return f;
}

} // namespace

TEST(Pipeline, TrainOptimizeEmitReport)
{
    TempDir dir;
    auto cfg = small_run(dir);
    std::ostringstream log;
    auto tr = cmd_train(cfg, log);
    EXPECT_GT(tr.comparators, 0U);
    EXPECT_EQ(tr.test_rows, 90U);
    EXPECT_EQ(tr.train_rows, 210U);
    EXPECT_TRUE(fs::exists(cfg.out / "tree.json"));
    EXPECT_TRUE(fs::exists(cfg.out / "baseline.json"));

    auto opt = cmd_optimize(cfg, log);
    EXPECT_FALSE(opt.result.front.members.empty());
    for (auto name : {"pareto.json", "pareto.csv", "history.csv"}) {
        EXPECT_TRUE(fs::exists(cfg.out / name)) << name;
    }
    auto history = read_file(cfg.out / "history.csv");
    EXPECT_NE(history.find("generation,best_error,min_area,front_size,hypervolume"), std::string::npos);

    auto front = load_front(cfg.out / "pareto.json");
    EXPECT_EQ(front.members.size(), opt.result.front.members.size());
    EXPECT_EQ(front.unit, "GE");

    auto em = cmd_emit(cfg, log);
    EXPECT_EQ(em.checked_rows, 90U);
    auto v = read_file(em.verilog);
    EXPECT_NE(v.find("module approx_tree"), std::string::npos);
    EXPECT_TRUE(fs::exists(em.qtree_json));

    auto rows = cmd_report({cfg.out}, dir.path() / "report", "best-area-within 0.01", log);
    ASSERT_EQ(rows.size(), 1U);
    EXPECT_TRUE(fs::exists(dir.path() / "report" / "report.csv"));
    EXPECT_TRUE(fs::exists(dir.path() / "report" / "plot_run.csv"));
}

TEST(Pipeline, OutputsAreByteIdenticalAcrossRuns)
{
    TempDir dir;
    std::ostringstream log;
    std::vector<std::string> texts;
    for (auto name : {"a", "b"}) {
        auto cfg = small_run(dir, name);
        cmd_train(cfg, log);
        cmd_optimize(cfg, log);
        cmd_emit(cfg, log);
    }
    for (auto file : {"tree.json", "pareto.json", "pareto.csv", "history.csv", "approx_tree.v", "approx_tree.json"}) {
        EXPECT_EQ(read_file(dir.path() / "a" / file), read_file(dir.path() / "b" / file)) << file;
    }
    auto cfg = small_run(dir, "c");
    cfg.ga.threads = 3;
    cmd_train(cfg, log);
    cmd_optimize(cfg, log);
    EXPECT_EQ(read_file(dir.path() / "a" / "pareto.csv"), read_file(dir.path() / "c" / "pareto.csv"));
}

TEST(Pipeline, BaselineNormalizedAreaIsOneAndTwoRunsGiveTwoPlots)
{
    TempDir dir;
    std::ostringstream log;
    std::vector<fs::path> runs;
    for (auto name : {"r1", "r2"}) {
        auto cfg = small_run(dir, name);
        cfg.seed = name[1] == '1' ? 1 : 2;
        cmd_train(cfg, log);
        cmd_optimize(cfg, log);
        runs.push_back(cfg.out);
    }
    auto rows = cmd_report(runs, dir.path() / "rep", "0", log);
    ASSERT_EQ(rows.size(), 2U);
    EXPECT_TRUE(fs::exists(dir.path() / "rep" / "plot_r1.csv"));
    EXPECT_TRUE(fs::exists(dir.path() / "rep" / "plot_r2.csv"));
    auto pareto = nlohmann::json::parse(read_file(runs[0] / "pareto.json"));
    EXPECT_DOUBLE_EQ(pareto.at("baseline").at("normalized_area").get<double>(), 1.0);
    EXPECT_DOUBLE_EQ(normalized_area(0.0, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(normalized_area(5.0, 10.0), 0.5);
}

TEST(SelectMember, Rules)
{
    auto f = toy_front();
    EXPECT_EQ(select_member(f, "best-area-within 0.01"), 1U);
    EXPECT_EQ(select_member(f, "best-area-within 0"), 1U);
    EXPECT_EQ(select_member(f, "best-area-within 0.02"), 3U);
    EXPECT_EQ(select_member(f, "4"), 4U);
    EXPECT_THROW(select_member(f, "5"), InputError);
    EXPECT_THROW(select_member(f, "best-area-within x"), InputError);
    EXPECT_THROW(select_member(f, "worst"), InputError);
    // equal area and error: lower index
    f.members = {{Chromosome{}, {0.09, 50.0}}, {Chromosome{}, {0.105, 40.0}}, {Chromosome{}, {0.105, 40.0}}};
    EXPECT_EQ(select_member(f, "best-area-within 0.01"), 1U);
}

TEST(Pipeline, EmitMismatchWritesNothing)
{
    TempDir dir;
    auto cfg = small_run(dir);
    std::ostringstream log;
    cmd_train(cfg, log);
    cmd_optimize(cfg, log);
    auto broken = [](QuantizedTree const& q) {
        auto net = build_netlist(q);
        for (auto& s : net.selects) {
            s.class_label = (s.class_label + 1) % static_cast<std::int32_t>(net.class_count);
        }
        return net;
    };
    EXPECT_THROW(cmd_emit(cfg, log, broken), InternalError);
    EXPECT_FALSE(fs::exists(cfg.out / "approx_tree.v"));
    EXPECT_FALSE(fs::exists(cfg.out / "approx_tree.json"));
}

TEST(Pipeline, UserErrors)
{
    TempDir dir;
    std::ostringstream log;
    auto cfg = small_run(dir);
    cfg.dataset = dir.path() / "missing.csv";
    EXPECT_THROW(cmd_train(cfg, log), InputError);

    cfg = small_run(dir);
    // identical feature values leave no candidate split
    dir.write("flat.csv", "x,y\n0.5,a\n0.5,b\n0.5,a\n0.5,b\n0.5,a\n0.5,b\n");
    cfg.dataset = dir.path() / "flat.csv";
    try {
        cmd_train(cfg, log);
        ADD_FAILURE() << "expected an error";
    } catch (InputError const& e) {
        EXPECT_NE(std::string{e.what()}.find("no comparators"), std::string::npos) << e.what();
    }

    cfg = small_run(dir, "fresh");
    EXPECT_THROW(cmd_optimize(cfg, log), InputError); // no tree.json yet
    cfg.module_name = "9bad";
    cmd_train(cfg, log);
    cmd_optimize(cfg, log);
    EXPECT_THROW(cmd_emit(cfg, log), InputError);
    cfg.module_name = "approx_tree";
    cfg.select = "999";
    EXPECT_THROW(cmd_emit(cfg, log), InputError);
}

TEST(Pipeline, OptimizeRejectsDifferentData)
{
    TempDir dir;
    std::ostringstream log;
    auto cfg = small_run(dir);
    cmd_train(cfg, log);
    cfg.seed = 99;
    EXPECT_THROW(cmd_optimize(cfg, log), InputError);
}

TEST(RunConfig, HashIgnoresOutputSettings)
{
    RunConfig a;
    RunConfig b;
    b.out = "elsewhere";
    b.ga.threads = 8;
    b.module_name = "m";
    EXPECT_EQ(a.hash(), b.hash());
    b.seed = 1;
    EXPECT_NE(a.hash(), b.hash());
    EXPECT_EQ(a.hash().size(), 16U);
}

TEST(ChromosomeText, Format)
{
    EXPECT_EQ(chromosome_text(Chromosome{{Gene{3, -1}, Gene{8, 0}}}), "3:-1;8:0");
}

#ifdef APPROXDT_CLI_PATH
namespace {

int run_cli(std::string const& args)
{
    std::string cmd = std::string{"\""} + APPROXDT_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
    int const status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

} // namespace

TEST(CliBinary, ExitCodes)
{
    TempDir dir;
    auto cfg = small_run(dir);
    EXPECT_EQ(run_cli("train --dataset " + (dir.path() / "nope.csv").string()), 2);
    EXPECT_EQ(run_cli("frobnicate"), 2);
    EXPECT_EQ(run_cli("train --dataset " + cfg.dataset.string() + " --split 1.5"), 2);
    EXPECT_EQ(run_cli("--help"), 0);
    auto out = (dir.path() / "cli").string();
    EXPECT_EQ(run_cli("train --dataset " + cfg.dataset.string() + " --out " + out), 0);
    EXPECT_EQ(run_cli("optimize --dataset " + cfg.dataset.string() + " --out " + out + " --pop 8 --gens 2"), 0);
    EXPECT_EQ(run_cli("emit --dataset " + cfg.dataset.string() + " --out " + out), 0);
    EXPECT_TRUE(fs::exists(fs::path{out} / "approx_tree.v"));
    EXPECT_EQ(run_cli("report " + out + " --out " + (dir.path() / "rep").string()), 0);
}
#endif
