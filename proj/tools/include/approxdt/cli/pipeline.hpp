#pragma once

#include "approxdt/area_model.hpp"
#include "approxdt/dataset.hpp"
#include "approxdt/dtree.hpp"
#include "approxdt/moo.hpp"
#include "approxdt/rtl.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace approxdt::cli {

struct RunConfig {
    std::filesystem::path dataset;
    std::string label_col = "-1";
    double split = 0.3;
    std::uint64_t seed = 0;
    CartConfig tree;
    GaConfig ga;
    std::string area_model = "analytical"; // or "lut"
    GateWeights weights;
    std::filesystem::path lut;
    std::filesystem::path out = "run";
    std::string select = "best-area-within 0.01";
    std::string module_name = "approx_tree";

    /// Settings that determine results, one `key=value` per line. Output
    /// location, thread count and emit-only settings are left out.
    [[nodiscard]] std::string canonical() const;
    /// 16 hex digits of FNV-1a over canonical().
    [[nodiscard]] std::string hash() const;
};

/// Normalized train/test split of the configured dataset; test rows are
/// scaled with the training statistics.
SplitPair prepare_data(RunConfig const& cfg);

AreaModel make_area_model(RunConfig const& cfg);

/// Chromosome text form "p:d;p:d;...".
std::string chromosome_text(Chromosome const& c);

struct TrainReport {
    std::size_t comparators = 0;
    std::size_t train_rows = 0;
    std::size_t test_rows = 0;
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
    double baseline_accuracy = 0.0; // quantized, p = pmax, d = 0
    double baseline_area = 0.0;
    std::string unit;
};

/// Trains the exact tree; writes tree.json and baseline.json into cfg.out.
TrainReport cmd_train(RunConfig const& cfg, std::ostream& log);

struct OptimizeReport {
    EvolveResult result;
    Objectives baseline;
};

/// Runs the GA on tree.json; writes pareto.json, pareto.csv, history.csv.
OptimizeReport cmd_optimize(RunConfig const& cfg, std::ostream& log);

/// A member of a saved front.
struct FrontEntry {
    Chromosome chrom;
    Objectives obj;
};

struct SavedFront {
    std::string dataset;
    std::string unit;
    FrontEntry baseline;
    std::vector<FrontEntry> members;
};

SavedFront load_front(std::filesystem::path const& pareto_json);

/// `<index>` or `best-area-within <loss>`: least area among members with
/// error <= baseline error + loss (ties: lower error, then lower index).
std::size_t select_member(SavedFront const& front, std::string const& selector);

using NetlistBuilder = std::function<Netlist(QuantizedTree const&)>;

struct EmitReport {
    std::size_t member = 0;
    std::filesystem::path verilog;
    std::filesystem::path qtree_json;
    std::size_t checked_rows = 0;
};

/// Writes <module>.v and <module>.json for the selected member after checking
/// eval_netlist against predict_quantized on every test row. A mismatch
/// throws InternalError and nothing is written.
EmitReport cmd_emit(RunConfig const& cfg, std::ostream& log, NetlistBuilder const& builder = build_netlist);

struct ReportRow {
    std::string run;
    std::string dataset;
    double baseline_accuracy = 0.0;
    double baseline_area = 0.0;
    double accuracy = 0.0;
    double area = 0.0;
    double normalized_area = 0.0;
    std::size_t member = 0;
};

/// Summary table over completed runs plus one plot_<run>.csv (accuracy,
/// normalized area) per run, written to `out`.
std::vector<ReportRow> cmd_report(std::vector<std::filesystem::path> const& runs, std::filesystem::path const& out,
                                  std::string const& selector, std::ostream& log);

/// area / baseline area; 1 when both are zero.
double normalized_area(double area, double baseline_area) noexcept;

} // namespace approxdt::cli
