#include "approxdt/cli/pipeline.hpp"

#include "approxdt/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#ifndef APPROXDT_VERSION
#define APPROXDT_VERSION "0.0.0"
#endif

namespace approxdt::cli {

namespace {

using nlohmann::json;

std::string real(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

json provenance(RunConfig const& cfg)
{
    return {{"tool", "approxdt"}, {"version", APPROXDT_VERSION}, {"config_hash", cfg.hash()}, {"seed", cfg.seed}};
}

std::string provenance_comment(RunConfig const& cfg, std::string_view prefix)
{
    std::ostringstream s;
    s << prefix << " approxdt " << APPROXDT_VERSION << " config " << cfg.hash() << " seed " << cfg.seed << '\n';
    return s.str();
}

void write_file(std::filesystem::path const& path, std::string const& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot write '" + path.string() + "'");
    }
    out << text;
    if (!out) {
        throw InputError("failed writing '" + path.string() + "'");
    }
}

json read_json(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open '" + path.string() + "'");
    }
    try {
        return json::parse(in);
    } catch (json::exception const& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

void ensure_dir(std::filesystem::path const& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw InputError("cannot create output directory '" + dir.string() + "': " + ec.message());
    }
}

json data_identity(RunConfig const& cfg)
{
    std::error_code ec;
    auto path = std::filesystem::weakly_canonical(cfg.dataset, ec);
    if (ec) {
        path = cfg.dataset;
    }
    return {{"dataset", path.string()}, {"label_col", cfg.label_col}, {"split", cfg.split}, {"seed", cfg.seed}};
}

EvalContext make_context(RunConfig const& cfg, DecisionTree tree, Dataset test)
{
    EvalContext ctx;
    ctx.tree = std::move(tree);
    ctx.test = std::move(test);
    ctx.model = make_area_model(cfg);
    ctx.bounds = cfg.ga.bounds;
    ctx.cache = std::make_shared<ObjectiveCache>();
    return ctx;
}

json entry_json(FrontEntry const& e, double baseline_area)
{
    return {{"chromosome", chromosome_to_json(e.chrom)},
            {"error", e.obj.error},
            {"accuracy", 1.0 - e.obj.error},
            {"area", e.obj.area},
            {"normalized_area", normalized_area(e.obj.area, baseline_area)}};
}

FrontEntry entry_from_json(json const& j)
{
    return {chromosome_from_json(j.at("chromosome")), {j.at("error").get<double>(), j.at("area").get<double>()}};
}

DecisionTree load_tree(RunConfig const& cfg)
{
    auto const path = cfg.out / "tree.json";
    if (!std::filesystem::exists(path)) {
        throw InputError("'" + path.string() + "' not found; run 'train' first");
    }
    return import_json(path);
}

// tree.json from `train` records the data it was fit on; refuse a different split
void check_data_identity(RunConfig const& cfg)
{
    auto const path = cfg.out / "baseline.json";
    if (!std::filesystem::exists(path)) {
        return;
    }
    auto const saved = read_json(path);
    if (saved.contains("data") && saved.at("data") != data_identity(cfg)) {
        throw InputError("dataset/split settings differ from those used by 'train' (see " + path.string() + ")");
    }
}

} // namespace

std::string RunConfig::canonical() const
{
    std::ostringstream s;
    s << "dataset=" << dataset.string() << '\n'
      << "label_col=" << label_col << '\n'
      << "split=" << real(split) << '\n'
      << "seed=" << seed << '\n'
      << "max_depth=" << (tree.max_depth ? std::to_string(*tree.max_depth) : "none") << '\n'
      << "min_samples_split=" << tree.min_samples_split << '\n'
      << "pop=" << ga.population_size << '\n'
      << "gens=" << ga.generations << '\n'
      << "eta_c=" << real(ga.eta_c) << '\n'
      << "eta_m=" << real(ga.eta_m) << '\n'
      << "pc=" << real(ga.crossover_prob) << '\n'
      << "pm=" << (ga.mutation_prob ? real(*ga.mutation_prob) : "auto") << '\n'
      << "pmin=" << ga.bounds.p_min << '\n'
      << "pmax=" << ga.bounds.p_max << '\n'
      << "margin=" << ga.bounds.margin << '\n'
      << "area_model=" << area_model << '\n';
    if (area_model == "lut") {
        s << "lut=" << lut.string() << '\n';
    } else {
        s << "weights=" << real(weights.inv) << ',' << real(weights.and2) << ',' << real(weights.or2) << '\n';
    }
    return s.str();
}

std::string RunConfig::hash() const
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : canonical()) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

SplitPair prepare_data(RunConfig const& cfg)
{
    if (cfg.dataset.empty()) {
        throw InputError("no dataset given (--dataset)");
    }
    if (!std::filesystem::exists(cfg.dataset)) {
        throw InputError("dataset file '" + cfg.dataset.string() + "' does not exist");
    }
    auto const raw = load_csv(cfg.dataset, parse_label_column(cfg.label_col));
    auto parts = split(raw, cfg.split, cfg.seed);
    parts.train = normalize(parts.train);
    parts.test = normalize(parts.test, parts.train.norm_stats);
    return parts;
}

AreaModel make_area_model(RunConfig const& cfg)
{
    if (cfg.area_model == "analytical") {
        cfg.weights.validate();
        return AnalyticalModel{cfg.weights};
    }
    if (cfg.area_model == "lut") {
        if (cfg.lut.empty()) {
            throw InputError("--area-model lut requires --lut <path>");
        }
        return lut_load(cfg.lut);
    }
    throw InputError("unknown area model '" + cfg.area_model + "' (expected analytical or lut)");
}

std::string chromosome_text(Chromosome const& c)
{
    std::string s;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) {
            s += ';';
        }
        s += std::to_string(c.genes[i].precision) + ':' + std::to_string(c.genes[i].delta);
    }
    return s;
}

double normalized_area(double area, double baseline_area) noexcept
{
    if (baseline_area > 0.0) {
        return area / baseline_area;
    }
    return area > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
}

TrainReport cmd_train(RunConfig const& cfg, std::ostream& log)
{
    cfg.ga.bounds.validate();
    auto const data = prepare_data(cfg);
    auto const tree = train_cart(data.train, cfg.tree);
    if (tree.comparator_count() == 0) {
        throw InputError("tree has no comparators (training labels are pure)");
    }
    auto const model = make_area_model(cfg);

    TrainReport r;
    r.comparators = tree.comparator_count();
    r.train_rows = data.train.rows();
    r.test_rows = data.test.rows();
    r.train_accuracy = accuracy(tree, data.train);
    r.test_accuracy = accuracy(tree, data.test);
    auto const qt = apply_chromosome(tree, baseline_chromosome(tree, cfg.ga.bounds), cfg.ga.bounds);
    r.baseline_accuracy = quantized_accuracy(qt, data.test);
    r.baseline_area = tree_area(qt, model);
    r.unit = area_unit(model);

    ensure_dir(cfg.out);
    auto tree_json = tree_to_json(tree);
    tree_json["provenance"] = provenance(cfg);
    write_file(cfg.out / "tree.json", tree_json.dump(2) + "\n");

    json baseline = {{"provenance", provenance(cfg)},
                     {"data", data_identity(cfg)},
                     {"comparators", r.comparators},
                     {"train_rows", r.train_rows},
                     {"test_rows", r.test_rows},
                     {"train_accuracy", r.train_accuracy},
                     {"test_accuracy", r.test_accuracy},
                     {"baseline_precision", cfg.ga.bounds.p_max},
                     {"baseline_quantized_accuracy", r.baseline_accuracy},
                     {"baseline_area", r.baseline_area},
                     {"area_unit", r.unit}};
    write_file(cfg.out / "baseline.json", baseline.dump(2) + "\n");

    log << "dataset            " << cfg.dataset.string() << " (" << r.train_rows << " train / " << r.test_rows
        << " test rows)\n"
        << "comparators        " << r.comparators << '\n'
        << "train accuracy     " << real(r.train_accuracy) << '\n'
        << "test accuracy      " << real(r.test_accuracy) << '\n'
        << "baseline (" << cfg.ga.bounds.p_max << "-bit)   accuracy " << real(r.baseline_accuracy) << ", area "
        << real(r.baseline_area) << ' ' << r.unit << '\n'
        << "wrote " << (cfg.out / "tree.json").string() << '\n';
    return r;
}

OptimizeReport cmd_optimize(RunConfig const& cfg, std::ostream& log)
{
    cfg.ga.validate();
    check_data_identity(cfg);
    auto tree = load_tree(cfg);
    auto data = prepare_data(cfg);
    auto const ctx = make_context(cfg, std::move(tree), std::move(data.test));

    GaConfig ga = cfg.ga;
    ga.seed = cfg.seed;
    OptimizeReport rep;
    rep.result = evolve(ctx, ga);
    rep.baseline = rep.result.baseline;
    auto const& res = rep.result;
    auto const unit = area_unit(ctx.model);
    auto const base_chrom = baseline_chromosome(ctx.tree, cfg.ga.bounds);

    ensure_dir(cfg.out);
    json members = json::array();
    std::ostringstream csv;
    csv << provenance_comment(cfg, "#");
    csv << "# baseline error " << real(res.baseline.error) << " area " << real(res.baseline.area) << ' ' << unit << '\n';
    csv << "index,error,accuracy,area,normalized_area,chromosome\n";
    for (std::size_t i = 0; i < res.front.members.size(); ++i) {
        auto const& m = res.front.members[i];
        auto j = entry_json({m.chrom, m.obj}, res.baseline.area);
        j["index"] = i;
        members.push_back(std::move(j));
        csv << i << ',' << real(m.obj.error) << ',' << real(1.0 - m.obj.error) << ',' << real(m.obj.area) << ','
            << real(normalized_area(m.obj.area, res.baseline.area)) << ',' << chromosome_text(m.chrom) << '\n';
    }
    json pareto = {{"provenance", provenance(cfg)},
                   {"dataset", cfg.dataset.stem().string()},
                   {"area_unit", unit},
                   {"generations", res.front.generations},
                   {"population", cfg.ga.population_size},
                   {"baseline", entry_json({base_chrom, res.baseline}, res.baseline.area)},
                   {"members", std::move(members)}};
    write_file(cfg.out / "pareto.json", pareto.dump(2) + "\n");
    write_file(cfg.out / "pareto.csv", csv.str());

    std::ostringstream hist;
    hist << provenance_comment(cfg, "#");
    hist << "generation,best_error,min_area,front_size,hypervolume\n";
    for (auto const& g : res.history) {
        hist << g.generation << ',' << real(g.best_error) << ',' << real(g.min_area) << ',' << g.front_size << ','
             << real(g.hypervolume) << '\n';
    }
    write_file(cfg.out / "history.csv", hist.str());

    log << "seed " << cfg.seed << ", " << cfg.ga.population_size << " x " << cfg.ga.generations << " generations\n"
        << "baseline: accuracy " << real(1.0 - res.baseline.error) << ", area " << real(res.baseline.area) << ' '
        << unit << '\n'
        << "front: " << res.front.members.size() << " members\n";

    auto saved = load_front(cfg.out / "pareto.json");
    try {
        auto const pick = select_member(saved, "best-area-within 0.01");
        auto const& m = saved.members[pick];
        log << "within 1% accuracy loss: member " << pick << ", accuracy " << real(1.0 - m.obj.error) << ", area "
            << real(m.obj.area) << ", normalized area " << real(normalized_area(m.obj.area, saved.baseline.obj.area))
            << '\n';
    } catch (InputError const&) {
        log << "no member within 1% accuracy loss\n";
    }
    log << "wrote " << (cfg.out / "pareto.csv").string() << ", " << (cfg.out / "history.csv").string() << '\n';
    return rep;
}

SavedFront load_front(std::filesystem::path const& pareto_json)
{
    auto const j = read_json(pareto_json);
    try {
        SavedFront f;
        f.dataset = j.at("dataset").get<std::string>();
        f.unit = j.at("area_unit").get<std::string>();
        f.baseline = entry_from_json(j.at("baseline"));
        for (auto const& m : j.at("members")) {
            f.members.push_back(entry_from_json(m));
        }
        return f;
    } catch (json::exception const& e) {
        throw InputError(pareto_json.string() + ": " + e.what());
    }
}

std::size_t select_member(SavedFront const& front, std::string const& selector)
{
    std::istringstream in(selector);
    std::string word;
    in >> word;
    if (word == "best-area-within") {
        double loss = -1.0;
        if (!(in >> loss) || loss < 0.0) {
            throw InputError("selector '" + selector + "': expected a non-negative loss");
        }
        double const limit = front.baseline.obj.error + loss;
        std::optional<std::size_t> best;
        for (std::size_t i = 0; i < front.members.size(); ++i) {
            auto const& o = front.members[i].obj;
            // 1e-12 absorbs the rounding in baseline + loss
            if (o.error > limit + 1e-12) {
                continue;
            }
            if (!best) {
                best = i;
                continue;
            }
            auto const& b = front.members[*best].obj;
            if (o.area < b.area || (o.area == b.area && o.error < b.error)) {
                best = i;
            }
        }
        if (!best) {
            throw InputError("selector '" + selector + "' matches no front member");
        }
        return *best;
    }
    std::size_t idx = 0;
    std::size_t used = 0;
    try {
        idx = std::stoul(selector, &used);
    } catch (std::exception const&) {
        used = 0;
    }
    if (used == 0 || used != selector.size() || selector.front() == '-') {
        throw InputError("selector '" + selector + "': expected an index or 'best-area-within <loss>'");
    }
    if (idx >= front.members.size()) {
        throw InputError("selector index " + std::to_string(idx) + " out of range (front has " +
                         std::to_string(front.members.size()) + " members)");
    }
    return idx;
}

EmitReport cmd_emit(RunConfig const& cfg, std::ostream& log, NetlistBuilder const& builder)
{
    if (!is_verilog_identifier(cfg.module_name)) {
        throw InputError("'" + cfg.module_name + "' is not a valid Verilog identifier");
    }
    check_data_identity(cfg);
    auto const tree = load_tree(cfg);
    auto const pareto_path = cfg.out / "pareto.json";
    if (!std::filesystem::exists(pareto_path)) {
        throw InputError("'" + pareto_path.string() + "' not found; run 'optimize' first");
    }
    auto const front = load_front(pareto_path);
    auto const pick = select_member(front, cfg.select);
    auto const& member = front.members[pick];
    auto const qtree = apply_chromosome(tree, member.chrom, cfg.ga.bounds);
    auto const net = builder(qtree);

    auto const data = prepare_data(cfg);
    std::size_t mismatches = 0;
    for (std::size_t r = 0; r < data.test.rows(); ++r) {
        if (eval_netlist(net, data.test.row(r)) != predict_quantized(qtree, data.test.row(r))) {
            ++mismatches;
        }
    }
    if (mismatches != 0) {
        throw InternalError("netlist disagrees with quantized inference on " + std::to_string(mismatches) + " of " +
                            std::to_string(data.test.rows()) + " test rows; nothing written");
    }

    ensure_dir(cfg.out);
    EmitReport rep;
    rep.member = pick;
    rep.checked_rows = data.test.rows();
    rep.verilog = cfg.out / (cfg.module_name + ".v");
    rep.qtree_json = cfg.out / (cfg.module_name + ".json");

    std::string text = provenance_comment(cfg, "//");
    text += "// member " + std::to_string(pick) + ": error " + real(member.obj.error) + ", area " +
            real(member.obj.area) + " " + front.unit + "\n";
    text += emit_verilog(net, cfg.module_name);
    write_file(rep.verilog, text);

    auto qj = quantized_tree_to_json(qtree);
    qj["provenance"] = provenance(cfg);
    qj["member"] = pick;
    write_file(rep.qtree_json, qj.dump(2) + "\n");

    log << "member " << pick << " (accuracy " << real(1.0 - member.obj.error) << ", area " << real(member.obj.area)
        << ' ' << front.unit << ")\n"
        << "netlist matches quantized inference on " << rep.checked_rows << " test rows\n"
        << "wrote " << rep.verilog.string() << '\n';
    return rep;
}

std::vector<ReportRow> cmd_report(std::vector<std::filesystem::path> const& runs, std::filesystem::path const& out,
                                  std::string const& selector, std::ostream& log)
{
    if (runs.empty()) {
        throw InputError("no runs given");
    }
    std::vector<ReportRow> rows;
    std::map<std::string, int> name_uses;
    ensure_dir(out);
    for (auto const& dir : runs) {
        auto const path = dir / "pareto.json";
        if (!std::filesystem::exists(path)) {
            throw InputError("no completed run in '" + dir.string() + "' (pareto.json missing)");
        }
        auto const front = load_front(path);
        auto const pick = select_member(front, selector);
        auto const& m = front.members[pick];
        auto const base_area = front.baseline.obj.area;

        ReportRow row;
        auto name = std::filesystem::absolute(dir).lexically_normal().filename().string();
        if (name.empty()) {
            name = std::filesystem::absolute(dir).lexically_normal().parent_path().filename().string();
        }
        if (int const n = name_uses[name]++; n > 0) {
            name += "_" + std::to_string(n);
        }
        row.run = name;
        row.dataset = front.dataset;
        row.baseline_accuracy = 1.0 - front.baseline.obj.error;
        row.baseline_area = base_area;
        row.accuracy = 1.0 - m.obj.error;
        row.area = m.obj.area;
        row.normalized_area = normalized_area(m.obj.area, base_area);
        row.member = pick;
        rows.push_back(row);

        std::ostringstream plot;
        plot << "# " << front.dataset << " baseline accuracy " << real(row.baseline_accuracy) << '\n';
        plot << "accuracy,normalized_area\n";
        for (auto const& e : front.members) {
            plot << real(1.0 - e.obj.error) << ',' << real(normalized_area(e.obj.area, base_area)) << '\n';
        }
        write_file(out / ("plot_" + name + ".csv"), plot.str());
    }

    std::ostringstream table;
    table << "run,dataset,baseline_accuracy,baseline_area,accuracy,area,normalized_area,member\n";
    for (auto const& r : rows) {
        table << r.run << ',' << r.dataset << ',' << real(r.baseline_accuracy) << ',' << real(r.baseline_area) << ','
              << real(r.accuracy) << ',' << real(r.area) << ',' << real(r.normalized_area) << ',' << r.member << '\n';
    }
    write_file(out / "report.csv", table.str());

    char line[200];
    std::snprintf(line, sizeof line, "%-16s %-14s %9s %10s %9s %10s %10s\n", "run", "dataset", "base acc", "base area",
                  "accuracy", "area", "norm. area");
    log << line;
    for (auto const& r : rows) {
        std::snprintf(line, sizeof line, "%-16s %-14s %9.3f %10.2f %9.3f %10.2f %10.3f\n", r.run.c_str(),
                      r.dataset.c_str(), r.baseline_accuracy, r.baseline_area, r.accuracy, r.area, r.normalized_area);
        log << line;
    }
    log << "wrote " << (out / "report.csv").string() << '\n';
    return rows;
}

} // namespace approxdt::cli
