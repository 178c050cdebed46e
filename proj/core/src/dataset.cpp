#include "approxdt/dataset.hpp"

#include "approxdt/error.hpp"
#include "approxdt/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace approxdt {

namespace {

std::string trim(std::string_view s)
{
    auto const b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    auto const e = s.find_last_not_of(" \t\r");
    s = s.substr(b, e - b + 1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        s = s.substr(1, s.size() - 2);
    }
    return std::string{s};
}

std::vector<std::string> split_line(std::string const& line)
{
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        auto const comma = line.find(',', start);
        cells.push_back(trim(std::string_view{line}.substr(start, comma - start)));
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return cells;
}

std::optional<double> parse_real(std::string const& s)
{
    if (s.empty()) {
        return std::nullopt;
    }
    char const* first = s.data();
    if (*first == '+') {
        ++first;
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

std::optional<long> parse_integer(std::string const& s)
{
    if (s.empty()) {
        return std::nullopt;
    }
    long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        return std::nullopt;
    }
    return v;
}

} // namespace

Dataset::Dataset(std::vector<double> features, std::size_t feature_count, std::vector<int> labels,
                 std::size_t class_count)
    : features_(std::move(features)), cols_(feature_count), labels_(std::move(labels)), class_count_(class_count)
{
    if (cols_ == 0 || features_.size() != labels_.size() * cols_) {
        throw InputError("dataset: feature matrix does not match label count");
    }
    for (int y : labels_) {
        if (y < 0 || static_cast<std::size_t>(y) >= class_count_) {
            throw InputError("dataset: label " + std::to_string(y) + " outside 0.." +
                             std::to_string(class_count_ == 0 ? 0 : class_count_ - 1));
        }
    }
}

Dataset Dataset::subset(std::span<std::size_t const> indices) const
{
    std::vector<double> f;
    std::vector<int> y;
    f.reserve(indices.size() * cols_);
    y.reserve(indices.size());
    for (auto r : indices) {
        auto const src = row(r);
        f.insert(f.end(), src.begin(), src.end());
        y.push_back(labels_[r]);
    }
    Dataset out{std::move(f), cols_, std::move(y), class_count_};
    out.feature_names = feature_names;
    out.class_names = class_names;
    out.norm_stats = norm_stats;
    return out;
}

LabelColumn parse_label_column(std::string const& text)
{
    if (auto idx = parse_integer(text)) {
        return *idx;
    }
    return text;
}

Dataset load_csv(std::filesystem::path const& path, LabelColumn const& label_column)
{
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open dataset file '" + path.string() + "'");
    }

    std::vector<std::pair<std::size_t, std::vector<std::string>>> lines; // (line number, cells)
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        lines.emplace_back(line_no, split_line(line));
    }
    if (lines.empty()) {
        throw InputError(path.string() + ": file is empty");
    }

    auto const width = lines.front().second.size();
    if (width < 2) {
        throw InputError(path.string() + ": need at least one feature column and a label column");
    }

    std::size_t label_idx = 0;
    bool by_name = false;
    if (auto const* idx = std::get_if<long>(&label_column)) {
        long const resolved = *idx < 0 ? static_cast<long>(width) + *idx : *idx;
        if (resolved < 0 || resolved >= static_cast<long>(width)) {
            throw InputError(path.string() + ": label column index " + std::to_string(*idx) + " out of range for " +
                             std::to_string(width) + " columns");
        }
        label_idx = static_cast<std::size_t>(resolved);
    } else {
        auto const& name = std::get<std::string>(label_column);
        auto const& first = lines.front().second;
        auto it = std::find(first.begin(), first.end(), name);
        if (it == first.end()) {
            throw InputError(path.string() + ": label column '" + name + "' not found in header");
        }
        label_idx = static_cast<std::size_t>(it - first.begin());
        by_name = true;
    }

    bool has_header = by_name;
    if (!has_header) {
        auto const& first = lines.front().second;
        for (std::size_t c = 0; c < first.size(); ++c) {
            if (c != label_idx && !parse_real(first[c])) {
                has_header = true;
                break;
            }
        }
    }

    std::vector<std::string> names;
    std::size_t first_data = 0;
    if (has_header) {
        for (std::size_t c = 0; c < width; ++c) {
            if (c != label_idx) {
                names.push_back(lines.front().second[c]);
            }
        }
        first_data = 1;
    }
    if (first_data >= lines.size()) {
        throw InputError(path.string() + ": no data rows");
    }

    std::vector<double> features;
    std::vector<std::string> raw_labels;
    for (std::size_t i = first_data; i < lines.size(); ++i) {
        auto const& [ln, cells] = lines[i];
        if (cells.size() != width) {
            throw InputError(path.string() + ":" + std::to_string(ln) + ": expected " + std::to_string(width) +
                             " columns, found " + std::to_string(cells.size()));
        }
        for (std::size_t c = 0; c < width; ++c) {
            if (c == label_idx) {
                if (cells[c].empty()) {
                    throw InputError(path.string() + ":" + std::to_string(ln) + ": empty label");
                }
                raw_labels.push_back(cells[c]);
                continue;
            }
            auto v = parse_real(cells[c]);
            if (!v) {
                throw InputError(path.string() + ":" + std::to_string(ln) + ": column " + std::to_string(c) +
                                 ": non-numeric value '" + cells[c] + "'");
            }
            features.push_back(*v);
        }
    }

    // class id assignment
    std::vector<std::string> class_names;
    std::unordered_map<std::string, int> ids;
    bool all_int = std::all_of(raw_labels.begin(), raw_labels.end(),
                               [](auto const& s) { return parse_integer(s).has_value(); });
    if (all_int) {
        std::map<long, std::string> ordered;
        for (auto const& s : raw_labels) {
            ordered.emplace(*parse_integer(s), s);
        }
        for (auto const& [value, text] : ordered) {
            (void)value;
            ids.emplace(text, static_cast<int>(class_names.size()));
            class_names.push_back(text);
        }
        // "01" and "1" are the same class
        for (auto const& s : raw_labels) {
            if (!ids.contains(s)) {
                ids.emplace(s, ids.at(ordered.at(*parse_integer(s))));
            }
        }
    } else {
        for (auto const& s : raw_labels) {
            if (ids.emplace(s, static_cast<int>(class_names.size())).second) {
                class_names.push_back(s);
            }
        }
    }
    if (class_names.size() < 2) {
        throw InputError(path.string() + ": fewer than 2 classes");
    }

    std::vector<int> labels;
    labels.reserve(raw_labels.size());
    for (auto const& s : raw_labels) {
        labels.push_back(ids.at(s));
    }

    Dataset out{std::move(features), width - 1, std::move(labels), class_names.size()};
    if (names.empty()) {
        for (std::size_t c = 0; c + 1 < width; ++c) {
            names.push_back("f" + std::to_string(c));
        }
    }
    out.feature_names = std::move(names);
    out.class_names = std::move(class_names);
    return out;
}

Dataset normalize(Dataset const& data, std::optional<NormStats> const& stats)
{
    auto const cols = data.cols();
    NormStats s;
    bool const clamp = stats.has_value();
    if (stats) {
        if (stats->min.size() != cols || stats->max.size() != cols) {
            throw InputError("normalize: statistics cover " + std::to_string(stats->min.size()) +
                             " features, data has " + std::to_string(cols));
        }
        s = *stats;
    } else if (data.norm_stats) {
        // already normalized; the stored stats map [0,1] onto itself
        return data;
    } else {
        s.min.assign(cols, 0.0);
        s.max.assign(cols, 0.0);
        for (std::size_t c = 0; c < cols; ++c) {
            double lo = data.rows() ? data.at(0, c) : 0.0;
            double hi = lo;
            for (std::size_t r = 1; r < data.rows(); ++r) {
                lo = std::min(lo, data.at(r, c));
                hi = std::max(hi, data.at(r, c));
            }
            s.min[c] = lo;
            s.max[c] = hi;
        }
    }

    std::vector<double> f(data.features().begin(), data.features().end());
    for (std::size_t r = 0; r < data.rows(); ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            double& v = f[r * cols + c];
            double const range = s.max[c] - s.min[c];
            if (!(range > 0.0)) {
                v = 0.0;
                continue;
            }
            v = (v - s.min[c]) / range;
            if (clamp || v < 0.0 || v > 1.0) {
                v = std::clamp(v, 0.0, 1.0);
            }
        }
    }
    Dataset out{std::move(f), cols, std::vector<int>(data.labels().begin(), data.labels().end()), data.class_count()};
    out.feature_names = data.feature_names;
    out.class_names = data.class_names;
    out.norm_stats = std::move(s);
    return out;
}

std::size_t test_size(std::size_t rows, double test_fraction)
{
    auto n = static_cast<std::size_t>(std::floor(test_fraction * static_cast<double>(rows) + 0.5));
    return std::clamp<std::size_t>(n, 1, rows - 1);
}

SplitPair split(Dataset const& data, double test_fraction, std::uint64_t seed)
{
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw InputError("split: test fraction must lie in (0, 1)");
    }
    if (data.rows() < 2) {
        throw InputError("split: need at least 2 rows");
    }
    std::vector<std::size_t> order(data.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto rng = CounterRng{seed}.split("dataset.split");
    for (std::size_t i = order.size() - 1; i > 0; --i) {
        auto const j = static_cast<std::size_t>(rng.below(i + 1));
        std::swap(order[i], order[j]);
    }
    auto const n_test = test_size(data.rows(), test_fraction);

    SplitPair out;
    out.test_rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
    out.train_rows.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
    std::sort(out.test_rows.begin(), out.test_rows.end());
    std::sort(out.train_rows.begin(), out.train_rows.end());
    out.train = data.subset(out.train_rows);
    out.test = data.subset(out.test_rows);
    out.seed = seed;
    out.test_fraction = test_fraction;
    return out;
}

} // namespace approxdt
