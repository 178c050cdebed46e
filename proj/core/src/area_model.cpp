#include "approxdt/area_model.hpp"

#include "approxdt/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

namespace approxdt {

void GateWeights::validate() const
{
    for (double v : {inv, and2, or2}) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw InputError("gate weights must be positive and finite");
        }
    }
}

double analytical_area(int precision, std::uint32_t threshold, GateWeights const& w)
{
    if (precision < 1 || precision > 30) {
        throw InputError("analytical_area: precision " + std::to_string(precision) + " out of range");
    }
    if (threshold > (std::uint32_t{1} << precision) - 1U) {
        throw InputError("analytical_area: threshold " + std::to_string(threshold) + " does not fit in " +
                         std::to_string(precision) + " bits");
    }
    enum class Signal { False, Wire, Gate };
    Signal gt = Signal::False;
    double area = 0.0;
    for (int bit = 0; bit < precision; ++bit) {
        bool const one = ((threshold >> bit) & 1U) != 0;
        if (gt == Signal::False) {
            // false AND x = false; false OR x = x
            gt = one ? Signal::False : Signal::Wire;
            continue;
        }
        area += one ? w.and2 : w.or2;
        gt = Signal::Gate;
    }
    if (gt != Signal::False) {
        area += w.inv;
    }
    return area;
}

AreaLut::AreaLut(std::map<std::pair<int, std::uint32_t>, double> table, std::string unit)
    : table_(std::move(table)), unit_(std::move(unit))
{
    if (table_.empty()) {
        throw InputError("area LUT is empty");
    }
    p_lo_ = table_.begin()->first.first;
    p_hi_ = table_.rbegin()->first.first;
    if (p_lo_ < 1 || p_hi_ > 30) {
        throw InputError("area LUT: precision outside 1..30");
    }
    for (auto const& [key, area] : table_) {
        if (!std::isfinite(area) || area < 0.0) {
            throw InputError("area LUT: entry (" + std::to_string(key.first) + "," + std::to_string(key.second) +
                             ") has invalid area " + std::to_string(area));
        }
        if (key.second > (std::uint32_t{1} << key.first) - 1U) {
            throw InputError("area LUT: threshold " + std::to_string(key.second) + " does not fit in " +
                             std::to_string(key.first) + " bits");
        }
    }
    for (int p = p_lo_; p <= p_hi_; ++p) {
        for (std::uint32_t t = 0; t <= (std::uint32_t{1} << p) - 1U; ++t) {
            if (!table_.contains({p, t})) {
                throw InputError("area LUT: missing entry (" + std::to_string(p) + "," + std::to_string(t) + ")");
            }
        }
    }
}

double AreaLut::at(int precision, std::uint32_t threshold) const
{
    auto it = table_.find({precision, threshold});
    if (it == table_.end()) {
        throw InputError("area LUT has no entry for (" + std::to_string(precision) + "," + std::to_string(threshold) +
                         ")");
    }
    return it->second;
}

namespace {

std::string strip(std::string s)
{
    auto const b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

template <typename T>
T parse_field(std::string const& cell, std::string const& where)
{
    T v{};
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw InputError(where + ": cannot parse '" + cell + "'");
    }
    return v;
}

} // namespace

AreaLut lut_load(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open area LUT '" + path.string() + "'");
    }
    std::string unit;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::map<std::pair<int, std::uint32_t>, double> table;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip(line);
        if (line.empty()) {
            continue;
        }
        std::string const where = path.string() + ":" + std::to_string(line_no);
        if (line.front() == '#') {
            auto const pos = line.find("unit:");
            if (pos != std::string::npos) {
                unit = strip(line.substr(pos + 5));
            }
            continue;
        }
        if (!header_seen) {
            std::string compact;
            for (char c : line) {
                if (c != ' ' && c != '\t') {
                    compact.push_back(c);
                }
            }
            if (compact != "precision,threshold,area") {
                throw InputError(where + ": expected header 'precision,threshold,area'");
            }
            header_seen = true;
            continue;
        }
        auto const c1 = line.find(',');
        auto const c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos) {
            throw InputError(where + ": expected 3 columns");
        }
        auto const p = parse_field<int>(strip(line.substr(0, c1)), where);
        auto const t = parse_field<long long>(strip(line.substr(c1 + 1, c2 - c1 - 1)), where);
        auto const a = parse_field<double>(strip(line.substr(c2 + 1)), where);
        if (p < 1 || p > 30 || t < 0) {
            throw InputError(where + ": invalid (precision, threshold)");
        }
        if (!table.emplace(std::pair{p, static_cast<std::uint32_t>(t)}, a).second) {
            throw InputError(where + ": duplicate entry (" + std::to_string(p) + "," + std::to_string(t) + ")");
        }
    }
    if (!header_seen) {
        throw InputError(path.string() + ": missing header 'precision,threshold,area'");
    }
    return AreaLut{std::move(table), unit.empty() ? "units" : unit};
}

double comparator_area(AreaModel const& model, int precision, std::uint32_t threshold)
{
    if (auto const* a = std::get_if<AnalyticalModel>(&model)) {
        return analytical_area(precision, threshold, a->weights);
    }
    return std::get<AreaLut>(model).at(precision, threshold);
}

double tree_area(QuantizedTree const& qtree, AreaModel const& model)
{
    double total = 0.0;
    for (auto const& c : qtree.comparators()) {
        total += comparator_area(model, c.precision, c.int_threshold);
    }
    return total;
}

std::string area_unit(AreaModel const& model)
{
    if (std::holds_alternative<AnalyticalModel>(model)) {
        return "GE";
    }
    return std::get<AreaLut>(model).unit();
}

} // namespace approxdt
