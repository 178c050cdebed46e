#pragma once

#include "approxdt/quantizer.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <variant>

namespace approxdt {

/// Gate-equivalent unit costs of the analytical comparator model.
struct GateWeights {
    double inv = 1.0;
    double and2 = 2.0;
    double or2 = 2.0;

    void validate() const;
};

/// Area of the constant-propagated circuit for `X <= T` on an unsigned
/// p-bit input.
///
/// Built LSB to MSB as gt_{i+1} = x_i AND gt_i (T_i = 1) or x_i OR gt_i
/// (T_i = 0) from gt_0 = false, then inverted. AND with constant false folds
/// to false, OR with false folds to a wire, and the inverter vanishes when
/// gt_p is constant.
double analytical_area(int precision, std::uint32_t threshold, GateWeights const& w = {});

/// Measured comparator areas keyed by (precision, integer threshold).
class AreaLut {
public:
    AreaLut() = default;
    /// Checks completeness over [min p, max p] and that areas are finite and >= 0.
    AreaLut(std::map<std::pair<int, std::uint32_t>, double> table, std::string unit);

    [[nodiscard]] double at(int precision, std::uint32_t threshold) const;
    [[nodiscard]] std::size_t size() const noexcept { return table_.size(); }
    [[nodiscard]] int min_precision() const noexcept { return p_lo_; }
    [[nodiscard]] int max_precision() const noexcept { return p_hi_; }
    [[nodiscard]] std::string const& unit() const noexcept { return unit_; }

private:
    std::map<std::pair<int, std::uint32_t>, double> table_;
    std::string unit_;
    int p_lo_ = 0;
    int p_hi_ = -1;
};

/// CSV with header "precision,threshold,area" and an optional leading
/// "# unit: <label>" line.
AreaLut lut_load(std::filesystem::path const& path);

struct AnalyticalModel {
    GateWeights weights;
};

using AreaModel = std::variant<AnalyticalModel, AreaLut>;

double comparator_area(AreaModel const& model, int precision, std::uint32_t threshold);

/// Sum of comparator areas. Leaf decoding logic is not counted.
double tree_area(QuantizedTree const& qtree, AreaModel const& model);

std::string area_unit(AreaModel const& model);

} // namespace approxdt
