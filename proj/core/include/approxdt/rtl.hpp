#pragma once

#include "approxdt/quantizer.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace approxdt {

/// One input port per feature read by the tree.
struct InputBus {
    std::int32_t feature = 0;
    std::int32_t width = 0; // max precision of the comparators reading it
};

/// cmp = bus[width-1 : width-precision] <= threshold
struct NetComparator {
    NodeId node = 0;
    std::int32_t feature = 0;
    std::int32_t precision = 0;
    std::uint32_t threshold = 0;
    std::size_t bus = 0; // index into Netlist::inputs
};

struct Literal {
    std::size_t comparator = 0; // index into Netlist::comparators
    bool positive = true;       // true: cmp, false: ~cmp
};

/// AND of the comparator literals on the root-to-leaf path.
struct LeafSelect {
    NodeId leaf = 0;
    std::int32_t class_label = 0;
    std::vector<Literal> literals;
};

/// Combinational one-hot decision network: comparators feed one select term
/// per leaf, and class_out is the OR of (select AND class code).
struct Netlist {
    std::vector<InputBus> inputs;          // ascending feature
    std::vector<NetComparator> comparators; // ascending node id
    std::vector<LeafSelect> selects;        // ascending leaf node id
    std::int32_t output_width = 1;
    std::size_t class_count = 0;
    std::size_t min_sample_size = 0; // 1 + largest feature index read
};

Netlist build_netlist(QuantizedTree const& qtree);

/// Value of every select term for a sample; exactly one should be true.
std::vector<bool> eval_selects(Netlist const& net, std::span<double const> sample);

/// Quantizes each feature to its bus width (floor rule), evaluates the
/// network and decodes class_out.
int eval_netlist(Netlist const& net, std::span<double const> sample);

/// Synthesizable combinational Verilog module. Ports f<feature> and
/// class_out; wires cmp_<node id> and sel_<leaf id>. Output is a pure
/// function of the netlist.
std::string emit_verilog(Netlist const& net, std::string const& module_name);

bool is_verilog_identifier(std::string const& name);

} // namespace approxdt
