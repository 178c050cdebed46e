#include "approxdt/rtl.hpp"

#include "approxdt/error.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <unordered_set>

namespace approxdt {

namespace {

std::int32_t bits_for(std::size_t class_count) noexcept
{
    std::int32_t w = 1;
    while ((std::size_t{1} << w) < class_count) {
        ++w;
    }
    return w;
}

std::string binary_literal(std::uint64_t value, std::int32_t width)
{
    std::string s = std::to_string(width) + "'b";
    for (std::int32_t b = width - 1; b >= 0; --b) {
        s.push_back(((value >> b) & 1U) != 0 ? '1' : '0');
    }
    return s;
}

} // namespace

Netlist build_netlist(QuantizedTree const& qtree)
{
    auto const& tree = qtree.tree();
    Netlist net;
    net.class_count = tree.class_count();
    net.output_width = bits_for(tree.class_count());
    net.min_sample_size = static_cast<std::size_t>(tree.max_feature() + 1);
    if ((std::size_t{1} << net.output_width) < net.class_count) {
        throw InternalError("class bus too narrow");
    }

    std::map<std::int32_t, std::int32_t> widths;
    for (auto id : tree.comparators()) {
        auto const f = tree.node(id).feature;
        auto& w = widths[f];
        w = std::max(w, qtree.at_node(id).precision);
    }
    std::map<std::int32_t, std::size_t> bus_of;
    for (auto const& [f, w] : widths) {
        bus_of.emplace(f, net.inputs.size());
        net.inputs.push_back({f, w});
    }
    for (auto id : tree.comparators()) {
        auto const& nd = tree.node(id);
        auto const& q = qtree.at_node(id);
        net.comparators.push_back({id, nd.feature, q.precision, q.int_threshold, bus_of.at(nd.feature)});
    }

    // path literals by DFS; left edge = cmp, right edge = ~cmp
    struct Frame {
        NodeId id;
        std::vector<Literal> path;
    };
    std::vector<Frame> stack{{tree.root(), {}}};
    while (!stack.empty()) {
        auto [id, path] = std::move(stack.back());
        stack.pop_back();
        auto const& nd = tree.node(id);
        if (nd.is_leaf) {
            net.selects.push_back({id, nd.class_label, std::move(path)});
            continue;
        }
        auto const c = static_cast<std::size_t>(tree.comparator_index(id));
        auto right = path;
        right.push_back({c, false});
        path.push_back({c, true});
        stack.push_back({nd.right, std::move(right)});
        stack.push_back({nd.left, std::move(path)});
    }
    std::sort(net.selects.begin(), net.selects.end(), [](auto const& a, auto const& b) { return a.leaf < b.leaf; });
    return net;
}

namespace {

std::vector<bool> comparator_values(Netlist const& net, std::span<double const> sample)
{
    if (sample.size() < net.min_sample_size) {
        throw InputError("eval_netlist: sample has " + std::to_string(sample.size()) + " features, netlist needs " +
                         std::to_string(net.min_sample_size));
    }
    std::vector<std::uint32_t> bus(net.inputs.size());
    for (std::size_t i = 0; i < net.inputs.size(); ++i) {
        bus[i] = quantize_feature(sample[static_cast<std::size_t>(net.inputs[i].feature)], net.inputs[i].width);
    }
    std::vector<bool> cmp(net.comparators.size());
    for (std::size_t i = 0; i < net.comparators.size(); ++i) {
        auto const& c = net.comparators[i];
        auto const shift = net.inputs[c.bus].width - c.precision;
        cmp[i] = (bus[c.bus] >> shift) <= c.threshold;
    }
    return cmp;
}

} // namespace

std::vector<bool> eval_selects(Netlist const& net, std::span<double const> sample)
{
    auto const cmp = comparator_values(net, sample);
    std::vector<bool> sel(net.selects.size());
    for (std::size_t i = 0; i < net.selects.size(); ++i) {
        sel[i] = std::all_of(net.selects[i].literals.begin(), net.selects[i].literals.end(),
                             [&](Literal const& l) { return cmp[l.comparator] == l.positive; });
    }
    return sel;
}

int eval_netlist(Netlist const& net, std::span<double const> sample)
{
    auto const sel = eval_selects(net, sample);
    std::uint32_t out = 0;
    for (std::size_t i = 0; i < sel.size(); ++i) {
        if (sel[i]) {
            out |= static_cast<std::uint32_t>(net.selects[i].class_label);
        }
    }
    return static_cast<int>(out);
}

bool is_verilog_identifier(std::string const& name)
{
    if (name.empty() || !(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_')) {
        return false;
    }
    return std::all_of(name.begin(), name.end(),
                       [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; });
}

std::string emit_verilog(Netlist const& net, std::string const& module_name)
{
    if (!is_verilog_identifier(module_name)) {
        throw InputError("'" + module_name + "' is not a valid Verilog identifier");
    }
    std::ostringstream v;
    auto const ow = net.output_width;
    v << "// " << net.comparators.size() << " comparators, " << net.selects.size() << " leaves, " << net.class_count
      << " classes\n";
    v << "module " << module_name << " (\n";
    for (auto const& in : net.inputs) {
        v << "    input  wire [" << in.width - 1 << ":0] f" << in.feature << ",\n";
    }
    v << "    output wire [" << ow - 1 << ":0] class_out\n);\n\n";

    for (auto const& c : net.comparators) {
        auto const& bus = net.inputs[c.bus];
        std::string operand = "f" + std::to_string(c.feature);
        if (c.precision != bus.width) {
            operand += c.precision == 1 ? "[" + std::to_string(bus.width - 1) + "]"
                                        : "[" + std::to_string(bus.width - 1) + ":" +
                                              std::to_string(bus.width - c.precision) + "]";
        }
        v << "    wire cmp_" << c.node << " = " << operand << " <= " << binary_literal(c.threshold, c.precision)
          << ";\n";
    }
    if (!net.comparators.empty()) {
        v << "\n";
    }
    for (auto const& s : net.selects) {
        v << "    wire sel_" << s.leaf << " = ";
        if (s.literals.empty()) {
            v << "1'b1";
        }
        for (std::size_t k = 0; k < s.literals.size(); ++k) {
            auto const& l = s.literals[k];
            v << (k ? " & " : "") << (l.positive ? "" : "~") << "cmp_" << net.comparators[l.comparator].node;
        }
        v << ";\n";
    }
    v << "\n    assign class_out =";
    for (std::size_t i = 0; i < net.selects.size(); ++i) {
        auto const& s = net.selects[i];
        v << (i ? "\n                     | " : " ") << "({" << ow << "{sel_" << s.leaf << "}} & "
          << binary_literal(static_cast<std::uint64_t>(s.class_label), ow) << ")";
    }
    v << ";\n\nendmodule\n";
    return v.str();
}

} // namespace approxdt
