#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace approxdt {

/// Per-feature min/max captured from the data that was normalized first.
struct NormStats {
    std::vector<double> min;
    std::vector<double> max;

    friend bool operator==(NormStats const&, NormStats const&) = default;
};

/// Row-major feature matrix with dense integer class labels.
///
/// `class_count` is the number of classes of the source file, which can
/// exceed the classes present in a split subset.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::vector<double> features, std::size_t feature_count, std::vector<int> labels,
            std::size_t class_count);

    [[nodiscard]] std::size_t rows() const noexcept { return labels_.size(); }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] std::size_t class_count() const noexcept { return class_count_; }

    [[nodiscard]] std::span<double const> row(std::size_t r) const noexcept
    {
        return {features_.data() + r * cols_, cols_};
    }
    [[nodiscard]] double at(std::size_t r, std::size_t c) const noexcept { return features_[r * cols_ + c]; }
    [[nodiscard]] int label(std::size_t r) const noexcept { return labels_[r]; }

    [[nodiscard]] std::span<double const> features() const noexcept { return features_; }
    [[nodiscard]] std::span<int const> labels() const noexcept { return labels_; }

    std::vector<std::string> feature_names;
    std::vector<std::string> class_names; // index = class id
    std::optional<NormStats> norm_stats;

    /// Rows `indices` in the given order; metadata is carried over.
    [[nodiscard]] Dataset subset(std::span<std::size_t const> indices) const;

private:
    std::vector<double> features_;
    std::size_t cols_ = 0;
    std::vector<int> labels_;
    std::size_t class_count_ = 0;
};

struct SplitPair {
    Dataset train;
    Dataset test;
    std::vector<std::size_t> train_rows; // source row ids
    std::vector<std::size_t> test_rows;
    std::uint64_t seed = 0;
    double test_fraction = 0.0;
};

/// Label column, by header name or by 0-based index. Negative indices count
/// from the end (-1 is the last column).
using LabelColumn = std::variant<std::string, long>;

/// Interprets "3" / "-1" as an index and anything else as a column name.
LabelColumn parse_label_column(std::string const& text);

/// Reads a comma-separated file. The first row is a header iff one of its
/// non-label cells is not a number. Returns raw (unnormalized) features.
///
/// Class ids: when every label parses as an integer they are ordered by
/// numeric value, otherwise by first appearance.
Dataset load_csv(std::filesystem::path const& path, LabelColumn const& label_column);

/// Min-max scales every feature into [0,1]. With `stats` the given bounds are
/// reused and the result is clamped; without, bounds come from `data`.
/// Constant features map to 0.
Dataset normalize(Dataset const& data, std::optional<NormStats> const& stats = std::nullopt);

/// Seeded shuffle split. |test| = round_half_up(test_fraction * rows), kept
/// within [1, rows - 1].
SplitPair split(Dataset const& data, double test_fraction, std::uint64_t seed);

/// Number of test rows `split` produces for a given size.
std::size_t test_size(std::size_t rows, double test_fraction);

} // namespace approxdt
