#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "smm/model.hpp"

namespace smm {

/// Inputs (row-major n x dim) and targets, with a free-form provenance note.
struct Dataset {
    std::size_t dim = 0;
    std::vector<double> inputs;
    std::vector<double> targets;
    std::vector<std::string> feature_names;
    std::string target_name = "y";
    std::string provenance;

    std::size_t size() const noexcept { return targets.size(); }
    bool empty() const noexcept { return targets.empty(); }
    std::span<const double> row(std::size_t i) const { return {inputs.data() + i * dim, dim}; }
    std::span<double> row(std::size_t i) { return {inputs.data() + i * dim, dim}; }

    void push_back(std::span<const double> x, double y);
    /// Rows selected by index, in the given order.
    Dataset subset(std::span<const std::size_t> indices) const;
    void validate() const;
};

/// Reads a CSV with a header row; columns are features then the target.
/// Blank lines and lines starting with # are skipped.
/// Numbers are parsed with std::from_chars (correctly rounded).
Dataset read_csv(const std::filesystem::path& path);
Dataset parse_csv(const std::string& text, const std::string& source = "<memory>");
/// Writes shortest round-trip decimal representations.
std::string to_csv(const Dataset& data);
void write_csv(const std::filesystem::path& path, const Dataset& data);

/// Reads the sidecar mask file: a JSON list of constrained column names.
MonotonicityMask read_mask(const std::filesystem::path& path, const Dataset& data);
MonotonicityMask parse_mask(const std::string& json_text, const Dataset& data);

/// x -> (x - offset) / width, per column.
struct AffineMap {
    double offset = 0.0;
    double width = 1.0;
    /// Set when the training column was constant; maps everything to 0.5.
    bool constant = false;

    double apply(double x) const noexcept { return constant ? 0.5 : (x - offset) / width; }
    double invert(double u) const noexcept { return constant ? offset : u * width + offset; }
};

struct UnitNormalization {
    std::vector<AffineMap> inputs;
    AffineMap target;

    Dataset apply(const Dataset& data) const;
};

/// Fits per-column min->0, max->1 maps on `data` and returns the normalized
/// copy. Values outside the fitted range are not clipped.
std::pair<Dataset, UnitNormalization> normalize_unit(const Dataset& data);

}  // namespace smm
