#include "smm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "smm/error.hpp"
#include "smm/io.hpp"

namespace smm {

void Dataset::push_back(std::span<const double> x, double y) {
    detail::require(x.size() == dim, "dataset: row width does not match dim");
    inputs.insert(inputs.end(), x.begin(), x.end());
    targets.push_back(y);
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    Dataset out;
    out.dim = dim;
    out.feature_names = feature_names;
    out.target_name = target_name;
    out.provenance = provenance;
    out.inputs.reserve(indices.size() * dim);
    out.targets.reserve(indices.size());
    for (std::size_t i : indices) {
        detail::require(i < size(), "dataset subset: index out of range");
        out.push_back(row(i), targets[i]);
    }
    return out;
}

void Dataset::validate() const {
    detail::require(dim >= 1, "dataset: dim must be at least 1");
    detail::require(inputs.size() == targets.size() * dim, "dataset: inputs size is not n*dim");
    detail::require(feature_names.empty() || feature_names.size() == dim,
                    "dataset: feature name count does not match dim");
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    for (;;) {
        const auto comma = line.find(',', pos);
        out.push_back(line.substr(pos, comma == std::string_view::npos ? comma : comma - pos));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_number(std::string_view field, const std::string& where) {
    field = trim(field);
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw ContractViolation(where + ": cannot parse number '" + std::string(field) + "'");
    return value;
}

}  // namespace

Dataset parse_csv(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    Dataset data;
    data.provenance = "csv:" + source;
    bool header = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty() || trim(line).front() == '#') continue;
        const auto fields = split_fields(line);
        const std::string where = source + ":" + std::to_string(line_no);
        if (header) {
            if (fields.size() < 2) throw ContractViolation(where + ": need at least one feature and a target column");
            for (std::size_t i = 0; i + 1 < fields.size(); ++i) data.feature_names.emplace_back(trim(fields[i]));
            data.target_name = std::string(trim(fields.back()));
            data.dim = fields.size() - 1;
            header = false;
            continue;
        }
        if (fields.size() != data.dim + 1)
            throw ContractViolation(where + ": expected " + std::to_string(data.dim + 1) + " columns, got " +
                                    std::to_string(fields.size()));
        for (std::size_t i = 0; i < data.dim; ++i) data.inputs.push_back(parse_number(fields[i], where));
        data.targets.push_back(parse_number(fields.back(), where));
    }
    if (header) throw ContractViolation(source + ": missing header row");
    return data;
}

Dataset read_csv(const std::filesystem::path& path) {
    return parse_csv(read_text_file(path), path.string());
}

std::string to_csv(const Dataset& data) {
    std::string out;
    for (std::size_t m = 0; m < data.dim; ++m) {
        out += m < data.feature_names.size() ? data.feature_names[m] : "x" + std::to_string(m + 1);
        out += ',';
    }
    out += data.target_name;
    out += '\n';
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (double v : data.row(i)) {
            out += format_double(v);
            out += ',';
        }
        out += format_double(data.targets[i]);
        out += '\n';
    }
    return out;
}

void write_csv(const std::filesystem::path& path, const Dataset& data) {
    write_file_atomic(path, to_csv(data));
}

MonotonicityMask parse_mask(const std::string& json_text, const Dataset& data) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ContractViolation(std::string("mask file: ") + e.what());
    }
    if (!j.is_array()) throw ContractViolation("mask file: expected a JSON list of column names");
    std::vector<bool> flags(data.dim, false);
    for (const auto& item : j) {
        if (!item.is_string()) throw ContractViolation("mask file: entries must be column names");
        const auto name = item.get<std::string>();
        const auto it = std::find(data.feature_names.begin(), data.feature_names.end(), name);
        if (it == data.feature_names.end())
            throw ContractViolation("mask file: unknown feature column '" + name + "'");
        flags[static_cast<std::size_t>(it - data.feature_names.begin())] = true;
    }
    return MonotonicityMask(std::move(flags));
}

MonotonicityMask read_mask(const std::filesystem::path& path, const Dataset& data) {
    return parse_mask(read_text_file(path), data);
}

namespace {

AffineMap fit_map(double lo, double hi) {
    AffineMap m;
    m.offset = lo;
    if (hi > lo) {
        m.width = hi - lo;
    } else {
        m.constant = true;
    }
    return m;
}

}  // namespace

Dataset UnitNormalization::apply(const Dataset& data) const {
    detail::require(inputs.size() == data.dim, "normalization: column count mismatch");
    Dataset out = data;
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto r = out.row(i);
        for (std::size_t m = 0; m < out.dim; ++m) r[m] = inputs[m].apply(r[m]);
        out.targets[i] = target.apply(out.targets[i]);
    }
    return out;
}

std::pair<Dataset, UnitNormalization> normalize_unit(const Dataset& data) {
    detail::require(!data.empty(), "normalize_unit: empty dataset");
    UnitNormalization norm;
    for (std::size_t m = 0; m < data.dim; ++m) {
        double lo = data.row(0)[m], hi = lo;
        for (std::size_t i = 1; i < data.size(); ++i) {
            lo = std::min(lo, data.row(i)[m]);
            hi = std::max(hi, data.row(i)[m]);
        }
        norm.inputs.push_back(fit_map(lo, hi));
    }
    const auto [lo, hi] = std::minmax_element(data.targets.begin(), data.targets.end());
    norm.target = fit_map(*lo, *hi);
    return {norm.apply(data), norm};
}

}  // namespace smm
