#include "ddr/dataset.hpp"

#include "ddr/rng.hpp"
#include "ddr/text.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

namespace ddr {

void Dataset::reserve(std::size_t n)
{
    inputs_.reserve(n * dim_);
    outputs_.reserve(n);
}

void Dataset::add(std::span<const double> x, double y)
{
    if (x.size() != dim_)
        throw DataError("record has " + std::to_string(x.size()) + " inputs, dataset expects " +
                        std::to_string(dim_));
    if (!std::isfinite(y) || !std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); }))
        throw DataError("record contains a non-finite value");
    inputs_.insert(inputs_.end(), x.begin(), x.end());
    outputs_.push_back(y);
}

Record Dataset::record(std::size_t i) const
{
    auto x = input(i);
    return {{x.begin(), x.end()}, outputs_[i]};
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const
{
    Dataset out(dim_);
    out.names_ = names_;
    out.reserve(indices.size());
    for (auto i : indices) {
        auto x = input(i);
        out.inputs_.insert(out.inputs_.end(), x.begin(), x.end());
        out.outputs_.push_back(outputs_[i]);
    }
    return out;
}

Dataset Dataset::with_outputs(std::vector<double> outputs) const
{
    if (outputs.size() != size())
        throw DataError("replacement outputs have the wrong length");
    Dataset out = *this;
    out.outputs_ = std::move(outputs);
    return out;
}

std::uint64_t Dataset::fingerprint() const noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const void* p, std::size_t n) {
        auto bytes = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= bytes[i];
            h *= 0x100000001b3ULL;
        }
    };
    const std::uint64_t dims[2] = {dim_, size()};
    mix(dims, sizeof dims);
    mix(inputs_.data(), inputs_.size() * sizeof(double));
    mix(outputs_.data(), outputs_.size() * sizeof(double));
    return h;
}

std::vector<std::size_t> identity_order(std::size_t n)
{
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    return order;
}

// ---------------------------------------------------------------------------

ColumnMap ColumnMap::fit(std::span<const double> values)
{
    if (values.empty())
        return {};
    auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    return {*mn, *mx};
}

std::vector<double> NormalizationMaps::forward_input(std::span<const double> x) const
{
    if (x.size() != inputs.size())
        throw DataError("input has " + std::to_string(x.size()) + " components, normalization expects " +
                        std::to_string(inputs.size()));
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j)
        out[j] = inputs[j].forward(x[j]);
    return out;
}

NormalizationMaps NormalizationMaps::identity(std::size_t dim)
{
    return {std::vector<ColumnMap>(dim, ColumnMap{0.0, 1.0}), ColumnMap{0.0, 1.0}};
}

NormalizationMaps fit_normalization(const Dataset& data)
{
    NormalizationMaps maps;
    const std::size_t m = data.dim();
    std::vector<double> lo(m, INFINITY), hi(m, -INFINITY);
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto x = data.input(i);
        for (std::size_t j = 0; j < m; ++j) {
            lo[j] = std::min(lo[j], x[j]);
            hi[j] = std::max(hi[j], x[j]);
        }
    }
    maps.inputs.resize(m);
    for (std::size_t j = 0; j < m; ++j)
        maps.inputs[j] = data.empty() ? ColumnMap{} : ColumnMap{lo[j], hi[j]};
    maps.output = ColumnMap::fit(data.outputs());
    return maps;
}

Dataset apply_normalization(const Dataset& data, const NormalizationMaps& maps)
{
    Dataset out(data.dim());
    out.set_column_names(data.column_names());
    out.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        out.add(maps.forward_input(data.input(i)), maps.forward_output(data.output(i)));
    return out;
}

std::pair<Dataset, NormalizationMaps> normalize(const Dataset& data)
{
    auto maps = fit_normalization(data);
    return {apply_normalization(data, maps), std::move(maps)};
}

// ---------------------------------------------------------------------------

double eval_formula2(std::span<const double> x, std::span<const double> c, double amplitude)
{
    if (x.size() != formula2_dim || c.size() != formula2_dim)
        throw std::invalid_argument("eval_formula2 expects 5 inputs and 5 noise variables");
    double xs[formula2_dim];
    for (std::size_t j = 0; j < formula2_dim; ++j)
        xs[j] = x[j] + amplitude * (c[j] - 0.5);

    constexpr double pi = std::numbers::pi;
    const double scale = std::exp(xs[4]);
    const double a = 20.0 * (xs[0] - 0.5 + xs[1] / 6.0) * scale;
    const double b = 20.0 * (xs[0] - 0.5 - xs[1] / 6.0) * scale;
    return (2.0 + 2.0 * xs[2]) / (3.0 * pi) * (std::atan(a) + pi / 2.0) +
           (2.0 + 2.0 * xs[3]) / (3.0 * pi) * (std::atan(b) + pi / 2.0);
}

Dataset generate_synthetic(const SyntheticSpec& spec, std::size_t n)
{
    if (spec.input_dim != formula2_dim)
        throw std::invalid_argument("the synthetic system has exactly 5 inputs");
    if (!(spec.noise_amplitude >= 0.0))
        throw std::invalid_argument("noise amplitude must be non-negative");
    if (n == 0)
        throw std::invalid_argument("synthetic dataset needs at least one record");

    Rng rng(spec.rng_seed);
    Dataset data(formula2_dim);
    data.reserve(n);
    data.set_column_names({"x1", "x2", "x3", "x4", "x5", "y"});
    double x[formula2_dim], c[formula2_dim];
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& v : x)
            v = rng.uniform();
        for (auto& v : c)
            v = rng.uniform();
        data.add(x, eval_formula2(x, c, spec.noise_amplitude));
    }
    return data;
}

namespace {
constexpr std::size_t oracle_block = 4096;
}

std::vector<double> oracle_sample(std::span<const double> x, std::size_t n_mc, std::uint64_t seed, double amplitude)
{
    if (n_mc == 0)
        throw std::invalid_argument("oracle sample size must be at least 1");
    if (x.size() != formula2_dim)
        throw std::invalid_argument("eval_formula2 expects 5 inputs and 5 noise variables");

    std::vector<double> out(n_mc);
    const auto blocks = static_cast<std::int64_t>((n_mc + oracle_block - 1) / oracle_block);

#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < blocks; ++b) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(b)));
        const std::size_t begin = static_cast<std::size_t>(b) * oracle_block;
        const std::size_t end = std::min(n_mc, begin + oracle_block);
        double c[formula2_dim];
        for (std::size_t i = begin; i < end; ++i) {
            for (auto& v : c)
                v = rng.uniform();
            out[i] = eval_formula2(x, c, amplitude);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_fields(const std::string& line, char delimiter)
{
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (char ch : line) {
        if (ch == '"') {
            quoted = !quoted;
        } else if (ch == delimiter && !quoted) {
            fields.emplace_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    fields.emplace_back(trim(cur));
    return fields;
}

bool blank(const std::string& line) { return trim(line).empty(); }

} // namespace

Dataset parse_csv(std::istream& in, const CsvOptions& options)
{
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::size_t columns = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line))
            continue;
        auto fields = split_fields(line, options.delimiter);
        if (columns == 0) {
            columns = fields.size();
            if (options.has_header) {
                header = std::move(fields);
                continue;
            }
        } else if (fields.size() != columns) {
            throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(columns) +
                            " fields, found " + std::to_string(fields.size()));
        }
        std::vector<double> row(columns);
        for (std::size_t c = 0; c < columns; ++c) {
            auto v = parse_double(fields[c]);
            if (!v || !std::isfinite(*v))
                throw DataError("line " + std::to_string(line_no) + ", column " + std::to_string(c + 1) +
                                ": not a finite number: '" + fields[c] + "'");
            row[c] = *v;
        }
        rows.push_back(std::move(row));
    }
    if (in.bad())
        throw DataError("read error while parsing CSV");
    if (rows.empty())
        throw DataError("CSV contains no data rows");
    if (columns < 2)
        throw DataError("CSV needs at least one input column and one output column");

    std::size_t out_col = 0;
    if (auto name = std::get_if<std::string>(&options.output_column)) {
        auto it = std::find(header.begin(), header.end(), *name);
        if (it == header.end())
            throw DataError("output column '" + *name + "' not found in header");
        out_col = static_cast<std::size_t>(it - header.begin());
    } else {
        long idx = std::get<long>(options.output_column);
        long resolved = idx < 0 ? static_cast<long>(columns) + idx : idx;
        if (resolved < 0 || resolved >= static_cast<long>(columns))
            throw DataError("output column index " + std::to_string(idx) + " out of range");
        out_col = static_cast<std::size_t>(resolved);
    }

    Dataset data(columns - 1);
    data.reserve(rows.size());
    std::vector<double> x(columns - 1);
    for (const auto& row : rows) {
        std::size_t k = 0;
        for (std::size_t c = 0; c < columns; ++c)
            if (c != out_col)
                x[k++] = row[c];
        data.add(x, row[out_col]);
    }
    if (!header.empty()) {
        std::vector<std::string> names;
        for (std::size_t c = 0; c < columns; ++c)
            if (c != out_col)
                names.push_back(header[c]);
        names.push_back(header[out_col]);
        data.set_column_names(std::move(names));
    }
    return data;
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open '" + path.string() + "'");
    return parse_csv(in, options);
}

void write_csv(std::ostream& out, const Dataset& data, char delimiter)
{
    const auto& names = data.column_names();
    if (names.size() == data.dim() + 1) {
        for (std::size_t c = 0; c < names.size(); ++c)
            out << (c ? std::string(1, delimiter) : "") << names[c];
    } else {
        for (std::size_t j = 0; j < data.dim(); ++j)
            out << 'x' << j + 1 << delimiter;
        out << 'y';
    }
    out << '\n';
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (double v : data.input(i))
            out << to_text(v) << delimiter;
        out << to_text(data.output(i)) << '\n';
    }
}

void write_csv(const std::filesystem::path& path, const Dataset& data, char delimiter)
{
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write '" + path.string() + "'");
    write_csv(out, data, delimiter);
    if (!out)
        throw DataError("write failed for '" + path.string() + "'");
}

} // namespace ddr
