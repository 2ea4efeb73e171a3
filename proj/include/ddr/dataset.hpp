#ifndef DDR_DATASET_HPP
#define DDR_DATASET_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace ddr {

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Owning record, used where a single sample is handled on its own.
struct Record {
    std::vector<double> inputs;
    double output = 0.0;
};

/// Records stored row-major: N rows of m inputs plus one output per row.
///
/// Storage order is the file/generation order and never changes; the working
/// order used by the ensemble builders is a separate index permutation.
class Dataset {
public:
    Dataset() = default;
    explicit Dataset(std::size_t dim) : dim_(dim) {}

    std::size_t size() const noexcept { return outputs_.size(); }
    std::size_t dim() const noexcept { return dim_; }
    bool empty() const noexcept { return outputs_.empty(); }

    std::span<const double> input(std::size_t i) const { return {inputs_.data() + i * dim_, dim_}; }
    double output(std::size_t i) const { return outputs_[i]; }

    std::span<const double> outputs() const noexcept { return outputs_; }
    std::span<const double> inputs() const noexcept { return inputs_; }

    void reserve(std::size_t n);
    /// Throws DataError on a dimension mismatch or a non-finite value.
    void add(std::span<const double> x, double y);
    void add(const Record& r) { add(r.inputs, r.output); }

    Record record(std::size_t i) const;

    /// New dataset holding rows `indices` in the given order.
    Dataset subset(std::span<const std::size_t> indices) const;

    /// Same inputs, outputs replaced. Used for derived targets.
    Dataset with_outputs(std::vector<double> outputs) const;

    /// FNV-1a over dimensions and the raw bytes of every value.
    std::uint64_t fingerprint() const noexcept;

    const std::vector<std::string>& column_names() const noexcept { return names_; }
    void set_column_names(std::vector<std::string> names) { names_ = std::move(names); }

    bool operator==(const Dataset& other) const
    {
        return dim_ == other.dim_ && inputs_ == other.inputs_ && outputs_ == other.outputs_;
    }

private:
    std::size_t dim_ = 0;
    std::vector<double> inputs_;
    std::vector<double> outputs_;
    std::vector<std::string> names_; // m input names followed by the output name; may be empty
};

/// Ordered view of dataset rows. This is what learners are fitted on.
class RecordSpan {
public:
    RecordSpan(const Dataset& data, std::span<const std::size_t> rows) : data_(&data), rows_(rows) {}

    std::size_t size() const noexcept { return rows_.size(); }
    bool empty() const noexcept { return rows_.empty(); }
    std::size_t dim() const noexcept { return data_->dim(); }
    std::span<const double> input(std::size_t k) const { return data_->input(rows_[k]); }
    double output(std::size_t k) const { return data_->output(rows_[k]); }
    std::size_t row(std::size_t k) const { return rows_[k]; }
    std::span<const std::size_t> rows() const noexcept { return rows_; }
    const Dataset& dataset() const noexcept { return *data_; }

    RecordSpan sub(std::size_t begin, std::size_t count) const { return {*data_, rows_.subspan(begin, count)}; }

private:
    const Dataset* data_;
    std::span<const std::size_t> rows_;
};

/// 0, 1, ..., n-1
std::vector<std::size_t> identity_order(std::size_t n);

// ---------------------------------------------------------------------------
// normalization

/// Affine min-max map of one column onto [0, 1]. A constant column maps to 0.5.
struct ColumnMap {
    double lo = 0.0;
    double hi = 1.0;

    bool degenerate() const noexcept { return !(hi > lo); }
    double forward(double v) const noexcept { return degenerate() ? 0.5 : (v - lo) / (hi - lo); }
    double inverse(double t) const noexcept { return degenerate() ? lo : lo + t * (hi - lo); }

    static ColumnMap fit(std::span<const double> values);
};

struct NormalizationMaps {
    std::vector<ColumnMap> inputs;
    ColumnMap output;

    std::vector<double> forward_input(std::span<const double> x) const;
    double forward_output(double y) const noexcept { return output.forward(y); }
    double denormalize_output(double t) const noexcept { return output.inverse(t); }
    /// Scale factor for spreads (standard deviations) in normalized output units.
    double output_scale() const noexcept { return output.degenerate() ? 0.0 : output.hi - output.lo; }

    /// Identity maps for already-normalized data.
    static NormalizationMaps identity(std::size_t dim);
};

/// Min-max maps fitted on `data`.
NormalizationMaps fit_normalization(const Dataset& data);

/// Applies previously fitted maps (e.g. training maps to a validation split).
Dataset apply_normalization(const Dataset& data, const NormalizationMaps& maps);

std::pair<Dataset, NormalizationMaps> normalize(const Dataset& data);

// ---------------------------------------------------------------------------
// synthetic stochastic system

inline constexpr std::size_t formula2_dim = 5;

/// The five-input arctan system. The perturbed inputs are
/// x*_j = x_j + amplitude * (c_j - 0.5) and are not clipped.
double eval_formula2(std::span<const double> x, std::span<const double> c, double amplitude = 0.4);

struct SyntheticSpec {
    double noise_amplitude = 0.4;
    std::size_t input_dim = formula2_dim;
    std::uint64_t rng_seed = 1;
};

/// n records with x ~ U(0,1)^5 and a fresh c ~ U(0,1)^5 per record.
Dataset generate_synthetic(const SyntheticSpec& spec, std::size_t n);

/// n_mc draws of the system output at fixed x, sorted ascending.
///
/// Draws are produced in fixed-size blocks with per-block seeds, so the result
/// does not depend on thread count. Parallel over blocks with OpenMP.
std::vector<double> oracle_sample(std::span<const double> x, std::size_t n_mc, std::uint64_t seed,
                                  double amplitude = 0.4);

// ---------------------------------------------------------------------------
// CSV

struct CsvOptions {
    char delimiter = ',';
    bool has_header = true;
    /// Output column: index (negative counts from the end) or header name.
    std::variant<long, std::string> output_column = -1L;
};

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
Dataset parse_csv(std::istream& in, const CsvOptions& options = {});

/// Inputs then output per row; shortest round-trip decimal text.
void write_csv(std::ostream& out, const Dataset& data, char delimiter = ',');
void write_csv(const std::filesystem::path& path, const Dataset& data, char delimiter = ',');

} // namespace ddr

#endif
