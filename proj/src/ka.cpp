#include "ddr/ka.hpp"

#include "ddr/rng.hpp"
#include "ddr/text.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

namespace ddr {

namespace {
// Inner nodal values start as small noise; the outer ramps do the initial work.
constexpr double inner_init_amplitude = 0.01;
} // namespace

PiecewiseLinear::PiecewiseLinear(double lo, double hi, std::vector<double> values)
    : lo_(lo), hi_(hi), values_(std::move(values))
{
    if (!(hi > lo))
        throw std::invalid_argument("piecewise-linear domain must satisfy lo < hi");
    if (values_.size() < 2)
        throw std::invalid_argument("piecewise-linear function needs at least two nodes");
    step_ = (hi_ - lo_) / static_cast<double>(values_.size() - 1);
}

PiecewiseLinear PiecewiseLinear::ramp(double lo, double hi, std::size_t q, double from, double to)
{
    if (q < 2)
        throw std::invalid_argument("piecewise-linear function needs at least two nodes");
    std::vector<double> v(q);
    for (std::size_t i = 0; i < q; ++i)
        v[i] = from + (to - from) * static_cast<double>(i) / static_cast<double>(q - 1);
    return {lo, hi, std::move(v)};
}

PiecewiseLinear::Bracket PiecewiseLinear::locate(double t) const noexcept
{
    const std::size_t last = values_.size() - 2;
    if (!(t > lo_))
        return {0, 0.0};
    if (!(t < hi_))
        return {last, 1.0};
    const double pos = (t - lo_) / step_;
    auto i = static_cast<std::size_t>(pos);
    if (i > last)
        return {last, 1.0};
    return {i, pos - static_cast<double>(i)};
}

double PiecewiseLinear::evaluate(double t) const noexcept { return evaluate(locate(t)); }

void PiecewiseLinear::resample(double lo, double hi)
{
    if (!(hi > lo))
        throw std::invalid_argument("piecewise-linear domain must satisfy lo < hi");
    const std::size_t q = values_.size();
    const double step = (hi - lo) / static_cast<double>(q - 1);
    std::vector<double> v(q);
    for (std::size_t i = 0; i < q; ++i)
        v[i] = evaluate(lo + step * static_cast<double>(i));
    lo_ = lo;
    hi_ = hi;
    step_ = step;
    values_ = std::move(v);
}

// ---------------------------------------------------------------------------

KaModel::KaModel(std::size_t dim, std::size_t addends, std::vector<PiecewiseLinear> inner,
                 std::vector<PiecewiseLinear> outer, ColumnMap target_map)
    : dim_(dim), addends_(addends), inner_(std::move(inner)), outer_(std::move(outer)), target_map_(target_map)
{
    if (dim_ == 0 || addends_ == 0)
        throw std::invalid_argument("KA model needs at least one input and one addend");
    if (inner_.size() != dim_ * addends_ || outer_.size() != addends_)
        throw std::invalid_argument("KA model function counts do not match its dimensions");
}

KaModel KaModel::initial(const KaParams& params, std::size_t dim, std::uint64_t seed)
{
    params.validate();
    const std::size_t n = params.addends ? params.addends : 2 * dim + 1;
    Rng rng(seed);
    std::vector<PiecewiseLinear> inner;
    inner.reserve(n * dim);
    for (std::size_t i = 0; i < n * dim; ++i) {
        std::vector<double> v(params.inner_nodes);
        for (auto& x : v)
            x = rng.uniform(-inner_init_amplitude, inner_init_amplitude);
        inner.emplace_back(0.0, 1.0, std::move(v));
    }
    std::vector<PiecewiseLinear> outer;
    outer.reserve(n);
    const double half = 0.5 * static_cast<double>(dim);
    for (std::size_t k = 0; k < n; ++k)
        outer.push_back(PiecewiseLinear::ramp(-half, half, params.outer_nodes, -half, half));
    return {dim, n, std::move(inner), std::move(outer), ColumnMap{0.0, 1.0}};
}

double KaModel::inner_sum(std::size_t k, std::span<const double> x) const
{
    double u = 0.0;
    const PiecewiseLinear* f = &inner_[k * dim_];
    for (std::size_t j = 0; j < dim_; ++j)
        u += f[j].evaluate(x[j]);
    return u;
}

double KaModel::evaluate_normalized(std::span<const double> x) const
{
    double y = 0.0;
    for (std::size_t k = 0; k < addends_; ++k)
        y += outer_[k].evaluate(inner_sum(k, x));
    return y;
}

double KaModel::evaluate(std::span<const double> x) const { return target_map_.inverse(evaluate_normalized(x)); }

std::size_t KaModel::parameter_count() const noexcept
{
    std::size_t count = 0;
    for (const auto& f : inner_)
        count += f.nodes();
    for (const auto& g : outer_)
        count += g.nodes();
    return count;
}

double& KaModel::parameter(std::size_t p)
{
    for (auto& f : inner_) {
        if (p < f.nodes())
            return f.values()[p];
        p -= f.nodes();
    }
    for (auto& g : outer_) {
        if (p < g.nodes())
            return g.values()[p];
        p -= g.nodes();
    }
    throw std::out_of_range("KA parameter index out of range");
}

std::vector<double> KaModel::gradient(std::span<const double> x) const
{
    check_dim(x.size());
    std::vector<double> grad(parameter_count(), 0.0);
    std::size_t inner_offset = 0;
    std::size_t outer_offset = 0;
    for (const auto& f : inner_)
        outer_offset += f.nodes();
    for (std::size_t k = 0; k < addends_; ++k) {
        const auto& g = outer_[k];
        const auto ob = g.locate(inner_sum(k, x));
        const double s = g.slope(ob);
        for (std::size_t j = 0; j < dim_; ++j) {
            const auto& f = inner_[k * dim_ + j];
            const auto ib = f.locate(x[j]);
            grad[inner_offset + ib.index] += s * (1.0 - ib.weight);
            grad[inner_offset + ib.index + 1] += s * ib.weight;
            inner_offset += f.nodes();
        }
        grad[outer_offset + ob.index] += 1.0 - ob.weight;
        grad[outer_offset + ob.index + 1] += ob.weight;
        outer_offset += g.nodes();
    }
    return grad;
}

void KaModel::fit_outer_domains(const RecordSpan& records)
{
    for (std::size_t k = 0; k < addends_; ++k) {
        double lo = INFINITY, hi = -INFINITY;
        for (std::size_t i = 0; i < records.size(); ++i) {
            const double u = inner_sum(k, records.input(i));
            lo = std::min(lo, u);
            hi = std::max(hi, u);
        }
        if (!(hi > lo)) {
            lo -= 0.5;
            hi += 0.5;
        }
        auto& g = outer_[k];
        // increasing ramp whose sum over addends spans the normalized target range
        g = PiecewiseLinear::ramp(lo, hi, g.nodes(), 0.0, 1.0 / static_cast<double>(addends_));
    }
}

double KaModel::update(std::span<const double> x, double target, double mu)
{
    constexpr std::size_t max_stack = 64;
    double s_buf[max_stack];
    PiecewiseLinear::Bracket ob_buf[max_stack];
    std::vector<double> s_heap;
    std::vector<PiecewiseLinear::Bracket> ob_heap;
    double* slope = s_buf;
    PiecewiseLinear::Bracket* ob = ob_buf;
    if (addends_ > max_stack) {
        s_heap.resize(addends_);
        ob_heap.resize(addends_);
        slope = s_heap.data();
        ob = ob_heap.data();
    }

    double y = 0.0;
    double norm2 = 0.0;
    for (std::size_t k = 0; k < addends_; ++k) {
        const double u = inner_sum(k, x);
        auto& g = outer_[k];
        const double margin = 0.01 * (g.hi() - g.lo());
        if (u < g.lo() - margin || u > g.hi() + margin)
            g.resample(std::min(g.lo(), u), std::max(g.hi(), u));
        ob[k] = g.locate(u);
        slope[k] = g.slope(ob[k]);
        y += g.evaluate(ob[k]);
        const double w = ob[k].weight;
        double inner_norm = 0.0;
        for (std::size_t j = 0; j < dim_; ++j) {
            const double v = inner_[k * dim_ + j].locate(x[j]).weight;
            inner_norm += (1.0 - v) * (1.0 - v) + v * v;
        }
        norm2 += (1.0 - w) * (1.0 - w) + w * w + slope[k] * slope[k] * inner_norm;
    }

    const double r = target - y;
    if (r == 0.0 || norm2 == 0.0)
        return r;
    // gradient step of size mu, capped at the exact projection onto this record
    const double step = r * std::min(mu, 1.0 / norm2);

    for (std::size_t k = 0; k < addends_; ++k) {
        const double ds = step * slope[k];
        for (std::size_t j = 0; j < dim_; ++j) {
            auto& f = inner_[k * dim_ + j];
            const auto b = f.locate(x[j]);
            f.values()[b.index] += ds * (1.0 - b.weight);
            f.values()[b.index + 1] += ds * b.weight;
        }
        auto vals = outer_[k].values();
        vals[ob[k].index] += step * (1.0 - ob[k].weight);
        vals[ob[k].index + 1] += step * ob[k].weight;
    }
    return r;
}

double ka_update_single(KaModel& model, std::span<const double> x, double target, double mu)
{
    return model.update(x, target, mu);
}

KaModel train_ka(const KaParams& params, std::uint64_t seed, const RecordSpan& records, KaTrainReport* report)
{
    if (records.empty())
        throw LearnerError("cannot train a KA model on an empty record set");
    params.validate();

    KaModel model = KaModel::initial(params, records.dim(), seed);
    std::vector<double> outputs(records.size());
    for (std::size_t i = 0; i < records.size(); ++i)
        outputs[i] = records.output(i);
    const ColumnMap map = ColumnMap::fit(outputs);
    model.set_target_map(map);
    model.fit_outer_domains(records);

    auto rmse_normalized = [&] {
        double acc = 0.0;
        for (std::size_t i = 0; i < records.size(); ++i) {
            const double r = map.forward(outputs[i]) - model.evaluate_normalized(records.input(i));
            acc += r * r;
        }
        return std::sqrt(acc / static_cast<double>(records.size()));
    };
    if (report)
        report->initial_rmse = rmse_normalized();

    // Records arrive sorted by residual from the divisive steps; visiting them
    // in that order would bias the per-record updates toward the tail.
    std::vector<std::size_t> visit = identity_order(records.size());
    Rng order_rng(derive_seed(seed, 0x0bde));
    for (std::size_t pass = 0; pass < params.passes; ++pass) {
        order_rng.shuffle(std::span(visit));
        for (std::size_t i : visit) {
            const double r = model.update(records.input(i), map.forward(outputs[i]), params.mu);
            if (!std::isfinite(r))
                throw LearnerError("KA identification diverged (non-finite residual in pass " +
                                   std::to_string(pass + 1) + "); reduce mu");
        }
    }

    if (report) {
        double acc = 0.0;
        for (std::size_t i = 0; i < records.size(); ++i) {
            const double r = outputs[i] - model.predict(records.input(i));
            acc += r * r;
        }
        report->final_rmse = std::sqrt(acc / static_cast<double>(records.size()));
    }
    return model;
}

// ---------------------------------------------------------------------------
// serialization

namespace {

void write_function(std::ostream& out, const PiecewiseLinear& f)
{
    out << to_text(f.lo()) << ' ' << to_text(f.hi());
    for (double v : f.values())
        out << ' ' << to_text(v);
    out << '\n';
}

double read_number(std::istream& in)
{
    std::string tok;
    if (!(in >> tok))
        throw LearnerError("truncated KA model");
    auto v = parse_double(tok);
    if (!v)
        throw LearnerError("bad number in KA model: '" + tok + "'");
    return *v;
}

PiecewiseLinear read_function(std::istream& in, std::size_t q)
{
    const double lo = read_number(in);
    const double hi = read_number(in);
    std::vector<double> v(q);
    for (auto& x : v)
        x = read_number(in);
    return {lo, hi, std::move(v)};
}

void expect(std::istream& in, const std::string& word)
{
    std::string tok;
    if (!(in >> tok) || tok != word)
        throw LearnerError("malformed KA model: expected '" + word + "', found '" + tok + "'");
}

} // namespace

void KaModel::save(std::ostream& out) const
{
    const std::size_t q_in = inner_.front().nodes();
    const std::size_t q_out = outer_.front().nodes();
    out << "ddr-model 1\nkind ka\n";
    out << "dims " << dim_ << ' ' << addends_ << ' ' << q_in << ' ' << q_out << '\n';
    out << "target " << to_text(target_map_.lo) << ' ' << to_text(target_map_.hi) << '\n';
    out << "inner\n";
    for (const auto& f : inner_)
        write_function(out, f);
    out << "outer\n";
    for (const auto& g : outer_)
        write_function(out, g);
    out << "end\n";
}

KaModel KaModel::load_body(std::istream& in)
{
    expect(in, "dims");
    std::size_t m = 0, n = 0, q_in = 0, q_out = 0;
    if (!(in >> m >> n >> q_in >> q_out) || m == 0 || n == 0 || q_in < 2 || q_out < 2)
        throw LearnerError("malformed KA model dimensions");
    expect(in, "target");
    ColumnMap map;
    map.lo = read_number(in);
    map.hi = read_number(in);
    expect(in, "inner");
    std::vector<PiecewiseLinear> inner;
    inner.reserve(n * m);
    for (std::size_t i = 0; i < n * m; ++i)
        inner.push_back(read_function(in, q_in));
    expect(in, "outer");
    std::vector<PiecewiseLinear> outer;
    outer.reserve(n);
    for (std::size_t k = 0; k < n; ++k)
        outer.push_back(read_function(in, q_out));
    expect(in, "end");
    return {m, n, std::move(inner), std::move(outer), map};
}

} // namespace ddr
