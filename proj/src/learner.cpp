#include "ddr/learner.hpp"

#include "ddr/ka.hpp"
#include "ddr/text.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <istream>
#include <ostream>

namespace ddr {

std::string to_string(LearnerKind kind)
{
    return kind == LearnerKind::linear ? "linear" : "ka";
}

LearnerKind learner_kind_from_string(const std::string& name)
{
    if (name == "linear")
        return LearnerKind::linear;
    if (name == "ka" || name == "kolmogorov-arnold")
        return LearnerKind::kolmogorov_arnold;
    throw LearnerError("unknown learner kind '" + name + "' (expected 'linear' or 'ka')");
}

void KaParams::validate() const
{
    if (inner_nodes < 2 || outer_nodes < 2)
        throw LearnerError("KA functions need at least 2 nodes");
    if (!(mu >= 0.0) || !std::isfinite(mu))
        throw LearnerError("KA step factor mu must be finite and non-negative");
}

void Model::check_dim(std::size_t n) const
{
    if (n != dim())
        throw LearnerError("input has " + std::to_string(n) + " components, model expects " + std::to_string(dim()));
}

// ---------------------------------------------------------------------------

double LinearModel::evaluate(std::span<const double> x) const
{
    double y = intercept_;
    for (std::size_t j = 0; j < weights_.size(); ++j)
        y += weights_[j] * x[j];
    return y;
}

void LinearModel::save(std::ostream& out) const
{
    out << "ddr-model 1\nkind linear\n";
    out << "dim " << weights_.size() << '\n';
    out << "intercept " << to_text(intercept_) << '\n';
    out << "weights";
    for (double w : weights_)
        out << ' ' << to_text(w);
    out << "\nend\n";
}

LinearModel LinearModel::load_body(std::istream& in)
{
    std::string tok;
    std::size_t m = 0;
    if (!(in >> tok >> m) || tok != "dim")
        throw LearnerError("malformed linear model header");
    auto number = [&in] {
        std::string t;
        if (!(in >> t))
            throw LearnerError("truncated linear model");
        auto v = parse_double(t);
        if (!v)
            throw LearnerError("bad number in linear model: '" + t + "'");
        return *v;
    };
    if (!(in >> tok) || tok != "intercept")
        throw LearnerError("malformed linear model: missing intercept");
    const double b = number();
    if (!(in >> tok) || tok != "weights")
        throw LearnerError("malformed linear model: missing weights");
    std::vector<double> w(m);
    for (auto& v : w)
        v = number();
    if (!(in >> tok) || tok != "end")
        throw LearnerError("malformed linear model: missing end");
    return {std::move(w), b};
}

LinearModel fit_linear(const LinearParams& params, const RecordSpan& records)
{
    if (records.empty())
        throw LearnerError("cannot fit a linear model on an empty record set");
    const std::size_t m = records.dim();
    const auto n = static_cast<double>(records.size());

    Eigen::VectorXd mean_x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    double mean_y = 0.0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        mean_x += Eigen::Map<const Eigen::VectorXd>(records.input(i).data(), static_cast<Eigen::Index>(m));
        mean_y += records.output(i);
    }
    mean_x /= n;
    mean_y /= n;

    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < records.size(); ++i) {
        const Eigen::VectorXd xc =
            Eigen::Map<const Eigen::VectorXd>(records.input(i).data(), static_cast<Eigen::Index>(m)) - mean_x;
        gram.selfadjointView<Eigen::Lower>().rankUpdate(xc);
        rhs += xc * (records.output(i) - mean_y);
    }
    gram = gram.selfadjointView<Eigen::Lower>();

    auto solve = [&](double ridge, bool require_regular) -> std::optional<Eigen::VectorXd> {
        Eigen::MatrixXd a = gram;
        a.diagonal().array() += ridge;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
        if (ldlt.info() != Eigen::Success)
            return std::nullopt;
        const auto d = ldlt.vectorD().cwiseAbs();
        if (require_regular && (d.size() > 0 && (d.maxCoeff() == 0.0 || d.minCoeff() < 1e-12 * d.maxCoeff())))
            return std::nullopt;
        return Eigen::VectorXd(ldlt.solve(rhs));
    };

    std::optional<Eigen::VectorXd> w;
    if (m == 0) {
        w = Eigen::VectorXd();
    } else if (params.ridge && *params.ridge > 0.0) {
        w = solve(*params.ridge, false);
    } else {
        w = solve(0.0, true);
        if (!w && !params.ridge) {
            const double scale = gram.trace() / static_cast<double>(m);
            w = solve(scale > 0.0 ? 1e-8 * scale : 1e-8, false);
        }
    }
    if (!w)
        throw LearnerError("normal equations are singular (" + std::to_string(records.size()) +
                           " records); enable a ridge term epsilon > 0");

    std::vector<double> weights(w->data(), w->data() + w->size());
    double intercept = mean_y;
    for (std::size_t j = 0; j < m; ++j)
        intercept -= weights[j] * mean_x[static_cast<Eigen::Index>(j)];
    return {std::move(weights), intercept};
}

// ---------------------------------------------------------------------------

void residuals_into(const Model& model, const RecordSpan& records, std::span<double> out)
{
    if (out.size() != records.size())
        throw LearnerError("residual buffer has the wrong length");
    for (std::size_t i = 0; i < records.size(); ++i)
        out[i] = records.output(i) - model.predict(records.input(i));
}

std::vector<double> residuals(const Model& model, const RecordSpan& records)
{
    if (records.empty())
        throw LearnerError("residuals need at least one record");
    std::vector<double> out(records.size());
    residuals_into(model, records, out);
    return out;
}

FitResult fit(const LearnerSpec& spec, const RecordSpan& records)
{
    if (records.empty())
        throw LearnerError("cannot fit a model on an empty record set");
    ModelPtr model;
    if (spec.kind == LearnerKind::linear)
        model = std::make_shared<LinearModel>(fit_linear(spec.linear, records));
    else
        model = std::make_shared<KaModel>(train_ka(spec.ka, spec.seed, records));

    double acc = 0.0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const double r = records.output(i) - model->predict(records.input(i));
        acc += r * r;
    }
    return {std::move(model), std::sqrt(acc / static_cast<double>(records.size()))};
}

ModelPtr load_model(std::istream& in)
{
    std::string magic, version, key, kind;
    if (!(in >> magic >> version) || magic != "ddr-model")
        throw LearnerError("not a serialized model");
    if (version != "1")
        throw LearnerError("unsupported model format version " + version);
    if (!(in >> key >> kind) || key != "kind")
        throw LearnerError("serialized model lacks a kind tag");
    if (kind == "linear")
        return std::make_shared<LinearModel>(LinearModel::load_body(in));
    if (kind == "ka")
        return std::make_shared<KaModel>(KaModel::load_body(in));
    throw LearnerError("unknown model kind '" + kind + "'");
}

} // namespace ddr
