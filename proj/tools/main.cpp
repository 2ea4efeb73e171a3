// ddr: command-line front end for divisive data resorting ensembles.

#include "artifacts.hpp"
#include "experiments.hpp"
#include "json_config.hpp"

#include "ddr/ensemble.hpp"
#include "ddr/json_io.hpp"
#include "ddr/stats.hpp"
#include "ddr/text.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace ddr::cli {
namespace {

struct LearnerOptions {
    std::string kind = "ka";
    std::size_t addends = 0;
    std::size_t inner_nodes = 5;
    std::size_t outer_nodes = 7;
    double mu = 0.002;
    std::size_t passes = 4;
    std::string ridge = "auto";

    void attach(CLI::App* app)
    {
        app->add_option("--learner", kind, "Learner kind: ka or linear")->capture_default_str();
        app->add_option("--addends", addends, "KA addends n (0 = 2m+1)")->capture_default_str();
        app->add_option("--inner-nodes", inner_nodes, "KA inner function nodes")->capture_default_str();
        app->add_option("--outer-nodes", outer_nodes, "KA outer function nodes")->capture_default_str();
        app->add_option("--mu", mu, "KA learning rate")->capture_default_str();
        app->add_option("--passes", passes, "KA passes over the training data")->capture_default_str();
        app->add_option("--ridge", ridge, "Linear ridge epsilon, or 'auto'")->capture_default_str();
    }

    LearnerSpec resolve(std::uint64_t seed) const
    {
        LearnerSpec spec;
        spec.kind = learner_kind_from_string(kind);
        spec.seed = seed;
        spec.ka.addends = addends;
        spec.ka.inner_nodes = inner_nodes;
        spec.ka.outer_nodes = outer_nodes;
        spec.ka.mu = mu;
        spec.ka.passes = passes;
        spec.ka.validate();
        if (ridge != "auto") {
            const auto v = parse_double(ridge);
            if (!v || *v < 0.0)
                throw std::invalid_argument("--ridge expects 'auto' or a non-negative number");
            spec.linear.ridge = *v;
        }
        return spec;
    }
};

struct Common {
    std::string out;
    int threads = 0;
};

std::string format(double v, int digits = 4)
{
    if (std::isnan(v))
        return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

/// Echo of every option value of a subcommand, for run manifests.
json resolved_options(const CLI::App* app)
{
    json out = json::object();
    for (const CLI::Option* opt : app->get_options()) {
        if (opt->get_lnames().empty() || opt->get_lnames().front() == "help")
            continue;
        const auto& name = opt->get_lnames().front();
        const auto results = opt->results();
        if (!results.empty())
            out[name] = results.size() == 1 ? json(results.front()) : json(results);
        else if (!opt->get_default_str().empty())
            out[name] = opt->get_default_str();
        else if (opt->get_type_size() == 0)
            out[name] = false;
    }
    return out;
}

void write_run_manifest(const fs::path& dir, const CLI::App* sub, json extra = json::object())
{
    json m{{"tool", "ddr"}, {"command", sub->get_name()}, {"options", resolved_options(sub)}};
    for (auto& [k, v] : extra.items())
        m[k] = v;
    write_json(dir / "run_manifest.json", m);
}

void write_steps_csv(const fs::path& path, const std::vector<StepReport>& steps)
{
    std::ostringstream o;
    o << "step,clusters,mean_abs_residual\n";
    for (const auto& s : steps)
        o << s.step << ',' << s.clusters << ',' << to_text(s.mean_abs_residual) << '\n';
    write_text(path, o.str());
}

void print_step(const StepReport& s)
{
    std::cout << "step " << s.step << ": " << s.clusters << " clusters, mean |residual| "
              << format(s.mean_abs_residual, 6) << std::endl;
}

CsvOptions csv_options(const std::string& column, char delimiter)
{
    CsvOptions o;
    o.delimiter = delimiter;
    if (!column.empty()) {
        char* end = nullptr;
        const long idx = std::strtol(column.c_str(), &end, 10);
        if (end && *end == '\0')
            o.output_column = idx;
        else
            o.output_column = column;
    }
    return o;
}

char delimiter_from(const std::string& s)
{
    if (s == "tab" || s == "\\t")
        return '\t';
    if (s.size() != 1)
        throw std::invalid_argument("delimiter must be a single character or 'tab'");
    return s[0];
}

/// Probe inputs: one row per probe, all columns are inputs, optional header.
std::vector<std::vector<double>> read_probes(const fs::path& path, char delimiter)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open probe file '" + path.string() + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty())
            continue;
        std::vector<double> row;
        bool numeric = true;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, delimiter)) {
            const auto v = parse_double(trim(cell));
            if (!v) {
                numeric = false;
                break;
            }
            row.push_back(*v);
        }
        if (!numeric) {
            if (rows.empty() && line_no == 1)
                continue; // header
            throw DataError("probe file line " + std::to_string(line_no) + ": non-numeric cell");
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw DataError("probe file line " + std::to_string(line_no) + ": ragged row");
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw DataError("probe file '" + path.string() + "' has no rows");
    return rows;
}

void ecdf_csv(const fs::path& path, const std::vector<double>& sample)
{
    std::ostringstream o;
    write_ecdf_csv(o, Ecdf(sample));
    write_text(path, o.str());
}

// ---------------------------------------------------------------------------

int cmd_synth(const CLI::App* sub, const Common& common, std::size_t n, std::uint64_t seed, double noise,
              const std::string& file)
{
    const fs::path dir = resolve_output_dir(common.out);
    DirectoryLock lock(dir);
    const Dataset data = generate_synthetic({noise, formula2_dim, seed}, n);
    write_csv(dir / file, data);
    write_run_manifest(dir, sub,
                       {{"records", data.size()},
                        {"dataset_fingerprint", json(to_hex(data.fingerprint()))},
                        {"file", file}});
    std::cout << "wrote " << data.size() << " records to " << (dir / file).string() << '\n';
    return 0;
}

struct TrainOptions {
    std::string data;
    std::string output_column;
    std::string delimiter = ",";
    std::string schedule = "1,2,3,5,7,11,17,23,29";
    std::string baseline = "ddr";
    std::size_t w = 29;
    std::size_t sliding_length = 0;
    std::size_t sliding_stride = 0;
    std::uint64_t seed = 1;
    bool no_normalize = false;
};

int cmd_train(const CLI::App* sub, const Common& common, const TrainOptions& o, const LearnerOptions& lo)
{
    const fs::path dir = resolve_output_dir(common.out);
    DirectoryLock lock(dir);
    const Dataset raw = load_csv(o.data, csv_options(o.output_column, delimiter_from(o.delimiter)));
    NormalizationMaps maps = NormalizationMaps::identity(raw.dim());
    Dataset data = raw;
    if (!o.no_normalize)
        std::tie(data, maps) = normalize(raw);

    StoredEnsemble stored;
    stored.manifest.learner = lo.resolve(o.seed);
    stored.manifest.seed = o.seed;
    stored.manifest.records = data.size();
    stored.manifest.dataset_fingerprint = raw.fingerprint();
    stored.manifest.normalization = maps;

    std::vector<StepReport> steps;
    BuildOptions opts;
    opts.on_step = [&](const StepReport& s) {
        steps.push_back(s);
        print_step(s);
    };
    if (o.baseline == "random") {
        stored.manifest.method = "random";
        stored.manifest.schedule = {o.w};
        auto r = build_random_disjoint_ensemble(data, o.w, stored.manifest.learner, o.seed);
        stored.main = std::move(r.ensemble);
    } else if (o.baseline == "ddr") {
        const auto schedule = DivisionSchedule::parse(o.schedule);
        schedule.validate_for(data.size());
        stored.manifest.schedule = schedule.counts();
        auto r = build_ensemble(data, schedule, stored.manifest.learner, opts);
        stored.main = std::move(r.ensemble);
        if (o.sliding_length > 0) {
            stored.manifest.has_sliding = true;
            stored.manifest.sliding = {o.sliding_length, o.sliding_stride ? o.sliding_stride : o.sliding_length};
            stored.manifest.sliding.validate_for(data.size());
            stored.sliding = build_sliding_ensemble(data, r.order, stored.manifest.sliding, stored.manifest.learner);
        }
    } else {
        throw std::invalid_argument("--baseline must be 'ddr' or 'random'");
    }
    save_ensemble(dir, stored);
    write_steps_csv(dir / "steps.csv", steps);
    write_run_manifest(dir, sub);
    std::cout << "saved " << stored.main.size() << " models";
    if (stored.manifest.has_sliding)
        std::cout << " and " << stored.sliding.size() << " sliding-window models";
    std::cout << " to " << dir.string() << '\n';
    return 0;
}

struct EcdfOptions {
    std::string ensemble;
    std::string probes;
    std::string delimiter = ",";
    bool paper_probes = false;
    bool oracle = false;
    std::size_t oracle_size = 100000;
    double noise = 0.4;
    std::uint64_t seed = 1;
    std::string use = "auto";
};

int cmd_ecdf(const CLI::App* sub, const Common& common, const EcdfOptions& o)
{
    const fs::path dir = resolve_output_dir(common.out);
    DirectoryLock lock(dir);
    const StoredEnsemble stored = load_ensemble(o.ensemble);
    bool use_sliding = stored.manifest.has_sliding;
    if (o.use == "main")
        use_sliding = false;
    else if (o.use == "sliding" && !stored.manifest.has_sliding)
        throw std::invalid_argument("the ensemble has no sliding-window models");
    const Ensemble& ensemble = use_sliding ? stored.sliding : stored.main;

    std::vector<std::vector<double>> probes;
    if (o.paper_probes)
        probes = paper_probes();
    else if (!o.probes.empty())
        probes = read_probes(o.probes, delimiter_from(o.delimiter));
    else
        throw std::invalid_argument("give --probes FILE or --paper-probes");

    const auto& maps = stored.manifest.normalization;
    std::ostringstream ks;
    ks << "probe,samples,statistic,critical,pass\n";
    for (std::size_t p = 0; p < probes.size(); ++p) {
        if (probes[p].size() != ensemble.dim())
            throw DataError("probe " + std::to_string(p + 1) + " has " + std::to_string(probes[p].size()) +
                            " inputs, the ensemble expects " + std::to_string(ensemble.dim()));
        const auto x = maps.forward_input(probes[p]);
        auto sample = ensemble.predict_sample(x);
        for (auto& v : sample)
            v = maps.denormalize_output(v);
        std::sort(sample.begin(), sample.end());
        const std::string tag = "probe" + std::to_string(p + 1);
        ecdf_csv(dir / ("ecdf_" + tag + ".csv"), sample);

        SvgChart chart("ECDF at " + tag, "y", "F(y)");
        chart.add({"ensemble (" + std::to_string(sample.size()) + " models)", "#555555", ecdf_points(sample), true});
        if (o.oracle) {
            if (probes[p].size() != formula2_dim)
                throw DataError("the synthetic oracle needs 5 inputs per probe");
            const auto oracle = oracle_sample(probes[p], o.oracle_size, oracle_seed(o.seed, p), o.noise);
            ecdf_csv(dir / ("oracle_ecdf_" + tag + ".csv"), oracle);
            const auto r = ks_two_sample(sample, oracle);
            ks << p + 1 << ',' << sample.size() << ',' << to_text(r.statistic) << ',' << to_text(r.critical) << ','
               << (r.pass ? "pass" : "fail") << '\n';
            chart.add({"Monte-Carlo oracle", "#000000", ecdf_points(oracle), true});
            std::cout << tag << ": D = " << format(r.statistic) << ", critical " << format(r.critical) << ", "
                      << (r.pass ? "pass" : "fail") << '\n';
        } else {
            std::cout << tag << ": " << sample.size() << "-point ECDF written\n";
        }
        chart.write(dir / ("ecdf_" + tag + ".svg"));
    }
    if (o.oracle)
        write_text(dir / "ks.csv", ks.str());
    write_run_manifest(dir, sub, {{"ensemble_models", ensemble.size()}, {"sliding", use_sliding}});
    return 0;
}

struct BenchOptions {
    std::size_t n = 200000;
    std::size_t points = 100;
    std::size_t oracle_size = 20000;
    std::size_t sliding_length = 6000;
    std::size_t sliding_stride = 1000;
    bool no_sliding = false;
    std::size_t w = 0;
    std::string schedule = "1,2,3,5,7,11,17,23,29";
    std::uint64_t seed = 1;
    double noise = 0.4;
    bool paper_scale = false;
};

json correlations_json(const Correlations& c) { return {{"mean", c.mean}, {"std", c.stddev}}; }

int cmd_benchmark(const CLI::App* sub, const Common& common, const BenchOptions& o, const LearnerOptions& lo)
{
    const fs::path dir = resolve_output_dir(common.out);
    DirectoryLock lock(dir);
    BenchmarkConfig cfg = o.paper_scale ? BenchmarkConfig::paper_scale() : BenchmarkConfig{};
    auto given = [&](const char* name) { return sub->get_option(name)->count() > 0; };
    if (!o.paper_scale || given("--n"))
        cfg.records = o.n;
    if (!o.paper_scale || given("--oracle-size"))
        cfg.oracle_size = o.oracle_size;
    if (!o.paper_scale || given("--sliding-length"))
        cfg.window.length = o.sliding_length;
    if (!o.paper_scale || given("--sliding-stride"))
        cfg.window.stride = o.sliding_stride;
    cfg.points = o.points;
    cfg.sliding = !o.no_sliding;
    cfg.random_clusters = o.w;
    cfg.schedule = DivisionSchedule::parse(o.schedule);
    cfg.seed = o.seed;
    cfg.noise = o.noise;
    cfg.learner = lo.resolve(o.seed);
    if (cfg.points == 0)
        throw std::invalid_argument("--points must be at least 1");

    std::cout << "benchmark: N = " << cfg.records << ", " << cfg.points << " probes, oracle " << cfg.oracle_size
              << " samples\n";
    BuildOptions opts;
    opts.on_step = print_step;
    const BenchmarkReport r = run_benchmark(cfg, opts);

    std::ostringstream csv;
    csv << "probe,x1,x2,x3,x4,x5,oracle_mean,oracle_std,ddr_mean,ddr_std,ddr_D,ddr_pass,random_mean,random_std,"
           "random_D,random_pass";
    if (cfg.sliding)
        csv << ",sliding_mean,sliding_std,sliding_D,sliding_pass";
    csv << '\n';
    for (std::size_t p = 0; p < r.probes.size(); ++p) {
        const auto& q = r.probes[p];
        csv << p + 1;
        for (double v : q.x)
            csv << ',' << to_text(v);
        csv << ',' << to_text(q.oracle.mean) << ',' << to_text(q.oracle.stddev) << ',' << to_text(q.ddr.mean) << ','
            << to_text(q.ddr.stddev) << ',' << to_text(q.ks_ddr.statistic) << ',' << q.ks_ddr.pass << ','
            << to_text(q.random.mean) << ',' << to_text(q.random.stddev) << ',' << to_text(q.ks_random.statistic)
            << ',' << q.ks_random.pass;
        if (cfg.sliding)
            csv << ',' << to_text(q.sliding->mean) << ',' << to_text(q.sliding->stddev) << ','
                << to_text(q.ks_sliding->statistic) << ',' << q.ks_sliding->pass;
        csv << '\n';
    }
    write_text(dir / "probes.csv", csv.str());
    write_steps_csv(dir / "steps.csv", r.steps);

    json summary{{"records", cfg.records},
                 {"points", cfg.points},
                 {"oracle_size", cfg.oracle_size},
                 {"ddr_models", r.ddr_models},
                 {"random_models", r.random_models},
                 {"ks_pass", {{"ddr", r.ddr_passes}, {"random", r.random_passes}}},
                 {"pearson", {{"ddr", correlations_json(r.ddr_corr)}, {"random", correlations_json(r.random_corr)}}},
                 {"mean_std",
                  {{"oracle", r.oracle_mean_std}, {"ddr", r.ddr_mean_std}, {"random", r.random_mean_std}}},
                 {"seconds", {{"build", r.build_seconds}, {"total", r.total_seconds}}}};
    if (cfg.sliding) {
        summary["sliding_models"] = r.sliding_models;
        summary["ks_pass"]["sliding"] = *r.sliding_passes;
        summary["pearson"]["sliding"] = correlations_json(*r.sliding_corr);
    }
    write_json(dir / "summary.json", summary);

    // Fig. 5 style: model moments against oracle moments, one point per probe
    for (const bool stddev : {false, true}) {
        SvgChart chart(stddev ? "Standard deviation per probe" : "Mean per probe", "oracle", "ensemble");
        std::vector<std::pair<double, double>> d, rnd, diag;
        double lo_v = 1e300, hi_v = -1e300;
        for (const auto& q : r.probes) {
            const double ov = stddev ? q.oracle.stddev : q.oracle.mean;
            d.emplace_back(ov, stddev ? q.ddr.stddev : q.ddr.mean);
            rnd.emplace_back(ov, stddev ? q.random.stddev : q.random.mean);
            lo_v = std::min(lo_v, ov);
            hi_v = std::max(hi_v, ov);
        }
        diag = {{lo_v, lo_v}, {hi_v, hi_v}};
        chart.add({"y = x", "#bbbbbb", diag});
        chart.add({"DDR", "#1f5fbf", d, false, true});
        chart.add({"random disjoint", "#c0392b", rnd, false, true});
        chart.write(dir / (stddev ? "fig5_std.svg" : "fig5_mean.svg"));
    }
    write_run_manifest(dir, sub);

    std::cout << "KS passes: DDR " << r.ddr_passes << "/" << cfg.points << ", random " << r.random_passes << "/"
              << cfg.points;
    if (cfg.sliding)
        std::cout << ", sliding window " << *r.sliding_passes << "/" << cfg.points;
    std::cout << "\nPearson mean: DDR " << format(r.ddr_corr.mean) << ", random " << format(r.random_corr.mean)
              << "\nPearson std:  DDR " << format(r.ddr_corr.stddev) << ", random " << format(r.random_corr.stddev)
              << "\nmean std: oracle " << format(r.oracle_mean_std) << ", DDR " << format(r.ddr_mean_std)
              << ", random " << format(r.random_mean_std) << "\ntime " << format(r.total_seconds, 1) << " s\n";
    return 0;
}

struct WineOptions {
    std::string data;
    std::string output_column;
    std::string delimiter = ";";
    std::string schedule = "1,2,3,5,7,11,17,23,29";
    std::vector<std::uint64_t> split_seeds{1, 2, 3};
    double train_fraction = 0.85;
    std::uint64_t seed = 1;
};

int cmd_wine(const CLI::App* sub, const Common& common, const WineOptions& o, const LearnerOptions& lo)
{
    const fs::path dir = resolve_output_dir(common.out);
    DirectoryLock lock(dir);
    const Dataset data = load_csv(o.data, csv_options(o.output_column, delimiter_from(o.delimiter)));
    WineConfig cfg;
    cfg.schedule = DivisionSchedule::parse(o.schedule);
    cfg.learner = lo.resolve(o.seed);
    cfg.train_fraction = o.train_fraction;

    std::ostringstream csv;
    csv << "split_seed,train_records,validation_records,validation_rmse,mean_sample_std\n";
    std::vector<double> rmses, stds;
    json runs = json::array();
    for (auto s : o.split_seeds) {
        cfg.split_seed = s;
        const auto r = run_wine(data, cfg);
        csv << s << ',' << r.train_records << ',' << r.validation_records << ',' << to_text(r.validation_rmse) << ','
            << to_text(r.mean_sample_std) << '\n';
        rmses.push_back(r.validation_rmse);
        stds.push_back(r.mean_sample_std);
        runs.push_back({{"split_seed", s}, {"rmse", r.validation_rmse}, {"mean_std", r.mean_sample_std},
                        {"seconds", r.seconds}});
        std::cout << "split " << s << ": RMSE " << format(r.validation_rmse) << ", mean STDV "
                  << format(r.mean_sample_std) << " (" << format(r.seconds, 1) << " s)\n";
    }
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const auto n = v.size();
        return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    };
    write_text(dir / "wine.csv", csv.str());
    write_json(dir / "summary.json",
               {{"records", data.size()}, {"runs", runs}, {"median_rmse", median(rmses)},
                {"median_mean_std", median(stds)}, {"dataset_fingerprint", to_hex(data.fingerprint())}});
    write_run_manifest(dir, sub);
    std::cout << "median RMSE " << format(median(rmses)) << ", median mean STDV " << format(median(stds)) << '\n';
    return 0;
}

struct VarianceOptions {
    std::size_t n = 100000;
    std::size_t points = 100;
    std::size_t oracle_size = 20000;
    std::string schedule = "1,2,3,5,7,11,17,23,29";
    std::uint64_t seed = 1;
    double noise = 0.4;
};

int cmd_variance(const CLI::App* sub, const Common& common, const VarianceOptions& o, const LearnerOptions& lo)
{
    const fs::path dir = resolve_output_dir(common.out);
    DirectoryLock lock(dir);
    VarianceConfig cfg;
    cfg.records = o.n;
    cfg.points = o.points;
    cfg.oracle_size = o.oracle_size;
    cfg.schedule = DivisionSchedule::parse(o.schedule);
    cfg.seed = o.seed;
    cfg.noise = o.noise;
    cfg.learner = lo.resolve(o.seed);
    BuildOptions opts;
    opts.on_step = print_step;
    const auto r = run_variance(cfg, opts);

    std::ostringstream csv;
    csv << "probe,x1,x2,x3,x4,x5,oracle_mean,oracle_variance,ddr_mean,ddr_variance,two_model_mean,"
           "two_model_variance,clamped\n";
    for (std::size_t p = 0; p < r.rows.size(); ++p) {
        const auto& row = r.rows[p];
        csv << p + 1;
        for (double v : row.x)
            csv << ',' << to_text(v);
        csv << ',' << to_text(row.oracle_mean) << ',' << to_text(row.oracle_variance) << ',' << to_text(row.ddr_mean)
            << ',' << to_text(row.ddr_variance) << ',' << to_text(row.two_model_mean) << ','
            << to_text(row.two_model_variance) << ',' << row.clamped << '\n';
    }
    write_text(dir / "variance.csv", csv.str());
    write_json(dir / "summary.json",
               {{"records", cfg.records},
                {"points", cfg.points},
                {"pearson",
                 {{"ddr", {{"mean", optional_json(r.ddr_mean_corr)}, {"variance", optional_json(r.ddr_variance_corr)}}},
                  {"two_model",
                   {{"mean", optional_json(r.two_model_mean_corr)},
                    {"variance", optional_json(r.two_model_variance_corr)}}}}},
                {"clamped_variance_predictions", r.clamped},
                {"seconds", r.seconds}});
    write_run_manifest(dir, sub);
    auto show = [](const std::optional<double>& v) { return v ? format(*v) : std::string("degenerate"); };
    std::cout << "Pearson (DDR ensemble):  mean " << show(r.ddr_mean_corr) << ", variance "
              << show(r.ddr_variance_corr) << "\nPearson (two-model):     mean " << show(r.two_model_mean_corr)
              << ", variance " << show(r.two_model_variance_corr) << "\nclamped variance predictions: " << r.clamped
              << '\n';
    return 0;
}

const std::vector<std::string> command_names{"synth", "train", "ecdf", "benchmark", "wine", "variance"};

std::string find_command(int argc, char** argv)
{
    for (int i = 1; i < argc; ++i)
        if (std::find(command_names.begin(), command_names.end(), argv[i]) != command_names.end())
            return argv[i];
    return {};
}

} // namespace
} // namespace ddr::cli

int main(int argc, char** argv)
{
    using namespace ddr::cli;
    CLI::App app{"Divisive data resorting: ensembles that sample conditional output distributions"};
    app.require_subcommand(1);
    app.fallthrough();
    app.config_formatter(std::make_shared<JsonConfig>(find_command(argc, argv)));
    app.set_config("--config", "", "JSON file with option values; command-line flags take priority");

    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", common.out, "Output directory (default $DDR_OUTPUT_DIR or ddr_out)");
        sub->add_option("--threads", common.threads, "OpenMP threads (0 = runtime default)");
    };

    std::size_t synth_n = 100000;
    std::uint64_t synth_seed = 1;
    double synth_noise = 0.4;
    std::string synth_file = "synthetic.csv";
    auto* synth = app.add_subcommand("synth", "Generate the synthetic stochastic dataset as CSV");
    synth->add_option("--n", synth_n, "Number of records")->capture_default_str();
    synth->add_option("--seed", synth_seed, "Random seed")->capture_default_str();
    synth->add_option("--noise", synth_noise, "Noise amplitude (0 = deterministic)")->capture_default_str();
    synth->add_option("--file", synth_file, "Output file name")->capture_default_str();
    add_common(synth);

    TrainOptions train_o;
    LearnerOptions train_l;
    auto* train = app.add_subcommand("train", "Build and save a DDR (or random-disjoint) ensemble from a CSV file");
    train->add_option("--data", train_o.data, "Training CSV")->required()->check(CLI::ExistingFile);
    train->add_option("--output-column", train_o.output_column, "Output column name or index (default: last)");
    train->add_option("--delimiter", train_o.delimiter, "CSV delimiter")->capture_default_str();
    train->add_option("--schedule", train_o.schedule, "Cluster counts per divisive step")->capture_default_str();
    train->add_option("--baseline", train_o.baseline, "ddr or random")->capture_default_str();
    train->add_option("--w", train_o.w, "Cluster count of the random baseline")->capture_default_str();
    train->add_option("--sliding-length", train_o.sliding_length, "Sliding window length r (0 = none)")
        ->capture_default_str();
    train->add_option("--sliding-stride", train_o.sliding_stride, "Sliding window stride d (0 = r)")
        ->capture_default_str();
    train->add_option("--seed", train_o.seed, "Master seed")->capture_default_str();
    train->add_flag("--no-normalize", train_o.no_normalize, "Train on raw values (inputs must lie in [0, 1])");
    train_l.attach(train);
    add_common(train);

    EcdfOptions ecdf_o;
    auto* ecdf = app.add_subcommand("ecdf", "Per-probe ensemble ECDFs, optionally against the synthetic oracle");
    ecdf->add_option("--ensemble", ecdf_o.ensemble, "Directory written by 'train'")->required();
    ecdf->add_option("--probes", ecdf_o.probes, "CSV of probe inputs")->check(CLI::ExistingFile);
    ecdf->add_option("--delimiter", ecdf_o.delimiter, "Probe CSV delimiter")->capture_default_str();
    ecdf->add_flag("--paper-probes", ecdf_o.paper_probes, "Use the four reference probes of the synthetic system");
    ecdf->add_flag("--oracle", ecdf_o.oracle, "Compare with a Monte-Carlo sample of the synthetic system");
    ecdf->add_option("--oracle-size", ecdf_o.oracle_size, "Monte-Carlo sample size")->capture_default_str();
    ecdf->add_option("--noise", ecdf_o.noise, "Noise amplitude of the oracle")->capture_default_str();
    ecdf->add_option("--seed", ecdf_o.seed, "Oracle seed")->capture_default_str();
    ecdf->add_option("--use", ecdf_o.use, "auto, main or sliding")->capture_default_str();
    add_common(ecdf);

    BenchOptions bench_o;
    LearnerOptions bench_l;
    auto* bench = app.add_subcommand("benchmark", "Distribution recovery on the synthetic system (KS and moments)");
    bench->add_option("--n", bench_o.n, "Training records")->capture_default_str();
    bench->add_option("--points", bench_o.points, "Random probe inputs")->capture_default_str();
    bench->add_option("--oracle-size", bench_o.oracle_size, "Monte-Carlo samples per probe")->capture_default_str();
    bench->add_option("--sliding-length", bench_o.sliding_length, "Sliding window length r")->capture_default_str();
    bench->add_option("--sliding-stride", bench_o.sliding_stride, "Sliding window stride d")->capture_default_str();
    bench->add_flag("--no-sliding", bench_o.no_sliding, "Skip the sliding-window ensemble");
    bench->add_option("--w", bench_o.w, "Random baseline clusters (0 = final schedule count)")->capture_default_str();
    bench->add_option("--schedule", bench_o.schedule, "Cluster counts per divisive step")->capture_default_str();
    bench->add_option("--seed", bench_o.seed, "Master seed")->capture_default_str();
    bench->add_option("--noise", bench_o.noise, "Noise amplitude")->capture_default_str();
    bench->add_flag("--paper-scale", bench_o.paper_scale,
                    "N = 1e6, r = 30000, d = 5000, 1e5-sample oracles (explicit flags still win)");
    bench_l.attach(bench);
    add_common(bench);

    WineOptions wine_o;
    LearnerOptions wine_l;
    auto* wine = app.add_subcommand("wine", "Validation RMSE and mean sample STDV on a wine-quality CSV");
    wine->add_option("--data", wine_o.data, "Wine quality CSV (UCI format)")->required()->check(CLI::ExistingFile);
    wine->add_option("--output-column", wine_o.output_column, "Output column name or index (default: last)");
    wine->add_option("--delimiter", wine_o.delimiter, "CSV delimiter")->capture_default_str();
    wine->add_option("--schedule", wine_o.schedule, "Cluster counts per divisive step")->capture_default_str();
    wine->add_option("--split-seeds", wine_o.split_seeds, "Seeds of the train/validation shuffles")
        ->capture_default_str();
    wine->add_option("--train-fraction", wine_o.train_fraction, "Training share")->capture_default_str();
    wine->add_option("--seed", wine_o.seed, "Learner seed")->capture_default_str();
    wine_l.attach(wine);
    add_common(wine);

    VarianceOptions var_o;
    LearnerOptions var_l;
    auto* variance = app.add_subcommand("variance", "Variance accuracy: DDR moments and the two-model method");
    variance->add_option("--n", var_o.n, "Training records")->capture_default_str();
    variance->add_option("--points", var_o.points, "Validation probes")->capture_default_str();
    variance->add_option("--oracle-size", var_o.oracle_size, "Monte-Carlo samples per probe")->capture_default_str();
    variance->add_option("--schedule", var_o.schedule, "Cluster counts per divisive step")->capture_default_str();
    variance->add_option("--seed", var_o.seed, "Master seed")->capture_default_str();
    variance->add_option("--noise", var_o.noise, "Noise amplitude")->capture_default_str();
    var_l.attach(variance);
    add_common(variance);

    CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
    if (common.threads > 0)
        omp_set_num_threads(common.threads);
#endif

    try {
        if (synth->parsed())
            return cmd_synth(synth, common, synth_n, synth_seed, synth_noise, synth_file);
        if (train->parsed())
            return cmd_train(train, common, train_o, train_l);
        if (ecdf->parsed())
            return cmd_ecdf(ecdf, common, ecdf_o);
        if (bench->parsed())
            return cmd_benchmark(bench, common, bench_o, bench_l);
        if (wine->parsed())
            return cmd_wine(wine, common, wine_o, wine_l);
        if (variance->parsed())
            return cmd_variance(variance, common, var_o, var_l);
    } catch (const std::exception& e) {
        std::cerr << "ddr: error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
