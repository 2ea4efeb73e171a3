#include "ddr/ensemble.hpp"
#include "ddr/json_io.hpp"
#include "ddr/text.hpp"

#include <fstream>
#include <sstream>

namespace ddr {

using nlohmann::json;

void to_json(json& j, const LearnerSpec& spec)
{
    j = json{{"kind", to_string(spec.kind)}, {"seed", spec.seed}};
    if (spec.kind == LearnerKind::linear) {
        j["ridge"] = spec.linear.ridge ? json(*spec.linear.ridge) : json("auto");
    } else {
        j["addends"] = spec.ka.addends;
        j["inner_nodes"] = spec.ka.inner_nodes;
        j["outer_nodes"] = spec.ka.outer_nodes;
        j["mu"] = spec.ka.mu;
        j["passes"] = spec.ka.passes;
    }
}

void from_json(const json& j, LearnerSpec& spec)
{
    spec = LearnerSpec{};
    spec.kind = learner_kind_from_string(j.at("kind").get<std::string>());
    spec.seed = j.value("seed", std::uint64_t{1});
    if (spec.kind == LearnerKind::linear) {
        if (j.contains("ridge") && j["ridge"].is_number())
            spec.linear.ridge = j["ridge"].get<double>();
    } else {
        spec.ka.addends = j.value("addends", spec.ka.addends);
        spec.ka.inner_nodes = j.value("inner_nodes", spec.ka.inner_nodes);
        spec.ka.outer_nodes = j.value("outer_nodes", spec.ka.outer_nodes);
        spec.ka.mu = j.value("mu", spec.ka.mu);
        spec.ka.passes = j.value("passes", spec.ka.passes);
    }
}

void to_json(json& j, const NormalizationMaps& maps)
{
    json inputs = json::array();
    for (const auto& c : maps.inputs)
        inputs.push_back({c.lo, c.hi});
    j = json{{"inputs", inputs}, {"output", {maps.output.lo, maps.output.hi}}};
}

void from_json(const json& j, NormalizationMaps& maps)
{
    maps.inputs.clear();
    for (const auto& c : j.at("inputs"))
        maps.inputs.push_back({c.at(0).get<double>(), c.at(1).get<double>()});
    maps.output = {j.at("output").at(0).get<double>(), j.at("output").at(1).get<double>()};
}

void to_json(json& j, const EnsembleManifest& m)
{
    j = json{{"format", "ddr-ensemble"},
             {"version", 1},
             {"method", m.method},
             {"learner", m.learner},
             {"schedule", m.schedule},
             {"seed", m.seed},
             {"records", m.records},
             {"dataset_fingerprint", to_hex(m.dataset_fingerprint)},
             {"normalization", m.normalization}};
    if (m.has_sliding)
        j["sliding_window"] = {{"length", m.sliding.length}, {"stride", m.sliding.stride}};
}

void from_json(const json& j, EnsembleManifest& m)
{
    if (j.value("format", std::string{}) != "ddr-ensemble")
        throw std::runtime_error("not an ensemble manifest");
    if (j.value("version", 0) != 1)
        throw std::runtime_error("unsupported ensemble manifest version");
    m.method = j.at("method").get<std::string>();
    m.learner = j.at("learner").get<LearnerSpec>();
    m.schedule = j.at("schedule").get<std::vector<std::size_t>>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.records = j.at("records").get<std::size_t>();
    m.dataset_fingerprint = std::stoull(j.at("dataset_fingerprint").get<std::string>(), nullptr, 16);
    m.normalization = j.at("normalization").get<NormalizationMaps>();
    m.has_sliding = j.contains("sliding_window");
    if (m.has_sliding) {
        m.sliding.length = j["sliding_window"].at("length").get<std::size_t>();
        m.sliding.stride = j["sliding_window"].at("stride").get<std::size_t>();
    }
}

// ---------------------------------------------------------------------------

void save_models(std::ostream& out, const Ensemble& ensemble)
{
    out << "ddr-models " << ensemble.size() << ' ' << ensemble.dim() << '\n';
    for (const auto& m : ensemble.models())
        m->save(out);
}

Ensemble load_models(std::istream& in)
{
    std::string magic;
    std::size_t count = 0, dim = 0;
    if (!(in >> magic >> count >> dim) || magic != "ddr-models")
        throw std::runtime_error("not a model collection");
    std::vector<ModelPtr> models;
    models.reserve(count);
    for (std::size_t k = 0; k < count; ++k)
        models.push_back(load_model(in));
    return Ensemble(std::move(models), dim);
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text))
        throw std::runtime_error("cannot write '" + path.string() + "'");
}

std::ifstream open_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open '" + path.string() + "'");
    return in;
}

} // namespace

void save_ensemble(const std::filesystem::path& dir, const StoredEnsemble& stored)
{
    std::filesystem::create_directories(dir);
    write_file(dir / "manifest.json", json(stored.manifest).dump(2) + "\n");
    std::ostringstream models;
    save_models(models, stored.main);
    write_file(dir / "models.txt", models.str());
    if (stored.manifest.has_sliding) {
        std::ostringstream sliding;
        save_models(sliding, stored.sliding);
        write_file(dir / "sliding.txt", sliding.str());
    }
}

StoredEnsemble load_ensemble(const std::filesystem::path& dir)
{
    StoredEnsemble stored;
    {
        auto in = open_file(dir / "manifest.json");
        stored.manifest = json::parse(in).get<EnsembleManifest>();
    }
    {
        auto in = open_file(dir / "models.txt");
        stored.main = load_models(in);
    }
    if (stored.manifest.has_sliding) {
        auto in = open_file(dir / "sliding.txt");
        stored.sliding = load_models(in);
    }
    return stored;
}

} // namespace ddr
