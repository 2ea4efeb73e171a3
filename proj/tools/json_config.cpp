#include "json_config.hpp"

namespace ddr::cli {

namespace {

std::string scalar(const nlohmann::json& v)
{
    if (v.is_string())
        return v.get<std::string>();
    if (v.is_boolean())
        return v.get<bool>() ? "true" : "false";
    if (v.is_null())
        return {};
    return v.dump();
}

void collect(const nlohmann::json& obj, const std::vector<std::string>& parents,
             std::vector<CLI::ConfigItem>& items)
{
    for (const auto& [key, value] : obj.items()) {
        if (value.is_object()) {
            auto next = parents;
            next.push_back(key);
            collect(value, next, items);
            continue;
        }
        CLI::ConfigItem item;
        item.parents = parents;
        item.name = key;
        if (value.is_array()) {
            for (const auto& v : value)
                item.inputs.push_back(scalar(v));
        } else {
            item.inputs.push_back(scalar(value));
        }
        items.push_back(std::move(item));
    }
}

} // namespace

std::string JsonConfig::to_config(const CLI::App* app, bool default_also, bool, std::string) const
{
    nlohmann::json out = nlohmann::json::object();
    for (const CLI::Option* opt : app->get_options()) {
        if (opt->get_lnames().empty() || !opt->get_configurable())
            continue;
        const auto& name = opt->get_lnames().front();
        const auto results = opt->results();
        if (!results.empty())
            out[name] = results.size() == 1 ? nlohmann::json(results.front()) : nlohmann::json(results);
        else if (default_also && !opt->get_default_str().empty())
            out[name] = opt->get_default_str();
    }
    return out.dump(2);
}

std::vector<CLI::ConfigItem> JsonConfig::from_config(std::istream& input) const
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(input);
    } catch (const nlohmann::json::exception& e) {
        throw CLI::ConversionError(std::string("invalid JSON config: ") + e.what());
    }
    if (!j.is_object())
        throw CLI::ConversionError("JSON config must be an object");
    // a block named after the running command overrides flat keys
    nlohmann::json flat = nlohmann::json::object();
    for (const auto& [key, value] : j.items())
        if (!value.is_object())
            flat[key] = value;
    if (!section_.empty() && j.contains(section_) && j[section_].is_object())
        for (const auto& [key, value] : j[section_].items())
            flat[key] = value;
    std::vector<CLI::ConfigItem> items;
    collect(flat, section_.empty() ? std::vector<std::string>{} : std::vector<std::string>{section_}, items);
    return items;
}

} // namespace ddr::cli
