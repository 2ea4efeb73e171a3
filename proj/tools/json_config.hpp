#ifndef DDR_TOOLS_JSON_CONFIG_HPP
#define DDR_TOOLS_JSON_CONFIG_HPP

#include <CLI11.hpp>
#include <json.hpp>

#include <string>
#include <vector>

namespace ddr::cli {

/// CLI11 config reader for JSON files. Keys are long option names of the
/// running subcommand (`section`); an object under that subcommand's name
/// overrides flat keys, objects under other names are ignored. Command-line
/// flags take priority.
class JsonConfig : public CLI::Config {
public:
    explicit JsonConfig(std::string section = {}) : section_(std::move(section)) {}

    std::string to_config(const CLI::App* app, bool default_also, bool write_description,
                          std::string prefix) const override;
    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;

private:
    std::string section_;
};

} // namespace ddr::cli

#endif
