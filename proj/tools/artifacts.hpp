#ifndef DDR_TOOLS_ARTIFACTS_HPP
#define DDR_TOOLS_ARTIFACTS_HPP

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace ddr::cli {

/// Environment variable that overrides the default output directory.
inline constexpr const char* output_dir_env = "DDR_OUTPUT_DIR";
inline constexpr const char* default_output_dir = "ddr_out";

/// Explicit flag value, else $DDR_OUTPUT_DIR, else "ddr_out".
std::filesystem::path resolve_output_dir(const std::string& flag_value);

/// Exclusive advisory lock on <dir>/.ddr.lock for the lifetime of the object.
/// Released by the kernel if the process dies.
class DirectoryLock {
public:
    explicit DirectoryLock(const std::filesystem::path& dir);
    ~DirectoryLock();
    DirectoryLock(const DirectoryLock&) = delete;
    DirectoryLock& operator=(const DirectoryLock&) = delete;

private:
    int fd_ = -1;
    std::filesystem::path path_;
};

/// Writes <dir>/manifest.json (run manifests) with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& value);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Minimal static SVG chart: polylines or step functions on shared axes.
class SvgChart {
public:
    struct Series {
        std::string label;
        std::string color;
        std::vector<std::pair<double, double>> points;
        bool step = false;    // draw as a right-continuous step function
        bool markers = false; // draw points only
    };

    SvgChart(std::string title, std::string x_label, std::string y_label);
    void add(Series series) { series_.push_back(std::move(series)); }
    std::string render(int width = 640, int height = 420) const;
    void write(const std::filesystem::path& path) const;

private:
    std::string title_, x_label_, y_label_;
    std::vector<Series> series_;
};

/// Points of an ECDF step function for a sorted sample: (v_i, i/n).
std::vector<std::pair<double, double>> ecdf_points(const std::vector<double>& sorted);

} // namespace ddr::cli

#endif
