#include "artifacts.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

namespace ddr::cli {

std::filesystem::path resolve_output_dir(const std::string& flag_value)
{
    if (!flag_value.empty())
        return flag_value;
    if (const char* env = std::getenv(output_dir_env); env && *env)
        return env;
    return default_output_dir;
}

DirectoryLock::DirectoryLock(const std::filesystem::path& dir) : path_(dir / ".ddr.lock")
{
    std::filesystem::create_directories(dir);
    fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0)
        throw std::runtime_error("cannot create lockfile '" + path_.string() + "': " + std::strerror(errno));
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
        ::close(fd_);
        fd_ = -1;
        throw std::runtime_error("output directory '" + dir.string() + "' is in use by another ddr process");
    }
}

DirectoryLock::~DirectoryLock()
{
    if (fd_ >= 0) {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text))
        throw std::runtime_error("cannot write '" + path.string() + "'");
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value)
{
    write_text(path, value.dump(2) + "\n");
}

std::vector<std::pair<double, double>> ecdf_points(const std::vector<double>& sorted)
{
    std::vector<std::pair<double, double>> pts;
    const auto n = static_cast<double>(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i])
            continue;
        pts.emplace_back(sorted[i], static_cast<double>(i + 1) / n);
    }
    return pts;
}

// ---------------------------------------------------------------------------

SvgChart::SvgChart(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label))
{
}

namespace {

std::string fmt(double v, const char* spec = "%.4g")
{
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

std::string SvgChart::render(int width, int height) const
{
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series_)
        for (const auto& [x, y] : s.points) {
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    if (!(x0 <= x1)) {
        x0 = y0 = 0.0;
        x1 = y1 = 1.0;
    }
    if (x1 - x0 < 1e-12) {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if (y1 - y0 < 1e-12) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    const double left = 60, right = 20, top = 30, bottom = 45;
    const double pw = width - left - right, ph = height - top - bottom;
    auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto sy = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << width / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">" << escape(title_)
      << "</text>\n";
    o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = x0 + (x1 - x0) * i / 4.0, fy = y0 + (y1 - y0) * i / 4.0;
        o << "<text x=\"" << fmt(sx(fx), "%.1f") << "\" y=\"" << fmt(top + ph + 14, "%.1f")
          << "\" text-anchor=\"middle\">" << fmt(fx) << "</text>\n";
        o << "<text x=\"" << fmt(left - 4, "%.1f") << "\" y=\"" << fmt(sy(fy) + 4, "%.1f")
          << "\" text-anchor=\"end\">" << fmt(fy) << "</text>\n";
    }
    o << "<text x=\"" << fmt(left + pw / 2, "%.1f") << "\" y=\"" << height - 8 << "\" text-anchor=\"middle\">"
      << escape(x_label_) << "</text>\n";
    o << "<text x=\"14\" y=\"" << fmt(top + ph / 2, "%.1f") << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
      << fmt(top + ph / 2, "%.1f") << ")\">" << escape(y_label_) << "</text>\n";

    int legend_y = static_cast<int>(top) + 14;
    for (const auto& s : series_) {
        if (s.markers) {
            for (const auto& [x, y] : s.points)
                o << "<circle cx=\"" << fmt(sx(x), "%.2f") << "\" cy=\"" << fmt(sy(y), "%.2f")
                  << "\" r=\"2\" fill=\"" << s.color << "\"/>\n";
        } else if (!s.points.empty()) {
            o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
            if (s.step) {
                double prev = std::max(0.0, y0);
                o << fmt(sx(x0), "%.2f") << ',' << fmt(sy(prev), "%.2f") << ' ';
                for (const auto& [x, y] : s.points) {
                    o << fmt(sx(x), "%.2f") << ',' << fmt(sy(prev), "%.2f") << ' ';
                    o << fmt(sx(x), "%.2f") << ',' << fmt(sy(y), "%.2f") << ' ';
                    prev = y;
                }
                o << fmt(sx(x1), "%.2f") << ',' << fmt(sy(prev), "%.2f");
            } else {
                for (const auto& [x, y] : s.points)
                    o << fmt(sx(x), "%.2f") << ',' << fmt(sy(y), "%.2f") << ' ';
            }
            o << "\"/>\n";
        }
        o << "<text x=\"" << fmt(left + 8, "%.1f") << "\" y=\"" << legend_y << "\" fill=\"" << s.color << "\">"
          << escape(s.label) << "</text>\n";
        legend_y += 14;
    }
    o << "</svg>\n";
    return o.str();
}

void SvgChart::write(const std::filesystem::path& path) const { write_text(path, render()); }

} // namespace ddr::cli
