#include "sshq/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "sshq/config.hpp"
#include "sshq/errors.hpp"

namespace sshq {

namespace {

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name, const std::filesystem::path& path) const {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return i;
        }
        throw InputError(path.string() + ": missing column " + name);
    }
};

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

Csv read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("missing output file " + path.string());
    Csv csv;
    std::string line;
    if (!std::getline(in, line)) throw InputError(path.string() + ": empty file");
    csv.header = split_csv(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto row = split_csv(line);
        if (row.size() != csv.header.size()) throw InputError(path.string() + ": ragged row");
        csv.rows.push_back(std::move(row));
    }
    return csv;
}

double cell_value(const std::string& s) {
    if (s == "nan") return std::nan("");
    return std::stod(s);
}

bool has_flag(const std::string& flags, const std::vector<std::string>& wanted) {
    std::stringstream ss(flags);
    std::string f;
    while (std::getline(ss, f, ';')) {
        if (std::find(wanted.begin(), wanted.end(), f) != wanted.end()) return true;
    }
    return false;
}

/// Rows that are nan, or carry one of `skip_flags`, count as missing.
SeriesDeviation compare(const Csv& csv, const std::filesystem::path& path, const std::string& value, const std::string& ref, bool angular,
                        const std::vector<std::string>& skip_flags = {}) {
    SeriesDeviation d;
    d.file = path.filename().string();
    d.series = value;
    d.reference = ref;
    const auto vi = csv.column(value, path);
    const auto ri = csv.column(ref, path);
    const auto fi = skip_flags.empty() ? 0 : csv.column("flags", path);
    double sq = 0.0;
    for (const auto& row : csv.rows) {
        const double v = cell_value(row[vi]);
        const double r = cell_value(row[ri]);
        if (std::isnan(v) || std::isnan(r) || (!skip_flags.empty() && has_flag(row[fi], skip_flags))) {
            ++d.missing;
            continue;
        }
        const double diff = angular ? wrapped_angle_difference(v, r) : v - r;
        d.max_abs = std::max(d.max_abs, std::abs(diff));
        sq += diff * diff;
        ++d.points;
    }
    d.rms = d.points ? std::sqrt(sq / static_cast<double>(d.points)) : std::nan("");
    return d;
}

std::vector<std::filesystem::path> run_dirs(const std::filesystem::path& dir) {
    if (std::filesystem::exists(dir / "manifest.txt")) return {dir};
    std::vector<std::filesystem::path> out;
    if (std::filesystem::is_directory(dir)) {
        for (const auto& entry : std::filesystem::directory_iterator(dir)) {
            if (entry.is_directory() && std::filesystem::exists(entry.path() / "manifest.txt")) out.push_back(entry.path());
        }
    }
    std::sort(out.begin(), out.end());
    if (out.empty()) throw InputError("no manifest.txt under " + dir.string());
    return out;
}

} // namespace

double wrapped_angle_difference(double a, double b) {
    return std::remainder(a - b, 2.0 * std::numbers::pi);
}

Report compare_report(const std::filesystem::path& dir) {
    Report report;
    for (const auto& rd : run_dirs(dir)) {
        const auto cfg = load_config(rd / "manifest.txt");
        const std::string name = rd == dir ? "." : rd.filename().string();
        auto add = [&](SeriesDeviation d) {
            d.run = name;
            report.series.push_back(std::move(d));
        };
        if (cfg.outputs.entropy) {
            const auto p = rd / "entropy.csv";
            const auto csv = read_csv(p);
            add(compare(csv, p, "raw", "oracle", false));
            add(compare(csv, p, "mitigated", "oracle", false));
        }
        if (cfg.outputs.twist) {
            for (const char* f : {"twist.csv", "particle_twist.csv"}) {
                const auto p = rd / f;
                const auto csv = read_csv(p);
                for (const char* part : {"re", "im"}) {
                    add(compare(csv, p, fmt::format("{}_raw", part), fmt::format("{}_exact", part), false));
                    add(compare(csv, p, fmt::format("{}_post", part), fmt::format("{}_exact", part), false));
                }
            }
        }
        if (cfg.outputs.berry) {
            const auto p = rd / "berry.csv";
            const auto csv = read_csv(p);
            add(compare(csv, p, "gamma_raw", "gamma_exact", true, {"raw_unreliable", "exact_unreliable"}));
            add(compare(csv, p, "gamma_post", "gamma_exact", true, {"post_empty", "post_unreliable", "exact_unreliable"}));
        }
    }
    std::string text = fmt::format("{:<10} {:<20} {:<10} {:<10} {:>6} {:>7} {:>14} {:>14}\n", "run", "file", "series", "reference", "points",
                                   "missing", "max_abs_dev", "rms_dev");
    for (const auto& d : report.series) {
        text += fmt::format("{:<10} {:<20} {:<10} {:<10} {:>6} {:>7} {:>14.6g} {:>14.6g}\n", d.run, d.file, d.series, d.reference, d.points,
                            d.missing, d.max_abs, d.rms);
    }
    report.text = text;
    std::ofstream out(dir / "summary.txt", std::ios::binary);
    if (!out) throw InputError("cannot write " + (dir / "summary.txt").string());
    out << text;
    return report;
}

} // namespace sshq
