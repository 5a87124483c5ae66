#pragma once

// Deviation summary of a finished run directory against its oracle columns.

#include <filesystem>
#include <string>
#include <vector>

namespace sshq {

struct SeriesDeviation {
    std::string run;    // subdirectory ("." for a single-state run)
    std::string file;
    std::string series; // e.g. "raw" or "gamma_post"
    std::string reference;
    std::size_t points = 0;
    /// Rows that are nan, or whose Berry phase is flagged unreliable.
    std::size_t missing = 0;
    double max_abs = 0.0;
    double rms = 0.0;
};

struct Report {
    std::vector<SeriesDeviation> series;
    std::string text;
};

/// Reads the CSVs listed in each manifest below `dir`; writes and returns summary.txt.
/// Missing manifests or CSVs throw InputError.
Report compare_report(const std::filesystem::path& dir);

/// Angle difference wrapped into [-pi, pi].
double wrapped_angle_difference(double a, double b);

} // namespace sshq
