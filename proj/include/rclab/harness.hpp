#pragma once

#include <map>
#include <string>
#include <vector>

#include "rclab/condition.hpp"
#include "rclab/droplet.hpp"
#include "rclab/wulff.hpp"

namespace rclab {

// --- DropletStats CSV ---------------------------------------------------------

extern const char* kStatsCsvHeader;

std::string stats_csv_row(const DropletStats& s);
DropletStats stats_from_csv_row(const std::string& line);
std::vector<DropletStats> read_stats_csv(const std::string& text);

// --- scan driver ----------------------------------------------------------------

struct ScanPlan {
    std::vector<int> n_list;
    RcParams params;
    long samples_per_n = 200;
    long burnin_sweeps = 200;
    long thin = 10;
    int chains = 4;
    uint64_t seed = 0;
    int threads = 1;
    double box_factor = 2.5; // box half-width = ceil(box_factor * n)

    void validate() const;
};

struct ScanResult {
    // per n: csv text (header + rows) and per-n error notes (empty = ok)
    std::map<int, std::string> csv_by_n;
    std::map<int, std::string> errors_by_n;
    std::string manifest_json;
};

ScanResult run_scan(const ScanPlan& plan, const WulffShape& wulff);

// --- fits ------------------------------------------------------------------------

struct FitReport {
    std::string statistic;
    std::vector<int> n_values;
    std::vector<double> medians;
    std::vector<double> iqr_low, iqr_high;
    // pure power law: log median = a + b log n
    double exponent = 0, exponent_stderr = 0;
    // corrected form: log median = a + b log n + c log log n
    double corrected_exponent = 0, corrected_logpower = 0;
    std::vector<double> residuals;           // pure power-law residuals
    std::vector<double> normalized_ratio;    // statistic / paper normalization
};

// statistic in {"mlr", "mfl"}; needs >= 3 distinct n values
FitReport fit_scaling(const std::vector<DropletStats>& rows, const std::string& statistic);

std::string fit_report_to_json(const FitReport& r);

struct TailReport {
    int n = 0;
    long samples = 0;
    std::vector<double> t_bins;        // bin left edges
    std::vector<double> log_survival;  // log P(EXC >= t n) at each edge
    double slope = 0, slope_stderr = 0;
    double slope_ci_low = 0, slope_ci_high = 0; // 95% interval
    std::vector<int> non_monotone_bins;
};

// survival curve of EXC/n at a single n; needs >= 200 samples
TailReport tail_report(const std::vector<DropletStats>& rows, int n, int bins = 12);

std::string tail_report_to_json(const TailReport& r);

// --- SVG plots --------------------------------------------------------------------

struct PlotSeries {
    std::string name;
    std::vector<double> x, y;
};

// self-contained SVG scatter/line plot; log-log when requested.  Data points
// carry data-x/data-y attributes so tests can re-extract exact values.
std::string svg_plot(const std::string& title, const std::vector<PlotSeries>& series,
                     bool loglog);

// medians vs n (log-log) from a fit report
std::string svg_fit_plot(const FitReport& r);
std::string svg_tail_plot(const TailReport& r);

// --- run metadata ------------------------------------------------------------------

std::string params_metadata_json(const RcParams& params);

} // namespace rclab
