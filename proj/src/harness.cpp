#include "rclab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace rclab {

const char* kStatsCsvHeader =
    "n,seed,stream,sample_index,area,exc,mlr,mfl,mlrf,gd,cen_x,cen_y,"
    "theta_rg_max,mprg,rg_count";

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string stats_csv_row(const DropletStats& s) {
    std::ostringstream os;
    os << s.n << ',' << s.seed << ',' << s.stream << ',' << s.sample_index << ','
       << s.area << ',' << s.exc << ',' << fmt_double(s.mlr) << ','
       << fmt_double(s.mfl) << ',' << fmt_double(s.mlrf) << ',' << fmt_double(s.gd)
       << ',' << s.cen.x << ',' << s.cen.y << ',' << fmt_double(s.theta_rg_max)
       << ',' << fmt_double(s.mprg) << ',' << s.rg_count;
    return os.str();
}

DropletStats stats_from_csv_row(const std::string& line) {
    std::vector<std::string> f;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            f.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    f.push_back(cur);
    if (f.size() != 15) throw InputError("bad stats csv row: " + line);
    DropletStats s;
    s.n = std::stoi(f[0]);
    s.seed = std::stoull(f[1]);
    s.stream = std::stoull(f[2]);
    s.sample_index = std::stoll(f[3]);
    s.area = std::stoll(f[4]);
    s.exc = std::stoll(f[5]);
    s.mlr = std::stod(f[6]);
    s.mfl = std::stod(f[7]);
    s.mlrf = std::stod(f[8]);
    s.gd = std::stod(f[9]);
    s.cen = {std::stoll(f[10]), std::stoll(f[11])};
    s.theta_rg_max = std::stod(f[12]);
    s.mprg = std::stod(f[13]);
    s.rg_count = std::stoi(f[14]);
    return s;
}

std::vector<DropletStats> read_stats_csv(const std::string& text) {
    std::vector<DropletStats> out;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line.rfind("n,", 0) == 0) continue;
        out.push_back(stats_from_csv_row(line));
    }
    return out;
}

// --- scan -------------------------------------------------------------------------

void ScanPlan::validate() const {
    for (size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] <= n_list[i - 1])
            throw InputError("n_list must be strictly increasing");
    auto [pc, bcrit] = critical_point(params.q);
    if (!(params.p < pc)) throw InputError("scan needs subcritical parameters");
    if (chains < 1 || samples_per_n < 1 || thin < 1 || burnin_sweeps < 0)
        throw InputError("bad scan plan sizes");
}

ScanResult run_scan(const ScanPlan& plan, const WulffShape& wulff) {
    plan.validate();
    ScanResult out;
    nlohmann::json manifest;
    manifest["version"] = "rclab 1.0.0";
    manifest["seed"] = plan.seed;
    manifest["params"] = nlohmann::json::parse(params_metadata_json(plan.params));
    manifest["samples_per_n"] = plan.samples_per_n;
    manifest["burnin_sweeps"] = plan.burnin_sweeps;
    manifest["thin"] = plan.thin;
    manifest["chains"] = plan.chains;
    manifest["box_factor"] = plan.box_factor;
    manifest["q0"] = wulff.q0;
    manifest["c0"] = wulff.c0;
    manifest["irreducibility_assumption"] =
        "single-edge dynamics restricted to the area event assumed irreducible";
    auto& per_n = manifest["per_n"] = nlohmann::json::array();

    for (int n : plan.n_list) {
        int L = (int)std::ceil(plan.box_factor * n);
        nlohmann::json nrec;
        nrec["n"] = n;
        nrec["L"] = L;
        try {
            ConditionSpec spec{n};
            auto geom = make_box(L);
            spec.validate(*geom);
            long per_chain = (plan.samples_per_n + plan.chains - 1) / plan.chains;
            std::vector<std::vector<DropletStats>> chain_rows(plan.chains);
            std::vector<std::string> chain_errors(plan.chains);
            std::vector<long> chain_rejects(plan.chains, 0);

            auto run_chain = [&](int ci) {
                try {
                    SplitRng rng(plan.seed, ((uint64_t)n << 20) | (uint64_t)ci);
                    ConstrainedChain chain(geom, plan.params, spec, rng);
                    for (long s = 0; s < plan.burnin_sweeps; ++s) chain.sweep();
                    long got = 0;
                    while (got < per_chain) {
                        for (long t = 0; t < plan.thin; ++t) chain.sweep();
                        DropletStats st = droplet_stats(chain.state(), n, wulff);
                        st.seed = plan.seed;
                        st.stream = ((uint64_t)n << 20) | (uint64_t)ci;
                        st.sample_index = got;
                        chain_rows[ci].push_back(st);
                        ++got;
                    }
                    chain_rejects[ci] = chain.rejected_flips();
                } catch (const std::exception& ex) {
                    chain_errors[ci] = ex.what();
                }
            };

            if (plan.threads > 1) {
                std::vector<std::thread> pool;
                int active = 0;
                for (int ci = 0; ci < plan.chains; ++ci) {
                    pool.emplace_back(run_chain, ci);
                    if (++active >= plan.threads) {
                        for (auto& th : pool) th.join();
                        pool.clear();
                        active = 0;
                    }
                }
                for (auto& th : pool) th.join();
            } else {
                for (int ci = 0; ci < plan.chains; ++ci) run_chain(ci);
            }

            for (int ci = 0; ci < plan.chains; ++ci)
                if (!chain_errors[ci].empty()) throw InternalError(chain_errors[ci]);

            std::ostringstream csv;
            csv << kStatsCsvHeader << '\n';
            long emitted = 0;
            for (int ci = 0; ci < plan.chains && emitted < plan.samples_per_n; ++ci)
                for (const auto& row : chain_rows[ci]) {
                    if (emitted >= plan.samples_per_n) break;
                    csv << stats_csv_row(row) << '\n';
                    ++emitted;
                }
            out.csv_by_n[n] = csv.str();
            nrec["rows"] = emitted;
            long rej = 0;
            for (long r : chain_rejects) rej += r;
            nrec["rejected_flips"] = rej;
            nrec["streams"] = nlohmann::json::array();
            for (int ci = 0; ci < plan.chains; ++ci)
                nrec["streams"].push_back(((uint64_t)n << 20) | (uint64_t)ci);
        } catch (const std::exception& ex) {
            out.errors_by_n[n] = ex.what();
            nrec["error"] = ex.what();
        }
        per_n.push_back(nrec);
    }
    out.manifest_json = manifest.dump(2);
    return out;
}

// --- fits -------------------------------------------------------------------------

namespace {

double median_of(std::vector<double> v) {
    if (v.empty()) throw InputError("median of empty sample");
    std::sort(v.begin(), v.end());
    size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double quantile_of(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    double pos = q * (double)(v.size() - 1);
    size_t i = (size_t)pos;
    double t = pos - (double)i;
    return i + 1 < v.size() ? (1 - t) * v[i] + t * v[i + 1] : v[i];
}

// ordinary least squares for y = X b; returns coefficients and the
// covariance scale (X^T X)^{-1}
struct Ls2 {
    double b0, b1, se1;
    std::vector<double> residuals;
};

Ls2 fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double det = n * sxx - sx * sx;
    if (det == 0) throw InputError("degenerate fit: constant abscissa");
    Ls2 out;
    out.b1 = (n * sxy - sx * sy) / det;
    out.b0 = (sy - out.b1 * sx) / n;
    double ss = 0;
    out.residuals.resize(n);
    for (size_t i = 0; i < n; ++i) {
        out.residuals[i] = y[i] - out.b0 - out.b1 * x[i];
        ss += out.residuals[i] * out.residuals[i];
    }
    double dof = n > 2 ? (double)(n - 2) : 1.0;
    out.se1 = std::sqrt(ss / dof * n / det);
    return out;
}

} // namespace

FitReport fit_scaling(const std::vector<DropletStats>& rows, const std::string& statistic) {
    std::map<int, std::vector<double>> by_n;
    for (const auto& r : rows) {
        double v;
        if (statistic == "mlr") v = r.mlr;
        else if (statistic == "mfl") v = r.mfl;
        else throw InputError("fit_scaling knows statistics mlr and mfl");
        by_n[r.n].push_back(v);
    }
    if (by_n.size() < 3) throw InputError("fit needs at least 3 distinct n values");

    FitReport rep;
    rep.statistic = statistic;
    std::vector<double> lx, ly;
    for (auto& [n, vals] : by_n) {
        rep.n_values.push_back(n);
        double med = median_of(vals);
        rep.medians.push_back(med);
        rep.iqr_low.push_back(quantile_of(vals, 0.25));
        rep.iqr_high.push_back(quantile_of(vals, 0.75));
        if (!(med > 0)) throw InputError("degenerate data: non-positive median");
        lx.push_back(std::log((double)n));
        ly.push_back(std::log(med));
    }
    bool constant = true;
    for (double v : ly)
        if (v != ly.front()) constant = false;
    if (constant) throw InputError("degenerate data: constant statistic");

    Ls2 pure = fit_line(lx, ly);
    rep.exponent = pure.b1;
    rep.exponent_stderr = pure.se1;
    rep.residuals = pure.residuals;

    // corrected form log m = a + b log n + c log log n via normal equations
    size_t m = lx.size();
    double A[3][4] = {};
    for (size_t i = 0; i < m; ++i) {
        double row[3] = {1.0, lx[i], std::log(lx[i])};
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) A[r][c] += row[r] * row[c];
            A[r][3] += row[r] * ly[i];
        }
    }
    // gaussian elimination
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
        std::swap(A[col], A[piv]);
        if (std::fabs(A[col][col]) < 1e-12) throw InputError("corrected fit is singular");
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            double f = A[r][col] / A[col][col];
            for (int c = col; c < 4; ++c) A[r][c] -= f * A[col][c];
        }
    }
    rep.corrected_exponent = A[1][3] / A[1][1];
    rep.corrected_logpower = A[2][3] / A[2][2];

    for (size_t i = 0; i < m; ++i) {
        double n = (double)rep.n_values[i];
        double norm = statistic == "mlr"
                          ? std::pow(n, 1.0 / 3) * std::pow(std::log(n), 2.0 / 3)
                          : std::pow(n, 2.0 / 3) * std::pow(std::log(n), 1.0 / 3);
        rep.normalized_ratio.push_back(rep.medians[i] / norm);
    }
    return rep;
}

std::string fit_report_to_json(const FitReport& r) {
    nlohmann::json j;
    j["statistic"] = r.statistic;
    j["n"] = r.n_values;
    j["median"] = r.medians;
    j["iqr_low"] = r.iqr_low;
    j["iqr_high"] = r.iqr_high;
    j["exponent"] = r.exponent;
    j["exponent_stderr"] = r.exponent_stderr;
    j["corrected_exponent"] = r.corrected_exponent;
    j["corrected_logpower"] = r.corrected_logpower;
    j["residuals"] = r.residuals;
    j["normalized_ratio"] = r.normalized_ratio;
    return j.dump(2);
}

TailReport tail_report(const std::vector<DropletStats>& rows, int n, int bins) {
    std::vector<double> ts;
    for (const auto& r : rows)
        if (r.n == n) ts.push_back((double)r.exc / (double)n);
    if ((long)ts.size() < 200)
        throw InputError("tail report needs at least 200 samples at n=" + std::to_string(n));
    std::sort(ts.begin(), ts.end());
    double tmax = quantile_of(ts, 0.99);
    if (!(tmax > 0)) tmax = 1.0;

    TailReport rep;
    rep.n = n;
    rep.samples = (long)ts.size();
    double prev_s = INFINITY;
    double log_floor = std::log(0.5 / (double)ts.size());
    std::vector<double> fx, fy;
    for (int b = 0; b < bins; ++b) {
        double t = tmax * b / (bins - 1);
        long cnt = (long)(ts.end() - std::lower_bound(ts.begin(), ts.end(), t));
        if (cnt == 0) {
            // survival dropped to zero: record the floor and stop
            rep.t_bins.push_back(t);
            rep.log_survival.push_back(log_floor);
            break;
        }
        double s = (double)cnt / (double)ts.size();
        rep.t_bins.push_back(t);
        rep.log_survival.push_back(std::log(s));
        if (s >= prev_s && b > 0) rep.non_monotone_bins.push_back(b);
        prev_s = s;
        fx.push_back(t);
        fy.push_back(std::log(s));
    }
    if (fx.size() < 3) {
        rep.slope = rep.slope_stderr = std::nan("");
        rep.slope_ci_low = rep.slope_ci_high = std::nan("");
        return rep;
    }
    Ls2 fit = fit_line(fx, fy);
    rep.slope = fit.b1;
    rep.slope_stderr = fit.se1;
    rep.slope_ci_low = fit.b1 - 1.96 * fit.se1;
    rep.slope_ci_high = fit.b1 + 1.96 * fit.se1;
    return rep;
}

std::string tail_report_to_json(const TailReport& r) {
    nlohmann::json j;
    j["n"] = r.n;
    j["samples"] = r.samples;
    j["t"] = r.t_bins;
    j["log_survival"] = r.log_survival;
    j["slope"] = r.slope;
    j["slope_stderr"] = r.slope_stderr;
    j["slope_ci"] = {r.slope_ci_low, r.slope_ci_high};
    j["non_monotone_bins"] = r.non_monotone_bins;
    return j.dump(2);
}

// --- SVG ---------------------------------------------------------------------------

namespace {

struct AxisMap {
    double xmin, xmax, ymin, ymax;
    bool loglog;
    static constexpr double W = 640, H = 420, ML = 70, MR = 20, MT = 40, MB = 50;

    double tx(double x) const {
        double v = loglog ? std::log10(x) : x;
        double lo = loglog ? std::log10(xmin) : xmin, hi = loglog ? std::log10(xmax) : xmax;
        if (hi == lo) hi = lo + 1;
        return ML + (v - lo) / (hi - lo) * (W - ML - MR);
    }
    double ty(double y) const {
        double v = loglog ? std::log10(y) : y;
        double lo = loglog ? std::log10(ymin) : ymin, hi = loglog ? std::log10(ymax) : ymax;
        if (hi == lo) hi = lo + 1;
        return H - MB - (v - lo) / (hi - lo) * (H - MT - MB);
    }
};

} // namespace

std::string svg_plot(const std::string& title, const std::vector<PlotSeries>& series,
                     bool loglog) {
    AxisMap ax{1e300, -1e300, 1e300, -1e300, loglog};
    bool any = false;
    for (const auto& s : series) {
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (loglog && (s.x[i] <= 0 || s.y[i] <= 0)) continue;
            ax.xmin = std::min(ax.xmin, s.x[i]);
            ax.xmax = std::max(ax.xmax, s.x[i]);
            ax.ymin = std::min(ax.ymin, s.y[i]);
            ax.ymax = std::max(ax.ymax, s.y[i]);
            any = true;
        }
    }
    if (!any) {
        ax.xmin = loglog ? 1 : 0;
        ax.xmax = loglog ? 10 : 1;
        ax.ymin = loglog ? 1 : 0;
        ax.ymax = loglog ? 10 : 1;
    }

    const char* colors[] = {"#1f6fb2", "#c23c2a", "#2f8c57", "#8157ad", "#b38718"};
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << AxisMap::W
       << "\" height=\"" << AxisMap::H << "\" viewBox=\"0 0 " << AxisMap::W << ' '
       << AxisMap::H << "\">\n";
    os << "<g data-xmin=\"" << fmt_double(ax.xmin) << "\" data-xmax=\""
       << fmt_double(ax.xmax) << "\" data-ymin=\"" << fmt_double(ax.ymin)
       << "\" data-ymax=\"" << fmt_double(ax.ymax) << "\" data-loglog=\""
       << (loglog ? 1 : 0) << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << AxisMap::W << "\" height=\"" << AxisMap::H
       << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << AxisMap::W / 2 << "\" y=\"24\" text-anchor=\"middle\" "
          "font-family=\"sans-serif\" font-size=\"15\">"
       << title << "</text>\n";
    // axes
    os << "<line x1=\"" << AxisMap::ML << "\" y1=\"" << AxisMap::H - AxisMap::MB
       << "\" x2=\"" << AxisMap::W - AxisMap::MR << "\" y2=\""
       << AxisMap::H - AxisMap::MB << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << AxisMap::ML << "\" y1=\"" << AxisMap::MT << "\" x2=\""
       << AxisMap::ML << "\" y2=\"" << AxisMap::H - AxisMap::MB
       << "\" stroke=\"black\"/>\n";

    int si = 0;
    for (const auto& s : series) {
        const char* col = colors[si % 5];
        os << "<g data-series=\"" << s.name << "\">\n";
        os << "<polyline fill=\"none\" stroke=\"" << col << "\" points=\"";
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (loglog && (s.x[i] <= 0 || s.y[i] <= 0)) continue;
            os << fmt_double(ax.tx(s.x[i])) << ',' << fmt_double(ax.ty(s.y[i])) << ' ';
        }
        os << "\"/>\n";
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (loglog && (s.x[i] <= 0 || s.y[i] <= 0)) continue;
            os << "<circle cx=\"" << fmt_double(ax.tx(s.x[i])) << "\" cy=\""
               << fmt_double(ax.ty(s.y[i])) << "\" r=\"3\" fill=\"" << col
               << "\" data-x=\"" << fmt_double(s.x[i]) << "\" data-y=\""
               << fmt_double(s.y[i]) << "\"/>\n";
        }
        os << "</g>\n";
        ++si;
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

std::string svg_fit_plot(const FitReport& r) {
    PlotSeries med{"median " + r.statistic, {}, {}};
    for (size_t i = 0; i < r.n_values.size(); ++i) {
        med.x.push_back((double)r.n_values[i]);
        med.y.push_back(r.medians[i]);
    }
    char title[128];
    std::snprintf(title, sizeof title, "%s vs n (log-log), exponent %.3f",
                  r.statistic.c_str(), r.exponent);
    return svg_plot(title, {med}, true);
}

std::string svg_tail_plot(const TailReport& r) {
    PlotSeries s{"log survival", r.t_bins, r.log_survival};
    char title[128];
    std::snprintf(title, sizeof title, "EXC/n tail at n=%d, slope %.3f", r.n, r.slope);
    return svg_plot(title, {s}, false);
}

std::string params_metadata_json(const RcParams& params) {
    nlohmann::json j;
    auto [pc, bcrit] = critical_point(params.q);
    j["p"] = params.p;
    j["q"] = params.q;
    j["bc"] = bc_name(params.bc);
    j["beta"] = params.beta();
    j["c_be"] = params.c_be();
    j["p_c"] = pc;
    j["beta_c"] = bcrit;
    if (params.p > 0 && params.p < 1) {
        j["p_star"] = params.p_star();
        j["beta_star"] = params.beta_star();
    }
    return j.dump(2);
}

} // namespace rclab
