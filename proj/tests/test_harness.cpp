#include "doctest.h"

#include <cmath>

#include "rclab/harness.hpp"

using namespace rclab;

TEST_SUITE_BEGIN("harness");

TEST_CASE("stats csv row round trip and header skipping") {
    DropletStats s;
    s.n = 16;
    s.seed = 42;
    s.stream = 3;
    s.sample_index = 7;
    s.area = 300;
    s.exc = 44;
    s.mlr = 1.25;
    s.mfl = 7.5;
    s.mlrf = 6.5;
    s.gd = 2.75;
    s.cen = {-3, 5};
    s.theta_rg_max = 0.31;
    s.mprg = 4.2;
    s.rg_count = 19;
    std::string text = std::string(kStatsCsvHeader) + "\n" + stats_csv_row(s) + "\n";
    auto rows = read_stats_csv(text);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].n == 16);
    CHECK(rows[0].area == 300);
    CHECK(rows[0].mlr == 1.25);
    CHECK(rows[0].cen == Point{-3, 5});
    CHECK(stats_csv_row(rows[0]) == stats_csv_row(s));
}

namespace {

std::vector<DropletStats> synthetic_rows(const std::vector<int>& ns,
                                         const std::function<double(double)>& f) {
    std::vector<DropletStats> rows;
    for (int n : ns) {
        for (int i = 0; i < 5; ++i) {
            DropletStats s;
            s.n = n;
            s.mlr = f((double)n);
            s.mfl = f((double)n);
            rows.push_back(s);
        }
    }
    return rows;
}

} // namespace

TEST_CASE("fit_scaling recovers exact power laws") {
    auto rows = synthetic_rows({8, 16, 32, 64},
                               [](double n) { return std::pow(n, 1.0 / 3.0); });
    FitReport r = fit_scaling(rows, "mlr");
    CHECK(r.exponent == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    CHECK(r.exponent_stderr < 1e-9);

    auto rows2 = synthetic_rows({8, 16, 32, 64, 128}, [](double n) {
        return std::pow(n, 1.0 / 3.0) * std::pow(std::log(n), 2.0 / 3.0);
    });
    FitReport r2 = fit_scaling(rows2, "mfl");
    CHECK(r2.corrected_exponent == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
    CHECK(r2.corrected_logpower == doctest::Approx(2.0 / 3.0).epsilon(1e-6));

    // normalization ratio per the scaling forms
    for (size_t i = 0; i < r2.n_values.size(); ++i) {
        double n = r2.n_values[i];
        double expect = r2.medians[i] /
                        (std::pow(n, 2.0 / 3.0) * std::pow(std::log(n), 1.0 / 3.0));
        CHECK(r2.normalized_ratio[i] == doctest::Approx(expect).epsilon(1e-12));
    }

    CHECK_THROWS_AS(fit_scaling(synthetic_rows({8, 16}, [](double) { return 2.0; }), "mlr"),
                    InputError);
    CHECK_THROWS_AS(
        fit_scaling(synthetic_rows({8, 16, 32}, [](double) { return 2.0; }), "mlr"),
        InputError);
    CHECK_THROWS_AS(fit_scaling(rows, "gd"), InputError);
}

TEST_CASE("fit report json is stable across refits") {
    auto rows = synthetic_rows({8, 16, 32, 64},
                               [](double n) { return std::pow(n, 0.5); });
    std::string a = fit_report_to_json(fit_scaling(rows, "mlr"));
    std::string b = fit_report_to_json(fit_scaling(rows, "mlr"));
    CHECK(a == b);
}

TEST_CASE("tail report: exponential synthetic slope and degenerate data") {
    SplitRng rng(55, 0);
    std::vector<DropletStats> rows;
    int n = 24;
    double c = 2.0;
    for (int i = 0; i < 5000; ++i) {
        DropletStats s;
        s.n = n;
        double u = rng.uniform01();
        s.exc = (int64_t)std::llround(-std::log(1 - u) / c * n);
        rows.push_back(s);
    }
    TailReport r = tail_report(rows, n);
    CHECK(r.slope < 0);
    CHECK(r.slope_ci_low < -c * 0.7);
    CHECK(r.slope_ci_high > -c * 1.4);
    CHECK(r.samples == 5000);

    std::vector<DropletStats> few(rows.begin(), rows.begin() + 100);
    CHECK_THROWS_AS(tail_report(few, n), InputError);

    // all excess zero: the survival curve drops to the floor immediately
    std::vector<DropletStats> zeros;
    for (int i = 0; i < 500; ++i) {
        DropletStats s;
        s.n = n;
        s.exc = 0;
        zeros.push_back(s);
    }
    TailReport z = tail_report(zeros, n);
    REQUIRE(z.t_bins.size() >= 2);
    CHECK(z.log_survival.front() == doctest::Approx(0.0));
    CHECK(z.log_survival.back() <= std::log(0.5 / 500) + 1e-9);
    CHECK(std::isnan(z.slope));
}

namespace {

// minimal well-formedness scan: tags balance and attributes are quoted
bool xml_well_formed(const std::string& svg) {
    std::vector<std::string> stack;
    size_t i = 0;
    if (svg.rfind("<?xml", 0) == 0) i = svg.find("?>") + 2;
    while (i < svg.size()) {
        size_t lt = svg.find('<', i);
        if (lt == std::string::npos) break;
        size_t gt = svg.find('>', lt);
        if (gt == std::string::npos) return false;
        std::string tag = svg.substr(lt + 1, gt - lt - 1);
        if (!tag.empty() && tag[0] == '/') {
            std::string name = tag.substr(1);
            if (stack.empty() || stack.back() != name) return false;
            stack.pop_back();
        } else if (!tag.empty() && tag.back() != '/') {
            std::string name = tag.substr(0, tag.find_first_of(" \t\n"));
            stack.push_back(name);
        }
        i = gt + 1;
    }
    return stack.empty();
}

std::vector<std::pair<double, double>> extract_data_points(const std::string& svg) {
    std::vector<std::pair<double, double>> out;
    size_t i = 0;
    while ((i = svg.find("data-x=\"", i)) != std::string::npos) {
        size_t e1 = svg.find('"', i + 8);
        double x = std::stod(svg.substr(i + 8, e1 - i - 8));
        size_t j = svg.find("data-y=\"", e1);
        size_t e2 = svg.find('"', j + 8);
        double y = std::stod(svg.substr(j + 8, e2 - j - 8));
        out.push_back({x, y});
        i = e2;
    }
    return out;
}

double attr_of(const std::string& svg, const std::string& name) {
    size_t i = svg.find(name + "=\"");
    REQUIRE(i != std::string::npos);
    size_t s = i + name.size() + 2;
    return std::stod(svg.substr(s, svg.find('"', s) - s));
}

} // namespace

TEST_CASE("svg plots: well-formed, data points recoverable, empty handled") {
    std::string empty = svg_plot("nothing", {}, false);
    CHECK(xml_well_formed(empty));
    CHECK(extract_data_points(empty).empty());

    auto rows = synthetic_rows({8, 16, 32, 64},
                               [](double n) { return std::pow(n, 0.41); });
    FitReport r = fit_scaling(rows, "mlr");
    std::string svg = svg_fit_plot(r);
    CHECK(xml_well_formed(svg));
    auto pts = extract_data_points(svg);
    REQUIRE(pts.size() == r.n_values.size());
    for (size_t i = 0; i < pts.size(); ++i) {
        CHECK(pts[i].first == doctest::Approx((double)r.n_values[i]).epsilon(1e-15));
        CHECK(pts[i].second == doctest::Approx(r.medians[i]).epsilon(1e-15));
    }
    // cx positions are consistent with the declared log axes
    double xmin = attr_of(svg, "data-xmin"), xmax = attr_of(svg, "data-xmax");
    size_t c0 = svg.find("<circle cx=\"");
    double cx0 = std::stod(svg.substr(c0 + 12, svg.find('"', c0 + 12) - c0 - 12));
    double expect = 70 + (std::log10(pts[0].first) - std::log10(xmin)) /
                             (std::log10(xmax) - std::log10(xmin)) * (640 - 70 - 20);
    CHECK(cx0 == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("params metadata json carries the derived quantities") {
    std::string j = params_metadata_json(RcParams(0.3, 2, Bc::free));
    CHECK(j.find("\"c_be\"") != std::string::npos);
    CHECK(j.find("\"p_star\"") != std::string::npos);
    CHECK(j.find("\"p_c\"") != std::string::npos);
    CHECK(j.find("\"beta\"") != std::string::npos);
}

TEST_CASE("run_scan: accounting, determinism, per-n error recording") {
    ScanPlan plan;
    plan.n_list = {4, 6};
    plan.params = RcParams(0.3, 1, Bc::free);
    plan.samples_per_n = 6;
    plan.burnin_sweeps = 20;
    plan.thin = 3;
    plan.chains = 2;
    plan.seed = 314;
    WulffShape disc = disc_wulff();
    ScanResult r1 = run_scan(plan, disc);
    ScanResult r2 = run_scan(plan, disc);
    CHECK(r1.csv_by_n == r2.csv_by_n);
    CHECK(r1.manifest_json == r2.manifest_json);
    for (int n : plan.n_list) {
        auto rows = read_stats_csv(r1.csv_by_n.at(n));
        CHECK((long)rows.size() == plan.samples_per_n);
        for (auto& row : rows) {
            CHECK(row.n == n);
            CHECK(row.exc == row.area - (int64_t)n * n);
            CHECK(row.mlrf <= row.mfl + 1e-12);
        }
    }

    // threads do not change the output
    ScanPlan threaded = plan;
    threaded.threads = 2;
    ScanResult r3 = run_scan(threaded, disc);
    CHECK(r3.csv_by_n == r1.csv_by_n);

    // empty n list: manifest only
    ScanPlan empty = plan;
    empty.n_list = {};
    ScanResult re = run_scan(empty, disc);
    CHECK(re.csv_by_n.empty());
    CHECK(!re.manifest_json.empty());

    // infeasible n recorded, scan continues
    ScanPlan infeasible = plan;
    infeasible.n_list = {10, 41};
    infeasible.box_factor = 0.51;
    infeasible.samples_per_n = 2;
    infeasible.burnin_sweeps = 5;
    ScanResult ri = run_scan(infeasible, disc);
    CHECK(ri.csv_by_n.count(10) == 1);
    CHECK(ri.errors_by_n.count(41) == 1);
    CHECK(ri.manifest_json.find("error") != std::string::npos);
}

TEST_SUITE_END();
