#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "rclab/harness.hpp"
#include "rclab/surgery.hpp"

namespace fs = std::filesystem;
using namespace rclab;

namespace {

struct Global {
    uint64_t seed = 0;
    int threads = 1;
    std::string out = ".";
    std::string config;
};

Point parse_point(const std::string& s) {
    auto comma = s.find(',');
    if (comma == std::string::npos) throw InputError("point must be 'x,y': " + s);
    return {std::stoll(s.substr(0, comma)), std::stoll(s.substr(comma + 1))};
}

// region spec: semicolon-separated "rect:x0,y0,x1,y1" items (edges with both
// endpoints inside a listed rectangle)
Region parse_region(const BoxGeom& g, const std::string& spec) {
    std::vector<uint8_t> mask(g.edge_count(), 0);
    std::stringstream ss(spec);
    std::string item;
    bool any = false;
    while (std::getline(ss, item, ';')) {
        if (item.rfind("rect:", 0) != 0)
            throw InputError("region items look like rect:x0,y0,x1,y1 -- got " + item);
        long x0, y0, x1, y1;
        if (std::sscanf(item.c_str() + 5, "%ld,%ld,%ld,%ld", &x0, &y0, &x1, &y1) != 4)
            throw InputError("bad rect: " + item);
        any = true;
        for (int e = 0; e < g.edge_count(); ++e) {
            auto [a, b] = g.edge_endpoints(e);
            auto inside = [&](Point p) {
                return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
            };
            if (inside(a) && inside(b)) mask[e] = 1;
        }
    }
    if (!any) throw InputError("empty region spec");
    return Region::from_mask(std::move(mask));
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InputError("cannot write " + path.string());
    os << content;
}

std::string read_file(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InputError("cannot read " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

WulffShape load_wulff(const std::string& file) {
    if (file.empty() || file == "disc") return disc_wulff();
    return wulff_from_json(read_file(file));
}

// splice config-file entries as flags right after the subcommand token; the
// user's own later flags win (TakeLast policy)
std::vector<std::string> apply_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string cfg_file;
    for (size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) cfg_file = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) cfg_file = args[i].substr(9);
    }
    if (cfg_file.empty()) return args;
    auto j = nlohmann::json::parse(read_file(cfg_file));
    std::vector<std::string> flags;
    for (auto& [key, val] : j.items()) {
        std::string v = val.is_string() ? val.get<std::string>()
                                        : nlohmann::json(val).dump();
        flags.push_back("--" + key + "=" + v);
    }
    // insert after the subcommand token (first non-flag argument)
    std::vector<std::string> out;
    bool spliced = false;
    for (const auto& a : args) {
        out.push_back(a);
        if (!spliced && !a.empty() && a[0] != '-') {
            out.insert(out.end(), flags.begin(), flags.end());
            spliced = true;
        }
    }
    if (!spliced) out.insert(out.end(), flags.begin(), flags.end());
    return out;
}

struct ParamFlags {
    double p = -1, beta = -1, q = 1;
    std::string bc = "free";

    void attach(CLI::App* app) {
        app->add_option("--p", p, "open probability");
        app->add_option("--beta", beta, "inverse temperature (excludes --p)");
        app->add_option("--q", q, "cluster weight, q >= 1");
        app->add_option("--bc", bc, "boundary condition: free|wired")
            ->check(CLI::IsMember({"free", "wired"}));
    }
    RcParams resolve() const {
        if (p >= 0 && beta >= 0) throw InputError("--p and --beta are mutually exclusive");
        Bc b = bc == "wired" ? Bc::wired : Bc::free;
        if (beta >= 0) return RcParams::from_beta(beta, q, b);
        return RcParams(p < 0 ? 0.5 : p, q, b);
    }
};

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rclab: planar random-cluster droplet laboratory"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.fallthrough(true);
    app.require_subcommand(1);

    Global g;
    app.add_option("--seed", g.seed, "base RNG seed");
    app.add_option("--threads", g.threads, "worker threads");
    app.add_option("--out", g.out, "output directory");
    app.add_option("--config", g.config, "JSON config file mirroring flags");

    // sample
    auto* sample = app.add_subcommand("sample", "draw unconditioned configurations");
    ParamFlags sample_params;
    sample_params.attach(sample);
    int sample_L = 8, sample_sweeps = 100, sample_count = 1;
    sample->add_option("--L", sample_L, "box half-width");
    sample->add_option("--sweeps", sample_sweeps, "heat-bath sweeps (q > 1)");
    sample->add_option("--count", sample_count, "number of snapshots");

    // exact-enum
    auto* enumc = app.add_subcommand("exact-enum", "exact law on a tiny box");
    ParamFlags enum_params;
    enum_params.attach(enumc);
    int enum_L = 1, enum_n = 0;
    enumc->add_option("--L", enum_L, "box half-width (edge count <= 20)");
    enumc->add_option("--n", enum_n, "condition on area >= n^2 (0 = unconditioned)");

    // condition
    auto* cond = app.add_subcommand("condition", "conditioned chain sampling");
    ParamFlags cond_params;
    cond_params.attach(cond);
    int cond_n = 8, cond_L = 0, cond_chains = 2;
    long cond_sweeps = 2000, cond_thin = 10, cond_burnin = 200;
    std::string cond_wulff;
    cond->add_option("--n", cond_n, "area floor n (event area >= n^2)");
    cond->add_option("--L", cond_L, "box half-width (default ceil(2.5 n))");
    cond->add_option("--sweeps", cond_sweeps, "post-burn-in sweeps per chain");
    cond->add_option("--thin", cond_thin, "emit every thin-th sweep");
    cond->add_option("--chains", cond_chains, "independent chains");
    cond->add_option("--burnin", cond_burnin, "burn-in sweeps");
    cond->add_option("--wulff", cond_wulff, "wulff JSON file or 'disc'");
    bool cond_fixed_area = false;
    cond->add_flag("--fixed-area", cond_fixed_area,
                   "condition on area == n^2 (not supported)");

    // measure
    auto* meas = app.add_subcommand("measure", "droplet statistics of snapshots");
    std::vector<std::string> meas_in;
    int meas_n = 8;
    std::string meas_wulff;
    meas->add_option("--in", meas_in, "snapshot files")->required();
    meas->add_option("--n", meas_n, "conditioning scale n");
    meas->add_option("--wulff", meas_wulff, "wulff JSON file or 'disc'");

    // wulff-estimate
    auto* we = app.add_subcommand("wulff-estimate", "xi estimation and Wulff build");
    ParamFlags we_params;
    we_params.attach(we);
    int we_dirs = 256, we_kmax = 12;
    long we_samples = 2000;
    double we_c1 = 0.4, we_C1 = 1.2;
    we->add_option("--dirs", we_dirs, "angular grid size (multiple of 8)");
    we->add_option("--kmax", we_kmax, "largest k in the regression");
    we->add_option("--samples", we_samples, "Monte Carlo samples");
    we->add_option("--c1", we_c1, "annulus constant c1");
    we->add_option("--C1", we_C1, "annulus constant C1");

    // surgery
    auto* surg = app.add_subcommand("surgery", "storage-replacement operations");
    std::string surg_op = "sector", surg_in, surg_x = "1,0", surg_y = "0,1";
    std::string surg_F, surg_G, surg_shift = "0,0", surg_wulff;
    double surg_eps = 0.1;
    int surg_sweeps = 200;
    surg->add_option("--op", surg_op, "sector|shift")
        ->check(CLI::IsMember({"sector", "shift"}));
    surg->add_option("--in", surg_in, "input snapshot")->required();
    surg->add_option("--x", surg_x, "sector point x as 'a,b'");
    surg->add_option("--y", surg_y, "sector point y as 'a,b'");
    surg->add_option("--F", surg_F, "kept region (shift op)");
    surg->add_option("--G", surg_G, "translated region (shift op)");
    surg->add_option("--shift", surg_shift, "translation vector 'dx,dy'");
    surg->add_option("--eps", surg_eps, "good-area-capture epsilon");
    surg->add_option("--resample-sweeps", surg_sweeps, "conditional resample sweeps (q > 1)");
    surg->add_option("--wulff", surg_wulff, "wulff JSON for (q0,c0); default disc");

    // scan
    auto* scan = app.add_subcommand("scan", "scaling scan over n");
    ParamFlags scan_params;
    scan_params.attach(scan);
    std::string scan_nlist = "12,16,24,32", scan_wulff;
    long scan_samples = 200, scan_thin = 10, scan_burnin = 200;
    int scan_chains = 4;
    scan->add_option("--n-list", scan_nlist, "comma-separated n values");
    scan->add_option("--samples", scan_samples, "samples per n");
    scan->add_option("--thin", scan_thin, "sweeps between samples");
    scan->add_option("--burnin", scan_burnin, "burn-in sweeps");
    scan->add_option("--chains", scan_chains, "chains per n");
    scan->add_option("--wulff", scan_wulff, "wulff JSON file or 'disc'");

    // fit
    auto* fit = app.add_subcommand("fit", "scaling fits from stats CSV");
    std::vector<std::string> fit_csv;
    std::string fit_stat = "mlr";
    fit->add_option("--csv", fit_csv, "stats CSV files")->required();
    fit->add_option("--statistic", fit_stat, "mlr|mfl")
        ->check(CLI::IsMember({"mlr", "mfl"}));

    // report
    auto* rep = app.add_subcommand("report", "SVG plots from stats CSV");
    std::vector<std::string> rep_csv;
    int rep_tail_n = 0;
    rep->add_option("--csv", rep_csv, "stats CSV files")->required();
    rep->add_option("--tail-n", rep_tail_n, "emit EXC tail plot at this n");

    try {
        auto args = apply_config(argc, argv);
        std::vector<const char*> cargs{argv[0]};
        for (const auto& a : args) cargs.push_back(a.c_str());
        app.parse((int)cargs.size(), cargs.data());

        fs::create_directories(g.out);

        if (*sample) {
            RcParams params = sample_params.resolve();
            for (int i = 0; i < sample_count; ++i) {
                SplitRng rng(g.seed, (uint64_t)i);
                BondConfig cfg = sample_fk(make_box(sample_L), params,
                                           params.q == 1.0 ? 1 : sample_sweeps, rng);
                std::ostringstream os;
                write_snapshot(os, cfg, params, g.seed);
                char name[64];
                std::snprintf(name, sizeof name, "sample_%04d.rcg", i);
                write_file(fs::path(g.out) / name, os.str());
            }
            write_file(fs::path(g.out) / "meta.json", params_metadata_json(params) + "\n");
        } else if (*enumc) {
            RcParams params = enum_params.resolve();
            auto geom = make_box(enum_L);
            ExactDistribution dist =
                enum_n > 0 ? exact_conditional_distribution(
                                 geom, params,
                                 [&](const BondConfig& c) {
                                     return constraint_satisfied(c, enum_n);
                                 })
                           : exact_distribution(geom, params);
            std::ostringstream os;
            os << "mask,probability\n";
            char buf[48];
            for (uint32_t mask = 0; mask < dist.prob.size(); ++mask) {
                std::snprintf(buf, sizeof buf, "%u,%.17g\n", mask, dist.prob[mask]);
                os << buf;
            }
            write_file(fs::path(g.out) / "exact.csv", os.str());
            write_file(fs::path(g.out) / "meta.json", params_metadata_json(params) + "\n");
        } else if (*cond) {
            if (cond_fixed_area)
                throw InputError(
                    "fixed-area conditioning {area == n^2} is out of scope; "
                    "only {area >= n^2} is supported");
            RcParams params = cond_params.resolve();
            int L = cond_L > 0 ? cond_L : (int)std::ceil(2.5 * cond_n);
            auto geom = make_box(L);
            WulffShape wulff = load_wulff(cond_wulff);
            ConditionSpec spec{cond_n};
            nlohmann::json manifest;
            manifest["version"] = "rclab 1.0.0";
            manifest["seed"] = g.seed;
            manifest["params"] = nlohmann::json::parse(params_metadata_json(params));
            manifest["n"] = cond_n;
            manifest["L"] = L;
            manifest["sweeps"] = cond_sweeps;
            manifest["thin"] = cond_thin;
            manifest["burnin"] = cond_burnin;
            manifest["chains"] = cond_chains;
            manifest["irreducibility_assumption"] =
                "single-edge dynamics restricted to the area event assumed irreducible";
            auto& chains_meta = manifest["per_chain"] = nlohmann::json::array();
            for (int ci = 0; ci < cond_chains; ++ci) {
                SplitRng rng(g.seed, (uint64_t)ci);
                ConstrainedChain chain(geom, params, spec, rng);
                for (long s = 0; s < cond_burnin; ++s) chain.sweep();
                std::ostringstream csv;
                csv << kStatsCsvHeader << '\n';
                long idx = 0;
                run_constrained_chain(chain, cond_sweeps, cond_thin,
                                      [&](long, const BondConfig& state) {
                                          DropletStats st = droplet_stats(state, cond_n, wulff);
                                          st.seed = g.seed;
                                          st.stream = (uint64_t)ci;
                                          st.sample_index = idx++;
                                          csv << stats_csv_row(st) << '\n';
                                      });
                char name[64];
                std::snprintf(name, sizeof name, "chain_%03d.csv", ci);
                write_file(fs::path(g.out) / name, csv.str());
                nlohmann::json cm;
                cm["stream"] = ci;
                cm["rows"] = idx;
                cm["rejected_flips"] = chain.rejected_flips();
                cm["constraint_checks"] = chain.constraint_checks();
                chains_meta.push_back(cm);
            }
            write_file(fs::path(g.out) / "manifest.json", manifest.dump(2) + "\n");
        } else if (*meas) {
            WulffShape wulff = load_wulff(meas_wulff);
            std::ostringstream csv;
            csv << kStatsCsvHeader << '\n';
            long idx = 0;
            for (const auto& file : meas_in) {
                std::istringstream is(read_file(file));
                Snapshot snap = read_snapshot(is);
                DropletStats st = droplet_stats(snap.cfg, meas_n, wulff);
                st.seed = snap.seed;
                st.sample_index = idx++;
                csv << stats_csv_row(st) << '\n';
            }
            write_file(fs::path(g.out) / "stats.csv", csv.str());
        } else if (*we) {
            RcParams params = we_params.resolve();
            SplitRng rng(g.seed, 0);
            XiTable xi = estimate_xi(params, we_dirs, we_kmax, we_samples, rng);
            WulffShape w = build_wulff(xi);
            auto [q0, c0] = choose_constants(w, we_c1, we_C1);
            w.q0 = q0;
            w.c0 = c0;
            write_file(fs::path(g.out) / "xi.json", xi_to_json(xi) + "\n");
            write_file(fs::path(g.out) / "wulff.json", wulff_to_json(w) + "\n");
            write_file(fs::path(g.out) / "meta.json", params_metadata_json(params) + "\n");
        } else if (*surg) {
            std::istringstream is(read_file(surg_in));
            Snapshot snap = read_snapshot(is);
            WulffShape wulff = load_wulff(surg_wulff);
            SplitRng rng(g.seed, 0);
            nlohmann::json verdict;
            verdict["op"] = surg_op;
            Point x = parse_point(surg_x), y = parse_point(surg_y);
            SurgeryOutcome outcome =
                surg_op == "sector"
                    ? sector_storage_replace(snap.cfg, x, y, snap.params, rng, surg_sweeps)
                    : storage_shift_replace(snap.cfg,
                                            parse_region(snap.cfg.geom(), surg_F),
                                            parse_region(snap.cfg.geom(), surg_G),
                                            parse_point(surg_shift), snap.params, rng,
                                            surg_sweeps);
            {
                std::ostringstream os;
                write_snapshot(os, outcome.full_plane, snap.params, g.seed);
                write_file(fs::path(g.out) / "full_plane.rcg", os.str());
            }
            {
                // stored part written as a snapshot with off-region edges closed
                BondConfig stored(snap.cfg.geom_ptr());
                for (int e : outcome.stored_region.ids)
                    stored.set(e, outcome.stored_states[e]);
                std::ostringstream os;
                write_snapshot(os, stored, snap.params, g.seed);
                write_file(fs::path(g.out) / "stored.rcg", os.str());
            }
            if (surg_op == "sector") {
                Sector sec(x, y);
                Region region = sector_edge_region(snap.cfg.geom(), sec);
                verdict["updated_connected"] =
                    connected(outcome.full_plane, x, y, region);
                GacBreakdown gb =
                    gac_breakdown(outcome.full_plane, x, y, surg_eps, wulff.q0);
                verdict["gac"] = {{"connected", gb.connected},
                                  {"cones_ok", gb.cones_ok},
                                  {"diam_ok", gb.diam_ok},
                                  {"area_ok", gb.area_ok},
                                  {"trapped_area", gb.trapped_area},
                                  {"triangle_area", gb.triangle_area},
                                  {"required_area", gb.required_area},
                                  {"gac", gb.all()}};
            } else {
                verdict["shift"] = {parse_point(surg_shift).x, parse_point(surg_shift).y};
            }
            verdict["stored_edges"] = outcome.stored_region.ids.size();
            write_file(fs::path(g.out) / "verdict.json", verdict.dump(2) + "\n");
        } else if (*scan) {
            ScanPlan plan;
            plan.n_list = parse_int_list(scan_nlist);
            plan.params = scan_params.resolve();
            plan.samples_per_n = scan_samples;
            plan.thin = scan_thin;
            plan.burnin_sweeps = scan_burnin;
            plan.chains = scan_chains;
            plan.seed = g.seed;
            plan.threads = g.threads;
            WulffShape wulff = load_wulff(scan_wulff);
            ScanResult res = run_scan(plan, wulff);
            for (auto& [n, csv] : res.csv_by_n) {
                char name[64];
                std::snprintf(name, sizeof name, "stats_n%03d.csv", n);
                write_file(fs::path(g.out) / name, csv);
            }
            write_file(fs::path(g.out) / "manifest.json", res.manifest_json + "\n");
            for (auto& [n, err] : res.errors_by_n)
                std::cerr << "scan: n=" << n << " failed: " << err << "\n";
        } else if (*fit) {
            std::vector<DropletStats> rows;
            for (const auto& f : fit_csv) {
                auto part = read_stats_csv(read_file(f));
                rows.insert(rows.end(), part.begin(), part.end());
            }
            FitReport r = fit_scaling(rows, fit_stat);
            write_file(fs::path(g.out) / ("fit_" + fit_stat + ".json"),
                       fit_report_to_json(r) + "\n");
        } else if (*rep) {
            std::vector<DropletStats> rows;
            for (const auto& f : rep_csv) {
                auto part = read_stats_csv(read_file(f));
                rows.insert(rows.end(), part.begin(), part.end());
            }
            for (const std::string& stat : {std::string("mlr"), std::string("mfl")}) {
                FitReport r = fit_scaling(rows, stat);
                write_file(fs::path(g.out) / ("plot_" + stat + ".svg"), svg_fit_plot(r));
            }
            if (rep_tail_n > 0) {
                TailReport t = tail_report(rows, rep_tail_n);
                write_file(fs::path(g.out) / "plot_exc_tail.svg", svg_tail_plot(t));
            }
        }
        return 0;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
}
