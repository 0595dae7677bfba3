#pragma once

// Command-line front end: five study drivers plus `all`, every output stamped
// with the manifest hash of the fully-resolved configuration.  Exit codes:
// 0 success, 2 validation, 3 numeric guard tripped, 4 I/O.

#include <CLI11.hpp>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "zeta_chaos/chaos.hpp"
#include "zeta_chaos/coupling.hpp"
#include "zeta_chaos/covariance.hpp"
#include "zeta_chaos/critical.hpp"
#include "zeta_chaos/field.hpp"
#include "zeta_chaos/io.hpp"
#include "zeta_chaos/primes.hpp"

namespace zeta_chaos::cli {

struct RunConfig {
    std::string subcommand;
    std::size_t n_primes = 10000;
    double beta = 1.0;
    double alpha = 1.0 / 3.0;
    std::size_t grid = 2049;  // M points; M-1 segments
    int level = 3;
    std::vector<double> r_list = {0.25, 0.125, 0.0625, 0.03125};
    std::vector<double> q_list = {1.0, 2.0};
    std::vector<std::size_t> block_sizes = {16, 64};
    std::size_t samples = 400;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::string out_dir = "out";
    std::string format = "csv";

    void validate() const {
        if (!(beta > 0)) throw std::invalid_argument("--beta must be > 0");
        if (!(alpha > 0 && alpha < 0.4))
            throw std::invalid_argument("--alpha must lie in (0, 2/5)");
        if (grid < 2) throw std::invalid_argument("--grid must be >= 2");
        const std::size_t segments = grid - 1;
        const std::size_t boxes = std::size_t{1} << level;
        if (level < 0 || segments % boxes != 0 || segments / boxes < 16)
            throw std::invalid_argument(
                "--level incompatible with --grid: need (grid-1) = 2^level * k, k >= 16");
        if (format != "csv" && format != "json")
            throw std::invalid_argument("--format must be csv or json");
        if (samples == 0) throw std::invalid_argument("--samples must be >= 1");
    }

    nlohmann::json manifest() const {
        return nlohmann::json{{"subcommand", subcommand}, {"n_primes", n_primes},
                              {"beta", beta},             {"alpha", alpha},
                              {"grid", grid},             {"level", level},
                              {"r_list", r_list},         {"q_list", q_list},
                              {"block_sizes", block_sizes},
                              {"samples", samples},       {"seed", seed},
                              {"workers", workers},       {"out", out_dir},
                              {"format", format}};
    }
};

namespace detail {

struct Emitter {
    std::filesystem::path dir;
    std::string hash;
    nlohmann::json manifest;

    Emitter(const RunConfig& cfg, const std::string& name) {
        dir = std::filesystem::path(cfg.out_dir) / name;
        std::filesystem::create_directories(dir);
        manifest = cfg.manifest();
        hash = hex64(fnv1a64(manifest.dump()));
        manifest["manifest_hash"] = hash;
        write_json(dir / "manifest.json", manifest);
    }
};

inline McConfig mc_config(const RunConfig& cfg, std::uint64_t stream_base = 0) {
    McConfig m;
    m.n_samples = cfg.samples;
    m.seed = cfg.seed;
    m.stream_base = stream_base;
    m.workers = cfg.workers;
    return m;
}

} // namespace detail

inline void cmd_field(const RunConfig& cfg) {
    detail::Emitter em(cfg, "field");
    const auto table = build_prime_table(cfg.n_primes);
    const std::size_t n_fields = std::min<std::size_t>(cfg.samples, 16);
    for (std::size_t s = 0; s < n_fields; ++s) {
        const auto phases = sample_phases(table, cfg.seed, s);
        const auto fx = eval_field(phases, table, cfg.n_primes, cfg.grid);
        CsvWriter wx(em.dir / ("field_x_s" + std::to_string(s) + ".csv"), em.hash, "x,value");
        for (std::size_t k = 0; k < fx.grid_size; ++k) wx.row({fx.x_at(k), fx.values[k]});
        const auto draws = sample_gaussian_draws(table, cfg.seed, 1000000 + s);
        const auto fg = eval_gaussian_field(draws, table, cfg.n_primes, cfg.grid);
        CsvWriter wg(em.dir / ("field_g_s" + std::to_string(s) + ".csv"), em.hash, "x,value");
        for (std::size_t k = 0; k < fg.grid_size; ++k) wg.row({fg.x_at(k), fg.values[k]});
    }
}

inline void cmd_kernel(const RunConfig& cfg) {
    detail::Emitter em(cfg, "kernel");
    const auto table = build_prime_table(cfg.n_primes);
    {
        CsvWriter w(em.dir / "kernel_table.csv", em.hash,
                    "u,psi_N,psi_limit_zeta,psi_limit_prime,g");
        w.raw_row("# u=0 row omitted: the limit kernel has a log pole at u=0");
        const std::size_t K = 200;
        for (std::size_t k = 1; k <= K; ++k) {
            const double u = 2.0 * (double)k / (double)K;
            const double pz = psi_limit_zeta(u);
            w.row({u, psi_n(table, cfg.n_primes, u), pz,
                   psi_limit_prime(table, cfg.n_primes, u), pz - 0.5 * std::log(1.0 / u)});
        }
    }
    {
        std::vector<double> ugrid(1000);
        for (std::size_t i = 0; i < ugrid.size(); ++i)
            ugrid[i] = (double)(i + 1) / (double)ugrid.size();
        const auto bc = kernel_bound_check(table, cfg.n_primes, ugrid);
        CsvWriter w(em.dir / "bound_check.csv", em.hash, "n_primes,c_log_pn,c_log_n");
        w.row({(double)cfg.n_primes, bc.c_log_pn, bc.c_log_n});
    }
}

inline void cmd_chaos(const RunConfig& cfg) {
    detail::Emitter em(cfg, "chaos");
    const auto table = build_prime_table(cfg.n_primes);
    nlohmann::json summary;
    summary["manifest_hash"] = em.hash;

    // mean-one check of the total mass
    {
        const double betas[1] = {cfg.beta};
        auto masses = mc_box_masses(table, cfg.n_primes, betas, 0.0, 1.0, cfg.grid - 1,
                                    false, detail::mc_config(cfg));
        const auto ms = mean_se(masses[0]);
        summary["mean_one"] = {{"mean", ms.mean}, {"se", ms.se}, {"n", ms.n}};
    }

    // moment study with oracle column at q=2 when it exists
    const bool oracle_ok = cfg.beta * cfg.beta < 2.0;
    if (!oracle_ok)
        summary["warnings"].push_back(
            "beta >= sqrt(2): q=2 oracle skipped (moment finite only for q < 4/beta^2)");
    {
        CsvWriter w(em.dir / "moments.csv", em.hash, "q,r,moment,se,n_samples,oracle");
        nlohmann::json fits = nlohmann::json::array();
        for (double q : cfg.q_list) {
            ChaosParams params{cfg.beta, cfg.n_primes, NormalizationKind::exact_bessel, false};
            const auto est = mc_moment(table, params, q, cfg.r_list, detail::mc_config(cfg));
            if (est.heavy_tail_warning)
                summary["warnings"].push_back("q=" + std::to_string(q) +
                                              ": q beta^2/4 >= 1, SE is unreliable");
            for (std::size_t i = 0; i < est.r.size(); ++i) {
                double oracle = std::numeric_limits<double>::quiet_NaN();
                if (q == 2.0 && oracle_ok)
                    oracle = second_moment_box_exact(est.r[i], table, params);
                w.row({q, est.r[i], est.moment[i], est.se[i], (double)est.n_samples, oracle});
            }
            const auto fit = scaling_exponent_fit(est, cfg.beta);
            fits.push_back({{"q", q},
                            {"slope", fit.slope},
                            {"slope_se", fit.slope_se},
                            {"theory_paper", fit.theory_paper},
                            {"theory_half_kernel", fit.theory_half_kernel}});
        }
        write_json(em.dir / "fits.json", fits);
    }

    // martingale check
    {
        ChaosParams params{cfg.beta, cfg.n_primes, NormalizationKind::exact_bessel, false};
        const auto rep = martingale_check(table, params, cfg.n_primes / 10, cfg.n_primes,
                                          0.3, 0.7, 8, 64, 128, detail::mc_config(cfg));
        summary["martingale"] = {{"aggregate_z", rep.aggregate_z},
                                 {"n_outer", rep.outer.size()},
                                 {"skipped", rep.skipped}};
    }

    // critical study at beta_c = 2 (independent of --beta)
    {
        std::vector<std::size_t> n_list;
        for (std::size_t n : {cfg.n_primes / 100, cfg.n_primes / 10, cfg.n_primes})
            if (n >= 16) n_list.push_back(n);
        const auto rows = critical_mass_study(table, n_list, 128, detail::mc_config(cfg));
        CsvWriter w(em.dir / "critical.csv", em.hash,
                    "n_primes,median,q1,q3,mean,half_moment,half_moment_se");
        for (const auto& r : rows)
            w.row({(double)r.n_primes, r.median, r.q1, r.q3, r.mean, r.half_moment,
                   r.half_moment_se});
    }
    write_json(em.dir / "summary.json", summary);
}

inline void cmd_coupling(const RunConfig& cfg) {
    detail::Emitter em(cfg, "coupling");
    const auto table = build_prime_table(std::max<std::size_t>(cfg.n_primes, 4096));
    nlohmann::json records = nlohmann::json::array();
    for (std::size_t n : cfg.block_sizes) {
        if (n < 4) {
            records.push_back({{"n", n}, {"coupled", false}});
            continue;
        }
        AuditConfig acfg;
        acfg.seed = cfg.seed;
        acfg.n_v_samples = std::min<std::size_t>(cfg.samples * 10, 10000);
        const auto a = run_block_audit(table, audit_block(n), acfg);
        records.push_back({{"n", a.n},
                           {"coupled", true},
                           {"mean_abs_V", a.mean_abs_V},
                           {"se", a.se_V},
                           {"lemma11_cost", a.lemma11_cost},
                           {"w1_bound", a.w1_bound},
                           {"fourier_l1", a.fourier_l1},
                           {"emp_w1", a.emp_w1},
                           {"emp_w1_se", a.emp_w1_se},
                           {"ks_v1", a.ks_v1},
                           {"grid_resolution", a.grid_resolution},
                           {"ordering_chain_ok",
                            a.emp_w1 <= a.lemma11_cost + 3.0 * a.emp_w1_se &&
                                a.lemma11_cost <= a.w1_bound + a.grid_resolution * 0.0 +
                                                      1e-9}});
    }
    nlohmann::json doc;
    doc["manifest_hash"] = em.hash;
    doc["audits"] = records;
    write_json(em.dir / "coupling_audit.json", doc);
}

inline void cmd_critical(const RunConfig& cfg) {
    detail::Emitter em(cfg, "critical");
    std::vector<std::size_t> n_list;
    for (std::size_t n : {cfg.n_primes / 100, cfg.n_primes / 10, cfg.n_primes})
        if (n >= 100) n_list.push_back(n);
    if (n_list.empty()) n_list.push_back(std::max<std::size_t>(cfg.n_primes, 100));
    const ChainTables tab(*std::max_element(n_list.begin(), n_list.end()));
    {
        const auto reports = js1_conditions(n_list, 256, tab);
        CsvWriter w(em.dir / "js1.csv", em.hash,
                    "N,t,sup_diff,offdiag_005,offdiag_01,offdiag_02");
        for (const auto& r : reports)
            w.row({(double)r.N, r.t, r.sup_diff, r.offdiag_005, r.offdiag_01, r.offdiag_02});
    }
    {
        const std::size_t N = n_list.back();
        CsvWriter w(em.dir / "chain.csv", em.hash, "u,gn1,gn2,gn3,gn4");
        for (std::size_t k = 0; k <= 100; ++k) {
            const double u = (double)k / 100.0;
            w.row({u, chain_covariance(ChainStage::GN1, N, u, 0.0, tab),
                   chain_covariance(ChainStage::GN2, N, u, 0.0, tab),
                   chain_covariance(ChainStage::GN3, N, u, 0.0, tab),
                   chain_covariance(ChainStage::GN4, N, u, 0.0, tab)});
        }
    }
    {
        const double t = std::log(tab.s(n_list.back() + 1));
        const std::size_t M = std::min<std::size_t>(cfg.grid, 1025);
        const auto f = sample_reference_field(t, M, cfg.seed, 0);
        CsvWriter w(em.dir / "reference_field.csv", em.hash, "x,value");
        for (std::size_t k = 0; k < f.grid_size; ++k) w.row({f.x_at(k), f.values[k]});
    }
}

inline int run(const std::vector<std::string>& args) {
    RunConfig cfg;
    CLI::App app{"random Euler-product field and multiplicative-chaos toolkit"};
    app.set_config("--config");
    app.add_option("--n-primes", cfg.n_primes, "number of primes N");
    app.add_option("--beta", cfg.beta, "inverse temperature beta");
    app.add_option("--alpha", cfg.alpha, "block schedule exponent in (0, 2/5)");
    app.add_option("--grid", cfg.grid, "grid points M on [0,1]");
    app.add_option("--level", cfg.level, "dyadic box level");
    app.add_option("--r-list", cfg.r_list, "box radii");
    app.add_option("--q-list", cfg.q_list, "moment orders");
    app.add_option("--block-sizes", cfg.block_sizes, "coupling audit block sizes");
    app.add_option("--samples", cfg.samples, "Monte Carlo samples");
    app.add_option("--seed", cfg.seed, "RNG seed");
    app.add_option("--workers", cfg.workers, "worker threads");
    app.add_option("--out", cfg.out_dir, "output directory");
    app.add_option("--format", cfg.format, "csv or json");
    bool do_field = false, do_kernel = false, do_chaos = false, do_coupling = false,
         do_critical = false;
    app.add_subcommand("field", "dump field realizations")->callback([&] { do_field = true; });
    app.add_subcommand("kernel", "kernel tables and bound checks")->callback([&] {
        do_kernel = true;
    });
    app.add_subcommand("chaos", "moment studies, martingale and critical checks")
        ->callback([&] { do_chaos = true; });
    app.add_subcommand("coupling", "block coupling audits")->callback([&] {
        do_coupling = true;
    });
    app.add_subcommand("critical", "covariance chain and reference-field comparison")
        ->callback([&] { do_critical = true; });
    app.add_subcommand("all", "run every study")->callback([&] {
        do_field = do_kernel = do_chaos = do_coupling = do_critical = true;
    });
    app.require_subcommand(1);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_name() == "CallForHelp" ? 0 : 2;
    }
    try {
        cfg.validate();
        auto pick = [&]() {
            if (do_field) return std::string("field");
            if (do_kernel) return std::string("kernel");
            if (do_chaos) return std::string("chaos");
            if (do_coupling) return std::string("coupling");
            return std::string("critical");
        };
        cfg.subcommand = (do_field && do_kernel) ? "all" : pick();
        if (do_field) cmd_field(cfg);
        if (do_kernel) cmd_kernel(cfg);
        if (do_chaos) cmd_chaos(cfg);
        if (do_coupling) cmd_coupling(cfg);
        if (do_critical) cmd_critical(cfg);
    } catch (const numeric_guard_error& e) {
        std::fprintf(stderr, "numeric guard: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid configuration: %s\n", e.what());
        return 2;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "invalid configuration: %s\n", e.what());
        return 2;
    } catch (const std::ios_base::failure& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 4;
    } catch (const std::filesystem::filesystem_error& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 4;
    }
    return 0;
}

} // namespace zeta_chaos::cli
