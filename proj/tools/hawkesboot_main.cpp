// Command-line front end: simulate | fit | bootstrap | mc | diagnose.
//
// Exit codes: 0 success, 1 numeric failure, 2 usage or I/O error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hawkesboot/diagnostics.hpp"
#include "hawkesboot/io.hpp"
#include "hawkesboot/montecarlo.hpp"
#include "hawkesboot/simulate.hpp"

namespace {

using namespace hawkesboot;

struct SimulateArgs {
    std::string model;
    double mu = 0.0, alpha = 0.0, beta = 0.0;
    double delta = -1.0;
    double horizon = 0.0;
    double burn_in = 500.0;
    std::uint64_t seed = 1;
    std::string out;
    std::string method = "thinning";
};

Params simulate_params(const SimulateArgs& a) {
    if (!a.model.empty()) {
        return standard_model(a.model).theta;
    }
    if (a.delta > 0.0) {
        return Params(a.mu, Kernel::power_law(a.alpha, a.beta, a.delta));
    }
    return Params(a.mu, Kernel::exponential(a.alpha, a.beta));
}

int cmd_simulate(const SimulateArgs& a) {
    const Params theta = simulate_params(a);
    const EventSeries series = a.method == "timechange"
                                   ? simulate_timechange(theta, a.horizon, a.burn_in, a.seed)
                                   : simulate_thinning(theta, a.horizon, a.burn_in, a.seed);
    write_event_file(a.out, series.events());
    write_event_file(a.out + ".pre", series.pre_sample());
    std::fprintf(stderr, "simulated %zu events on [0,%g] (%zu burn-in events) -> %s\n", series.count(), a.horizon,
                 series.pre_sample().size(), a.out.c_str());
    return 0;
}

struct DataArgs {
    std::string data;
    std::string pre_sample;
    double horizon = 0.0;  // 0: use the last event time
    std::string kernel = "exp";
};

EventSeries load_series(const DataArgs& d) {
    auto events = read_event_file(d.data);
    if (events.empty()) {
        throw UsageError(d.data + ": no events");
    }
    std::vector<double> pre;
    if (!d.pre_sample.empty()) {
        pre = read_event_file(d.pre_sample);
    }
    const double horizon = d.horizon > 0.0 ? d.horizon : events.back();
    return EventSeries(std::move(pre), std::move(events), horizon);
}

struct FitArgs {
    DataArgs data;
    std::string init;
    double level = 0.95;
    std::string out;
};

FitResult run_fit(const DataArgs& d, const std::string& init, const EventSeries& series) {
    FitOptions opt;
    opt.family = family_from_name(d.kernel);
    if (!init.empty()) {
        opt.init = params_from_flag(init, opt.family);
    }
    return fit_mle(series, opt);
}

void write_json_output(const nlohmann::json& j, const std::string& out) {
    if (out.empty() || out == "-") {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream os(out);
    if (!os) {
        throw UsageError("cannot write '" + out + "'");
    }
    os << j.dump(2) << '\n';
}

int cmd_fit(const FitArgs& a) {
    const EventSeries series = load_series(a.data);
    const FitResult fit = run_fit(a.data, a.init, series);
    nlohmann::json j = fit_to_json(fit, series, a.level);
    j["config"] = {{"data", a.data.data},
                   {"pre_sample", a.data.pre_sample},
                   {"kernel", a.data.kernel},
                   {"horizon", series.horizon()},
                   {"init", a.init},
                   {"level", a.level}};
    write_json_output(j, a.out);
    return fit.converged ? 0 : 1;
}

struct BootstrapArgs {
    DataArgs data;
    std::string scheme = "prfb";
    int reps = 199;
    double level = 0.95;
    std::uint64_t seed = 1;
    std::string init;
    std::string null_params;  // theta0 in natural form
    bool restricted = false;
    int threads = 1;
    std::string out;
};

int cmd_bootstrap(const BootstrapArgs& a) {
    const EventSeries series = load_series(a.data);
    const FitResult fit = run_fit(a.data, a.init, series);
    if (!fit.converged) {
        throw std::runtime_error("data fit did not converge; bootstrap refused");
    }
    const ModelFamily family = family_from_name(a.data.kernel);
    const Scheme scheme = scheme_from_name(a.scheme);

    std::optional<Params> theta0;
    if (!a.null_params.empty()) {
        theta0 = params_from_flag(a.null_params, family);
    }
    if (a.restricted && !theta0) {
        throw CLI::ValidationError("--restricted needs --null <theta0>");
    }
    if (!fit.sanity.overall && scheme.intensity_mode == IntensityMode::Fixed) {
        std::fprintf(stderr,
                     "warning: fit failed the sanity check (a=%g); proceeding, the fixed intensity "
                     "bootstrap does not require stationarity\n",
                     branching_ratio(fit.theta_hat.kernel));
    }

    BootstrapOptions opt;
    opt.scheme = scheme;
    opt.replications = a.reps;
    opt.seed = a.seed;
    opt.threads = a.threads;
    if (a.restricted) {
        opt.center = theta0;
    }
    const BootstrapRun run = run_bootstrap(series, fit, opt);

    nlohmann::json j = bootstrap_run_to_json(run, fit, a.level);
    j["config"] = {{"data", a.data.data},      {"pre_sample", a.data.pre_sample},
                   {"kernel", a.data.kernel},  {"horizon", series.horizon()},
                   {"scheme", a.scheme},       {"B", a.reps},
                   {"level", a.level},         {"seed", a.seed},
                   {"null", a.null_params},    {"restricted", a.restricted}};
    j["fit"] = fit_to_json(fit, series, a.level);
    if (theta0) {
        const double lr_obs = lr_statistic(series, *theta0, fit);
        j["lr_observed"] = lr_obs;
        j["lr_bootstrap_pvalue"] = bootstrap_lr_pvalue(run, lr_obs);
        j["lr_asymptotic_pvalue"] = 1.0 - chi2_cdf(lr_obs, param_dimension(family));
        try {
            const auto cover = confidence_ellipsoid_cover(run, fit, *theta0, a.level,
                                                          reporting_parameterization(family));
            j["ellipsoid_covers_null"] = {{"asymptotic", cover.asymptotic}, {"bootstrap", cover.bootstrap}};
        } catch (const std::exception& e) {
            j["ellipsoid_error"] = e.what();
        }
    }
    write_json_output(j, a.out);
    return 0;
}

struct DiagnoseArgs {
    DataArgs data;
    std::string params;  // evaluate residuals at these values instead of the MLE
    std::string out_prefix = "diagnostics";
    int max_lag = 20;
};

int cmd_diagnose(const DiagnoseArgs& a) {
    const EventSeries series = load_series(a.data);
    const ModelFamily family = family_from_name(a.data.kernel);
    std::optional<FitResult> fit;
    Params theta = [&]() {
        if (!a.params.empty()) {
            return params_from_flag(a.params, family);
        }
        fit = run_fit(a.data, "", series);
        return fit->theta_hat;
    }();

    const TransformedWaits waits = transformed_waiting_times(theta, series);
    if (waits.values.size() < 2) {
        throw std::runtime_error("diagnose: need at least two events");
    }
    const KsResult ks = ks_exp1(waits);
    const auto qq = qq_pairs(waits.values);
    const int max_lag = std::min<int>(a.max_lag, static_cast<int>(waits.values.size()) - 1);
    const AcfResult acf_v = acf(waits.values, max_lag);
    std::vector<double> squared(waits.values.size());
    for (std::size_t i = 0; i < squared.size(); ++i) squared[i] = waits.values[i] * waits.values[i];
    const AcfResult acf_v2 = acf(squared, max_lag);

    char buf[128];
    {
        std::ofstream os(a.out_prefix + "_qq.csv");
        if (!os) throw UsageError("cannot write QQ csv");
        os << "empirical,theoretical\n";
        for (const auto& [emp, theo] : qq) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", emp, theo);
            os << buf;
        }
    }
    {
        std::ofstream os(a.out_prefix + "_acf.csv");
        if (!os) throw UsageError("cannot write ACF csv");
        os << "lag,acf_v,acf_v2,band\n";
        for (int k = 0; k <= max_lag; ++k) {
            std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", k, acf_v.values[static_cast<std::size_t>(k)],
                          acf_v2.values[static_cast<std::size_t>(k)], acf_v.band);
            os << buf;
        }
    }
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "diagnostics";
    j["n"] = waits.values.size();
    j["ks_statistic"] = ks.statistic;
    j["ks_p_value"] = ks.p_value;
    j["theta"] = params_to_json(theta, family);
    j["theta_source"] = a.params.empty() ? "mle" : "flag";
    j["config"] = {{"data", a.data.data},
                   {"pre_sample", a.data.pre_sample},
                   {"kernel", a.data.kernel},
                   {"horizon", series.horizon()},
                   {"max_lag", max_lag}};
    write_json_output(j, a.out_prefix + "_summary.json");
    std::fprintf(stderr, "KS statistic %.4f, p-value %.4f (n=%zu)\n", ks.statistic, ks.p_value, waits.values.size());
    return 0;
}

struct McArgs {
    std::string config;
    std::string models;
    std::string horizons;
    std::string schemes;
    int reps = -1;
    int bootstrap_reps = -1;
    double burn_in = -1.0;
    double level = -1.0;
    std::int64_t seed = -1;
    bool fixed_attempts = false;
    int threads = 1;
    std::string out_csv;
    std::string out_json;
    bool quiet = false;
};

int cmd_mc(const McArgs& a) {
    McConfig cfg;
    if (!a.config.empty()) {
        std::ifstream in(a.config);
        if (!in) {
            throw UsageError("cannot open mc config '" + a.config + "'");
        }
        cfg = parse_mc_config(in, cfg);
    }
    {
        // flag overrides, applied through the same parser
        std::stringstream overrides;
        if (!a.models.empty()) overrides << "models = " << a.models << '\n';
        if (!a.horizons.empty()) overrides << "horizons = " << a.horizons << '\n';
        if (!a.schemes.empty()) overrides << "schemes = " << a.schemes << '\n';
        if (a.reps >= 0) overrides << "reps = " << a.reps << '\n';
        if (a.bootstrap_reps >= 0) overrides << "B = " << a.bootstrap_reps << '\n';
        if (a.burn_in >= 0) overrides << "burn_in = " << a.burn_in << '\n';
        if (a.level >= 0) overrides << "level = " << a.level << '\n';
        if (a.seed >= 0) overrides << "seed = " << a.seed << '\n';
        if (a.fixed_attempts) overrides << "fixed_attempts = true\n";
        cfg = parse_mc_config(overrides, cfg);
    }
    cfg.threads = a.threads;

    const McReport report = run_coverage_experiment(cfg);
    if (!a.out_csv.empty()) {
        std::ofstream os(a.out_csv);
        if (!os) throw UsageError("cannot write '" + a.out_csv + "'");
        write_csv(report, os);
    }
    if (!a.out_json.empty()) {
        std::ofstream os(a.out_json);
        if (!os) throw UsageError("cannot write '" + a.out_json + "'");
        os << mc_report_to_json(report).dump(2) << '\n';
    }
    if (!a.quiet) {
        write_text(report, std::cout);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Likelihood and bootstrap inference for self-exciting point processes"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* csim = app.add_subcommand("simulate", "Simulate a Hawkes process to an event-times file");
    auto* model_opt = csim->add_option("--model", sim.model, "Standard model label (1A..3C)");
    auto* mu_opt = csim->add_option("--mu", sim.mu, "Baseline intensity");
    csim->add_option("--alpha", sim.alpha, "Kernel jump size");
    csim->add_option("--beta", sim.beta, "Kernel decay rate");
    csim->add_option("--delta", sim.delta, "Power-law exponent (omit for the exponential kernel)");
    csim->add_option("--T", sim.horizon, "Sample horizon")->required()->check(CLI::PositiveNumber);
    csim->add_option("--burn-in", sim.burn_in, "Burn-in length M (events on [-M,0) kept as pre-sample)");
    csim->add_option("--seed", sim.seed, "RNG seed");
    csim->add_option("--out", sim.out, "Output file (pre-sample goes to <out>.pre)")->required();
    csim->add_option("--method", sim.method, "thinning|timechange")
        ->check(CLI::IsMember({"thinning", "timechange"}));
    mu_opt->excludes(model_opt);

    FitArgs fit;
    auto* cfit = app.add_subcommand("fit", "Maximum likelihood fit");
    cfit->add_option("--data", fit.data.data, "Event-times file")->required();
    cfit->add_option("--pre-sample", fit.data.pre_sample, "Pre-sample (burn-in) event file");
    cfit->add_option("--T", fit.data.horizon, "Horizon (default: last event time)");
    cfit->add_option("--kernel", fit.data.kernel, "exp|powerlaw|poisson");
    cfit->add_option("--init", fit.init, "Initial values, natural form (mu,alpha,beta[,delta])");
    cfit->add_option("--level", fit.level, "Confidence level for the reported asymptotic CIs");
    cfit->add_option("--out", fit.out, "Output JSON path (default: stdout)");

    BootstrapArgs boot;
    auto* cboot = app.add_subcommand("bootstrap", "Bootstrap inference on a fitted model");
    cboot->add_option("--data", boot.data.data, "Event-times file")->required();
    cboot->add_option("--pre-sample", boot.data.pre_sample, "Pre-sample (burn-in) event file");
    cboot->add_option("--T", boot.data.horizon, "Horizon (default: last event time)");
    cboot->add_option("--kernel", boot.data.kernel, "exp|powerlaw|poisson");
    cboot->add_option("--scheme", boot.scheme, "prfb|npfb|prrb|nprb");
    cboot->add_option("--B", boot.reps, "Bootstrap replications")->check(CLI::NonNegativeNumber);
    cboot->add_option("--level", boot.level, "Confidence level");
    cboot->add_option("--seed", boot.seed, "RNG seed");
    cboot->add_option("--init", boot.init, "Initial values for the data fit");
    cboot->add_option("--null", boot.null_params, "Hypothesized theta0 (natural form) for LR/ellipsoid checks");
    cboot->add_flag("--restricted", boot.restricted, "Center the bootstrap at --null instead of the MLE");
    cboot->add_option("--threads", boot.threads, "Worker threads (results identical for any value)");
    cboot->add_option("--out", boot.out, "Output JSON path (default: stdout)");

    DiagnoseArgs diag;
    auto* cdiag = app.add_subcommand("diagnose", "Residual diagnostics of the time-changed waiting times");
    cdiag->add_option("--data", diag.data.data, "Event-times file")->required();
    cdiag->add_option("--pre-sample", diag.data.pre_sample, "Pre-sample (burn-in) event file");
    cdiag->add_option("--T", diag.data.horizon, "Horizon (default: last event time)");
    cdiag->add_option("--kernel", diag.data.kernel, "exp|powerlaw|poisson");
    cdiag->add_option("--params", diag.params, "Evaluate at these values (natural form) instead of fitting");
    cdiag->add_option("--out-prefix", diag.out_prefix, "Prefix for _qq.csv, _acf.csv, _summary.json");
    cdiag->add_option("--max-lag", diag.max_lag, "Largest ACF lag");

    McArgs mc;
    auto* cmc = app.add_subcommand("mc", "Monte Carlo coverage experiment");
    cmc->add_option("--config", mc.config, "Config file (key = value; see README)");
    cmc->add_option("--models", mc.models, "Comma-separated model labels or 'all'");
    cmc->add_option("--horizons", mc.horizons, "Comma-separated horizons");
    cmc->add_option("--schemes", mc.schemes, "Comma-separated bootstrap schemes");
    cmc->add_option("--reps", mc.reps, "Valid-replication target");
    cmc->add_option("--B", mc.bootstrap_reps, "Bootstrap replications");
    cmc->add_option("--burn-in", mc.burn_in, "Burn-in length");
    cmc->add_option("--level", mc.level, "Confidence level");
    cmc->add_option("--seed", mc.seed, "RNG seed");
    cmc->add_flag("--fixed-attempts", mc.fixed_attempts, "Run exactly --reps attempts (SC-failure studies)");
    cmc->add_option("--threads", mc.threads, "Worker threads (results identical for any value)");
    cmc->add_option("--out-csv", mc.out_csv, "CSV output path");
    cmc->add_option("--out-json", mc.out_json, "JSON output path");
    cmc->add_flag("--quiet", mc.quiet, "Suppress the text table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (csim->parsed()) return cmd_simulate(sim);
        if (cfit->parsed()) return cmd_fit(fit);
        if (cboot->parsed()) return cmd_bootstrap(boot);
        if (cdiag->parsed()) return cmd_diagnose(diag);
        if (cmc->parsed()) return cmd_mc(mc);
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
