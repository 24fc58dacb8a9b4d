#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "platoon/arrival.hpp"
#include "platoon/dp.hpp"
#include "platoon/ingest.hpp"
#include "platoon/policies.hpp"
#include "platoon/sim.hpp"
#include "platoon/stopping.hpp"

namespace platoon::cli {

namespace {

using nlohmann::ordered_json;

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// Accepts a decimal or a fraction such as "120/330".
double parse_fraction(const std::string& text) {
    const auto slash = text.find('/');
    std::size_t used = 0;
    auto number = [&](const std::string& s) {
        const double v = std::stod(s, &used);
        if (used != s.size()) {
            throw std::invalid_argument("not a number: '" + text + "'");
        }
        return v;
    };
    if (slash == std::string::npos) {
        return number(text);
    }
    const double den = number(text.substr(slash + 1));
    if (den == 0.0) {
        throw std::invalid_argument("zero denominator in '" + text + "'");
    }
    return number(text.substr(0, slash)) / den;
}

struct DistributionFlags {
    std::optional<double> lambda;
    std::string pmf_file;

    void add_to(CLI::App& cmd) {
        auto* l = cmd.add_option("--lambda", lambda, "Poisson arrivals per time-step");
        auto* f = cmd.add_option("--pmf-file", pmf_file, "CSV 'count,probability' arrival pmf");
        l->excludes(f);
    }

    ArrivalDistribution build() const {
        if (!pmf_file.empty()) {
            const auto pairs = parse_pmf_csv(std::filesystem::path(pmf_file));
            return ArrivalDistribution::from_pmf(pairs);
        }
        if (!lambda) {
            throw CLI::RequiredError("--lambda or --pmf-file");
        }
        return ArrivalDistribution::poisson_truncated(*lambda);
    }

    void describe(ordered_json& j) const {
        if (!pmf_file.empty()) {
            j["pmf_file"] = pmf_file;
        } else if (lambda) {
            j["lambda"] = *lambda;
        }
    }
};

std::ofstream open_output(const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot write " + path);
    }
    return f;
}

void write_manifest(const std::string& csv_path, const ordered_json& manifest) {
    auto f = open_output(csv_path + ".manifest.json");
    f << manifest.dump(2) << '\n';
}

ordered_json base_manifest(const std::string& subcommand) {
    ordered_json j;
    j["tool"] = "platoon";
    j["version"] = kVersion;
    j["subcommand"] = subcommand;
    return j;
}

// ---- threshold -------------------------------------------------------------

struct ThresholdCmd {
    DistributionFlags dist;
    double ratio = 0.005;

    void attach(CLI::App& app) {
        auto* cmd = app.add_subcommand("threshold", "Optimal release threshold n*");
        dist.add_to(*cmd);
        cmd->add_option("--ratio", ratio, "Cost-benefit ratio c/R")->capture_default_str();
        sub = cmd;
    }

    int run(std::ostream& out) const {
        const Threshold t = compute_threshold(dist.build(), ratio);
        out << "n_star," << t.to_string() << '\n';
        return kOk;
    }

    CLI::App* sub = nullptr;
};

// ---- dp-verify -------------------------------------------------------------

struct DpVerifyCmd {
    DistributionFlags dist;
    double ratio = 0.005;
    std::int64_t horizon = 720;
    std::int64_t max_count = 60;
    std::int64_t window = -1;
    std::string actions_out;

    void attach(CLI::App& app) {
        auto* cmd = app.add_subcommand("dp-verify", "Check the threshold rule against backward induction");
        dist.add_to(*cmd);
        cmd->add_option("--ratio", ratio, "Cost-benefit ratio c/R")->capture_default_str();
        cmd->add_option("--horizon", horizon, "Deadline step J")->capture_default_str();
        cmd->add_option("--max-count", max_count, "State-space cap on occupancy")->capture_default_str();
        cmd->add_option("--window", window, "Compare steps k < window (default: horizon)");
        cmd->add_option("--actions-out", actions_out, "Write the DP action table as CSV");
        sub = cmd;
    }

    int run(std::ostream& out) const {
        const ArrivalDistribution d = dist.build();
        const RewardParams params = RewardParams::from_ratio(ratio);
        const Threshold t = compute_threshold(d, ratio);
        const DpSolution sol = solve(DpConfig(horizon, max_count, d, params));
        if (!actions_out.empty()) {
            auto f = open_output(actions_out);
            sol.write_actions_csv(f);
            ordered_json m = base_manifest("dp-verify");
            dist.describe(m);
            m["ratio"] = ratio;
            m["horizon"] = horizon;
            m["max_count"] = max_count;
            m["output"] = actions_out;
            write_manifest(actions_out, m);
        }
        const auto mismatches = compare_with_threshold(sol, t, window);
        if (mismatches.empty()) {
            out << "MATCH n_star=" << t.to_string() << '\n';
            return kOk;
        }
        out << "MISMATCH n_star=" << t.to_string() << " states=" << mismatches.size() << '\n';
        out << "k,n,dp_action,rule_action\n";
        auto name = [](Action a) { return a == Action::release ? "release" : "wait"; };
        for (const auto& m : mismatches) {
            out << m.k << ',' << m.n << ',' << name(m.dp_action) << ',' << name(m.rule_action) << '\n';
        }
        return kDomainError;
    }

    CLI::App* sub = nullptr;
};

// ---- sweep -----------------------------------------------------------------

struct SweepCmd {
    double lambda_min = 0.0;
    double lambda_max = 1.0 / 6.0;
    std::int64_t points = 21;
    double ratio = 0.005;
    std::vector<std::string> policies{"optimal", "periodic", "spontaneous", "non_causal"};
    std::int64_t samples = 1000;
    std::int64_t horizon = 720;
    std::uint64_t seed = 1;
    std::int64_t period = 60;
    double step_seconds = 5.0;
    std::optional<double> initial_lambda;
    bool exclude_forced = false;
    std::string out_path;
    std::string vehicle_utility_out;

    void attach(CLI::App& app) {
        auto* cmd = app.add_subcommand("sweep", "Monte-Carlo policy comparison over arrival rates");
        cmd->add_option("--lambda-min", lambda_min)->capture_default_str();
        cmd->add_option("--lambda-max", lambda_max)->capture_default_str();
        cmd->add_option("--points", points, "Number of grid points")->capture_default_str();
        cmd->add_option("--ratio", ratio, "Cost-benefit ratio c/R")->capture_default_str();
        cmd->add_option("--policies", policies, "optimal, periodic, spontaneous, non_causal")
            ->delimiter(',')
            ->capture_default_str();
        cmd->add_option("--samples", samples, "Monte-Carlo hours per cell")->capture_default_str();
        cmd->add_option("--horizon", horizon, "Steps per simulated hour")->capture_default_str();
        cmd->add_option("--seed", seed, "Master seed")->capture_default_str();
        cmd->add_option("--period", period, "Periodic policy interval in steps")->capture_default_str();
        cmd->add_option("--step-seconds", step_seconds)->capture_default_str();
        cmd->add_option("--initial-lambda", initial_lambda,
                        "Rate of the zero-truncated Poisson initial occupancy (default: lambda)");
        cmd->add_flag("--exclude-forced-length", exclude_forced,
                      "Leave the forced deadline release out of platoon-length statistics");
        cmd->add_option("--out", out_path, "Output CSV (default: stdout)");
        cmd->add_option("--vehicle-utility-out", vehicle_utility_out,
                        "Also write per-vehicle own-wait utility CSV");
        sub = cmd;
    }

    int run(std::ostream& out) const {
        if (points < 1 || !(lambda_min >= 0.0) || !(lambda_max >= lambda_min)) {
            throw std::invalid_argument("invalid rate grid");
        }
        std::vector<PolicyKind> kinds;
        for (const auto& p : policies) {
            kinds.push_back(parse_policy(p, period));
        }
        SimConfig base;
        base.step_seconds = step_seconds;
        base.horizon_steps = horizon;
        base.params = RewardParams::from_ratio(ratio);
        base.samples = samples;
        base.master_seed = seed;
        base.initial_lambda = initial_lambda;
        base.include_forced_in_length = !exclude_forced;
        base.validate();

        // Open outputs before the long run so a bad path fails fast.
        std::ofstream file;
        if (!out_path.empty()) {
            file = open_output(out_path);
        }
        std::ofstream alt;
        if (!vehicle_utility_out.empty()) {
            alt = open_output(vehicle_utility_out);
        }

        const auto grid = linear_grid(lambda_min, lambda_max, points);
        const auto rows = sweep(grid, kinds, base);

        std::ostringstream csv;
        csv << kSweepHeader << '\n';
        for (const auto& r : rows) {
            const auto& m = r.metrics;
            csv << fmt_double(r.lambda) << ',' << policy_name(r.policy) << ',' << r.threshold.to_string()
                << ',' << fmt_double(m.mean_utility) << ',' << fmt_double(m.ci_utility) << ','
                << fmt_double(m.mean_platoon_length) << ',' << fmt_double(m.ci_platoon_length) << ','
                << fmt_double(m.mean_wait_steps) << ',' << fmt_double(m.ci_wait_steps) << ','
                << m.vehicles << ',' << m.platoons << '\n';
        }
        if (out_path.empty()) {
            out << csv.str();
        } else {
            file << csv.str();
        }

        if (alt.is_open()) {
            alt << "lambda,policy,mean_vehicle_utility,ci_vehicle_utility\n";
            for (const auto& r : rows) {
                alt << fmt_double(r.lambda) << ',' << policy_name(r.policy) << ','
                    << fmt_double(r.metrics.mean_vehicle_utility) << ','
                    << fmt_double(r.metrics.ci_vehicle_utility) << '\n';
            }
        }

        if (!out_path.empty()) {
            ordered_json m = base_manifest("sweep");
            m["lambda_min"] = lambda_min;
            m["lambda_max"] = lambda_max;
            m["points"] = points;
            m["ratio"] = ratio;
            m["policies"] = policies;
            m["samples"] = samples;
            m["horizon"] = horizon;
            m["master_seed"] = seed;
            m["period"] = period;
            m["step_seconds"] = step_seconds;
            m["initial_lambda"] = initial_lambda ? ordered_json(*initial_lambda) : ordered_json("lambda");
            m["include_forced_in_length"] = !exclude_forced;
            m["outputs"] = {out_path};
            if (!vehicle_utility_out.empty()) {
                m["outputs"].push_back(vehicle_utility_out);
            }
            write_manifest(out_path, m);
        }
        return kOk;
    }

    CLI::App* sub = nullptr;
};

// ---- hour ------------------------------------------------------------------

struct HourCmd {
    double lambda = 1.0 / 6.0;
    double ratio = 0.005;
    std::string policy = "optimal";
    std::int64_t period = 60;
    std::int64_t horizon = 720;
    std::uint64_t seed = 1;
    std::int64_t sample = 0;

    void attach(CLI::App& app) {
        auto* cmd = app.add_subcommand("hour", "Release trace of one simulated hour");
        cmd->add_option("--lambda", lambda)->capture_default_str();
        cmd->add_option("--ratio", ratio)->capture_default_str();
        cmd->add_option("--policy", policy)->capture_default_str();
        cmd->add_option("--period", period)->capture_default_str();
        cmd->add_option("--horizon", horizon)->capture_default_str();
        cmd->add_option("--seed", seed)->capture_default_str();
        cmd->add_option("--sample", sample, "Sample index within the seed's stream")->capture_default_str();
        sub = cmd;
    }

    int run(std::ostream& out) const {
        SimConfig cfg;
        cfg.lambda = lambda;
        cfg.params = RewardParams::from_ratio(ratio);
        cfg.policy = parse_policy(policy, period);
        cfg.horizon_steps = horizon;
        cfg.master_seed = seed;
        const HubSimulator sim(cfg);
        const Realization r = sim.draw(sample);
        const HourResult hour = sim.run(r);
        verify_hour(r, hour);
        out << "release_step,size,forced\n";
        for (const auto& p : hour.platoons) {
            out << p.release_step << ',' << p.size << ',' << (p.forced ? 1 : 0) << '\n';
        }
        return kOk;
    }

    CLI::App* sub = nullptr;
};

// ---- ingest ----------------------------------------------------------------

struct IngestCmd {
    std::string file;
    std::string stop_fraction;
    double step_seconds = 5.0;
    std::string out_path;

    void attach(CLI::App& app) {
        auto* cmd = app.add_subcommand("ingest", "Convert hourly truck counts to per-step arrival rates");
        cmd->add_option("--file", file, "CSV with header 'hour,count'")->required();
        cmd->add_option("--stop-fraction", stop_fraction,
                        "Share of passing trucks that stop, e.g. 0.36 or 120/330")
            ->required();
        cmd->add_option("--step-seconds", step_seconds)->capture_default_str();
        cmd->add_option("--out", out_path, "Output CSV (default: stdout)");
        sub = cmd;
    }

    int run(std::ostream& out) const {
        const double fraction = parse_fraction(stop_fraction);
        const auto counts = parse_counts_csv(std::filesystem::path(file));
        std::ostringstream csv;
        csv << "hour,lambda\n";
        for (const auto& c : counts) {
            csv << c.hour_of_day << ',' << fmt_double(to_lambda(c, fraction, step_seconds)) << '\n';
        }
        if (out_path.empty()) {
            out << csv.str();
            return kOk;
        }
        auto f = open_output(out_path);
        f << csv.str();
        ordered_json m = base_manifest("ingest");
        m["file"] = file;
        m["stop_fraction"] = fraction;
        m["step_seconds"] = step_seconds;
        m["outputs"] = {out_path};
        write_manifest(out_path, m);
        return kOk;
    }

    CLI::App* sub = nullptr;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hub platoon release: optimal stopping threshold, DP check and policy simulation",
                 "platoon"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    ThresholdCmd threshold;
    DpVerifyCmd dp_verify;
    SweepCmd sweep_cmd;
    HourCmd hour;
    IngestCmd ingest;
    threshold.attach(app);
    dp_verify.attach(app);
    sweep_cmd.attach(app);
    hour.attach(app);
    ingest.attach(app);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsageError;
    }

    try {
        if (threshold.sub->parsed()) {
            return threshold.run(out);
        }
        if (dp_verify.sub->parsed()) {
            return dp_verify.run(out);
        }
        if (sweep_cmd.sub->parsed()) {
            return sweep_cmd.run(out);
        }
        if (hour.sub->parsed()) {
            return hour.run(out);
        }
        if (ingest.sub->parsed()) {
            return ingest.run(out);
        }
    } catch (const CLI::RequiredError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kDomainError;
    }
    return kUsageError;
}

}  // namespace platoon::cli
