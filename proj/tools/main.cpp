// Command-line front end: workload generation, experiment runs, sensitivity
// sweeps and report aggregation over stored metrics.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "waasim/harness.hpp"

namespace fs = std::filesystem;
using namespace waasim;

namespace {

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> policy;
    std::optional<int> replications;
    bool trace = false;
};

ExperimentConfig resolve_config(const CommonOpts& opts) {
    ExperimentConfig config = opts.config_path.empty()
                                  ? default_experiment_config()
                                  : load_experiment_config(opts.config_path);
    if (opts.seed) config.master_seed = *opts.seed;
    if (opts.policy) config.policy = parse_policy(*opts.policy);
    if (opts.replications) config.replications = *opts.replications;
    if (opts.trace) config.trace = true;
    config.cloud.finalize();
    return config;
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_trace = true) {
    cmd->add_option("--config", opts.config_path, "experiment config file (JSON)");
    cmd->add_option("--seed", opts.seed, "master seed override");
    cmd->add_option("--policy", opts.policy, "sharing policy: full|ns|ws|nc");
    cmd->add_option("--replications", opts.replications, "replication count override");
    if (with_trace) cmd->add_flag("--trace", opts.trace, "export per-event trace files");
}

std::string trim_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

void print_summary(const Summary& s) {
    std::printf("replications=%d workflows=%zu budget_met=%.2f%% utilization=%.2f%% "
                "median_makespan=%.1fs violations=%zu\n",
                s.replication_count, s.workflow_count, s.budget_met_pct,
                s.utilization_mean * 100.0, s.median_makespan_all, s.violated_count);
    for (const auto& [app, agg] : s.makespan_by_app) {
        std::printf("  %-12s median=%.1fs q1=%.1fs q3=%.1fs n=%zu\n", app.c_str(), agg.median,
                    agg.q1, agg.q3, agg.count);
    }
    if (!s.violated_ratio_percentiles.empty()) {
        std::printf("  cost/budget over violations:");
        for (const auto& [p, v] : s.violated_ratio_percentiles) std::printf(" p%d=%.3f", p, v);
        std::printf("\n");
    }
}

int cmd_generate(const CommonOpts& opts, const std::string& out_file,
                 std::optional<int> count, std::optional<double> rate) {
    ExperimentConfig config = resolve_config(opts);
    WorkloadSpec spec = config.workload;
    spec.seed = config.master_seed;
    if (count) spec.count = *count;
    if (rate) spec.arrival_rate_per_min = *rate;
    auto jobs = generate_workload(spec, config.cloud, config.templates);
    WorkloadHeader header{1, spec.seed, spec.arrival_rate_per_min};
    save_workload(out_file, jobs, header);
    std::size_t tasks = 0;
    for (const auto& wf : jobs) tasks += wf.tasks.size();
    std::printf("wrote %zu workflows (%zu tasks) to %s\n", jobs.size(), tasks, out_file.c_str());
    return 0;
}

int cmd_run(const CommonOpts& opts, const std::string& workload_file, const std::string& out) {
    ExperimentConfig config = resolve_config(opts);
    if (!workload_file.empty()) config.workload_file = workload_file;

    std::optional<fs::path> out_dir;
    if (!out.empty()) {
        fs::create_directories(out);
        out_dir = fs::path(out);
    }
    auto metrics = run_experiment(config, out_dir);
    Summary summary = summarize(metrics);
    if (out_dir) emit_outputs(summary, metrics, *out_dir);
    print_summary(summary);
    return 0;
}

int cmd_sweep(const CommonOpts& opts, const std::string& axis,
              const std::vector<double>& values_arg, const std::string& out) {
    ExperimentConfig base = resolve_config(opts);
    const std::vector<double>& values =
        values_arg.empty() ? sweep_values(base, axis) : values_arg;

    std::optional<fs::path> out_root;
    if (!out.empty()) {
        fs::create_directories(out);
        out_root = fs::path(out);
    }

    std::vector<std::pair<double, Summary>> points;
    for (double value : values) {
        ExperimentConfig point = apply_sweep_axis(base, axis, value);
        std::optional<fs::path> point_dir;
        if (out_root) {
            point_dir = *out_root / (axis + "_" + trim_number(value));
            fs::create_directories(*point_dir);
        }
        auto metrics = run_experiment(point, point_dir);
        Summary summary = summarize(metrics);
        if (point_dir) emit_outputs(summary, metrics, *point_dir);
        std::printf("--- %s = %s\n", axis.c_str(), trim_number(value).c_str());
        print_summary(summary);
        points.emplace_back(value, summary);
    }

    if (out_root) {
        std::ofstream csv(*out_root / "sweep_summary.csv");
        csv << "axis,value,budget_met_pct,utilization_mean,median_makespan_s,violated_count,"
               "violated_p90";
        std::set<std::string> apps;
        for (const auto& [value, s] : points) {
            for (const auto& [app, agg] : s.makespan_by_app) apps.insert(app);
        }
        for (const auto& app : apps) csv << ",median_" << app;
        csv << '\n';
        for (const auto& [value, s] : points) {
            csv << axis << ',' << trim_number(value) << ',' << s.budget_met_pct << ','
                << s.utilization_mean << ',' << s.median_makespan_all << ',' << s.violated_count
                << ',';
            if (s.violated_ratio_percentiles.count(90)) {
                csv << s.violated_ratio_percentiles.at(90);
            }
            for (const auto& app : apps) {
                csv << ',';
                auto it = s.makespan_by_app.find(app);
                if (it != s.makespan_by_app.end()) csv << it->second.median;
            }
            csv << '\n';
        }
    }
    return 0;
}

int cmd_report(const std::vector<std::string>& in_dirs, const std::string& out) {
    std::vector<ReplicationMetrics> merged;
    for (const auto& dir : in_dirs) {
        auto metrics = load_metrics(dir);
        merged.insert(merged.end(), metrics.begin(), metrics.end());
    }
    Summary summary = summarize(merged);
    print_summary(summary);
    if (!out.empty()) {
        fs::create_directories(out);
        emit_outputs(summary, merged, out);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-tenant workflow platform simulator"};
    app.require_subcommand(1);

    CommonOpts gen_opts, run_opts, sweep_opts;
    std::string gen_out = "workload.jsonl";
    std::optional<int> gen_count;
    std::optional<double> gen_rate;
    auto* generate = app.add_subcommand("generate", "generate a workload file");
    add_common(generate, gen_opts, false);
    generate->add_option("--out", gen_out, "workload file to write");
    generate->add_option("--count", gen_count, "workflow count override");
    generate->add_option("--rate", gen_rate, "arrival rate override (workflows/min)");

    std::string run_workload, run_out;
    auto* run = app.add_subcommand("run", "run an experiment");
    add_common(run, run_opts);
    run->add_option("--workload", run_workload, "workload file (skips generation)");
    run->add_option("--out", run_out, "output directory for CSVs and report");

    std::string sweep_axis = "arrival_rate", sweep_out;
    std::vector<double> sweep_values_arg;
    auto* sweep = app.add_subcommand("sweep", "sweep one sensitivity axis");
    add_common(sweep, sweep_opts);
    sweep->add_option("--axis", sweep_axis,
                      "arrival_rate|cpu_degradation|vm_delay|container_delay");
    sweep->add_option("--values", sweep_values_arg, "axis values (default from config)");
    sweep->add_option("--out", sweep_out, "output directory");

    std::vector<std::string> report_in;
    std::string report_out;
    auto* report = app.add_subcommand("report", "summarize stored metrics");
    report->add_option("--in", report_in, "run output directories")->required();
    report->add_option("--out", report_out, "directory for the merged summary");

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) return cmd_generate(gen_opts, gen_out, gen_count, gen_rate);
        if (run->parsed()) return cmd_run(run_opts, run_workload, run_out);
        if (sweep->parsed()) return cmd_sweep(sweep_opts, sweep_axis, sweep_values_arg, sweep_out);
        if (report->parsed()) return cmd_report(report_in, report_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
