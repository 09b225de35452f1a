#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "waasim/scheduler.hpp"
#include "waasim/workload.hpp"

namespace waasim {

struct SweepAxes {
    std::vector<double> arrival_rate{0.5, 1, 6, 12};        // workflows per minute
    std::vector<double> cpu_degradation{20, 40, 60, 80};    // max percent
    std::vector<double> vm_delay{45, 90, 135, 180};         // seconds
    std::vector<double> container_delay{10, 20, 30, 40, 50};
};

struct ExperimentConfig {
    CloudConfig cloud;
    WorkloadSpec workload;
    TemplateSet templates = TemplateSet::defaults();
    SharingPolicy policy = SharingPolicy::Full;
    int replications = 1;
    std::uint64_t master_seed = 42;
    SweepAxes sweeps;
    std::string workload_file;  // when set, load instead of generating
    bool trace = false;
};

/// Table-2-style four-type catalogue with per-second billing, one container
/// image per known app type, and the default degradation model.
ExperimentConfig default_experiment_config();

/// Strict JSON parse over default_experiment_config(); unknown keys rejected.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct WorkflowMetrics {
    std::string id;
    std::string app_type;
    std::string size_class;
    double arrival_s = 0.0;
    double makespan_s = 0.0;
    Cents cost = 0;
    Cents budget = 0;
    bool met = true;
    double cost_budget_ratio = 0.0;
};

struct ReplicationMetrics {
    int replication = 0;
    std::uint64_t seed = 0;
    std::vector<WorkflowMetrics> workflows;
    double avg_vm_utilization = 0.0;  // busy seconds / charged seconds, all VMs
    std::map<std::string, std::size_t> vm_count_by_type;
    Cents total_charged_cents = 0;
    Cents total_attributed_cents = 0;
    double final_clock_s = 0.0;
    std::uint64_t events = 0;

    double budget_met_pct() const;
};

/// Generates (or loads) the workload for one replication seed, runs the
/// engine plus scheduler to idle and computes the metrics.
ReplicationMetrics run_replication(const ExperimentConfig& config, int replication,
                                   std::ostream* trace_sink = nullptr);

/// All replications in seed order; writes per-replication outputs (and event
/// traces when configured) under out_dir if given.
std::vector<ReplicationMetrics> run_experiment(
    const ExperimentConfig& config,
    const std::optional<std::filesystem::path>& out_dir = std::nullopt);

/// Nearest-rank percentile: element at ceil(pct/100 * n), 1-indexed.
double nearest_rank_percentile(std::vector<double> values, double pct);

struct AppAggregate {
    std::size_t count = 0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
};

struct Summary {
    int replication_count = 0;
    std::size_t workflow_count = 0;
    double budget_met_pct = 0.0;  // mean of per-replication percentages
    std::size_t violated_count = 0;
    std::map<int, double> violated_ratio_percentiles;  // keys 10,30,50,70,90
    double utilization_mean = 0.0;
    double median_makespan_all = 0.0;
    std::map<std::string, AppAggregate> makespan_by_app;
    std::map<std::string, double> mean_vm_count_by_type;
};

Summary summarize(const std::vector<ReplicationMetrics>& metrics);

struct EmitOptions {
    bool boxplots = true;
};

/// Writes rep_<k>/workflows.csv and rep_<k>/platform.csv, a summary.csv and
/// report.txt, plus an SVG makespan boxplot per app type. The directory must
/// already exist.
void emit_outputs(const Summary& summary, const std::vector<ReplicationMetrics>& metrics,
                  const std::filesystem::path& out_dir, const EmitOptions& options = {});

/// Reads metrics back from a directory produced by emit_outputs.
std::vector<ReplicationMetrics> load_metrics(const std::filesystem::path& dir);

/// Returns a copy of the config with one sweep axis applied.
/// Axis names: arrival_rate | cpu_degradation | vm_delay | container_delay.
ExperimentConfig apply_sweep_axis(const ExperimentConfig& config, const std::string& axis,
                                  double value);
const std::vector<double>& sweep_values(const ExperimentConfig& config, const std::string& axis);

}  // namespace waasim
