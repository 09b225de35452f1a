#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "waasim/rng.hpp"
#include "waasim/types.hpp"

namespace waasim {

/// Bounded log-uniform draw; the workhorse for task and data magnitudes.
struct LogUniform {
    double lo = 1.0;
    double hi = 1.0;
    double sample(RngStreams& rng, RngStreams::Stream stream) const;
};

/// Calibration knobs for one synthetic application profile. The DAG wiring
/// itself (fan-outs, joins, chain depths) is fixed per app; these bound the
/// drawn task lengths and data volumes.
struct TemplateParams {
    LogUniform mi{50, 300};
    LogUniform data_mb{20, 200};
    LogUniform heavy_data_mb{0, 0};  // only used by profiles with bulk producers
    double width_frac = 0.2;         // dominant parallel level as a fraction of n
    // Assertable shape bounds: widest level / task count must land here.
    double width_frac_min = 0.0;
    double width_frac_max = 1.0;
};

struct TemplateSet {
    std::map<std::string, TemplateParams> apps;
    static TemplateSet defaults();
    const TemplateParams& at(const std::string& app) const;
};

const std::vector<std::string>& known_app_types();

enum class BudgetMode {
    UniformMinMax,      // uniform in [min_cost_estimate, max_cost_estimate]
    UniformSufficient,  // floor raised to the cheapest-type distribution total
};

struct WorkloadSpec {
    int count = 10;
    double arrival_rate_per_min = 1.0;
    std::uint64_t seed = 42;
    std::vector<std::string> app_types;     // empty = all known
    std::vector<std::string> size_classes;  // empty = {small, medium, large}
    BudgetMode budget_mode = BudgetMode::UniformMinMax;
};

int size_class_target(const std::string& size_class);
std::string size_class_for_count(std::size_t task_count);

/// Instantiates one workflow of the given app profile with exactly n tasks.
/// Ids are canonical ("<workflow>/<local>") and the DAG is validated.
WorkflowJob instantiate_template(const std::string& workflow_id, const std::string& app,
                                 const TemplateParams& params, int n, RngStreams& rng);

/// Cost of running every task sequentially on one cheapest-type VM:
/// provisioning and container delays charged once, inputs read from global
/// storage only when no task of the workflow produced them.
Cents min_cost_estimate(const WorkflowJob& wf, const CloudConfig& config);

/// Cost of running every task on its own fresh fastest-type VM with all
/// transfers uncached.
Cents max_cost_estimate(const WorkflowJob& wf, const CloudConfig& config);

/// Uniform integer draw between the two estimates (budget stream).
Cents assign_budget(const WorkflowJob& wf, const CloudConfig& config, RngStreams& rng,
                    BudgetMode mode = BudgetMode::UniformMinMax);

/// Poisson arrivals, uniform template mix, budgets via assign_budget; fully
/// reproducible from spec.seed.
std::vector<WorkflowJob> generate_workload(const WorkloadSpec& spec, const CloudConfig& config,
                                           const TemplateSet& templates);

struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_no, const std::string& what)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + what), line(line_no) {}
};

struct WorkloadHeader {
    int format_version = 1;
    std::uint64_t seed = 0;
    double arrival_rate_per_min = 1.0;
};

/// Writes the line-delimited workload document (one JSON record per line).
void save_workload(const std::filesystem::path& path, const std::vector<WorkflowJob>& jobs,
                   const WorkloadHeader& header);

/// Parses and validates a workload file. Workflows missing budget_cents or
/// arrival_s get them filled from the header's seed and rate. Unknown record
/// kinds or fields are rejected with line context.
std::vector<WorkflowJob> load_workload(const std::filesystem::path& path,
                                       const CloudConfig& config);

}  // namespace waasim
