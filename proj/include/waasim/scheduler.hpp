#pragma once

#include <string>
#include <vector>

#include "waasim/engine.hpp"
#include "waasim/types.hpp"

namespace waasim {

/// Which idle VMs a task may reuse.
///   Full       - any idle VM (containers carry the software).
///   NoSharing  - only VMs provisioned by the task's own workflow; those VMs
///                are torn down when the workflow completes.
///   WithinApp  - only VMs first provisioned for the same application type.
///   NoContainer- full sharing with container handling disabled entirely
///                (every VM is treated as holding every image, init delay 0).
enum class SharingPolicy { Full, NoSharing, WithinApp, NoContainer };

const char* to_string(SharingPolicy p);
SharingPolicy parse_policy(const std::string& text);  // full | ns | ws | nc

/// level(t) = 0 for entry tasks, else 1 + max over predecessors.
void assign_levels(WorkflowJob& wf);

/// Earliest-finish-time estimate per task: PT for entry tasks, else
/// max(eft(pred)) + PT, with PT in estimation mode on the reference type.
std::vector<double> estimate_eft(const WorkflowJob& wf, const VmType& reference_type,
                                 const GlobalStorage& gs);

/// Tasks grouped by ascending level; within a level ascending EFT, ties by
/// task id.
std::vector<std::size_t> build_execution_order(const WorkflowJob& wf,
                                               const std::vector<double>& eft);

struct InsufficientBudget : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BudgetDistribution {
    std::vector<Cents> sub_budgets;        // aligned with `order`
    std::vector<std::size_t> type_choice;  // catalogue index funded per task
    Cents spare = 0;
    Cents shortfall = 0;  // > 0 when the budget cannot cover cheapest-type costs
};

/// Slowest-first budget distribution. Pass 1 prices every task at the
/// cheapest type with both delay flags set; pass 2 walks `order` from the
/// front, stepping each task one type at a time toward the fastest while the
/// upgrade increment fits the remaining budget. The leftover becomes spare.
/// In tolerant mode (strict=false) an uncoverable budget pins all tasks at
/// the cheapest type and reports the gap as `shortfall`.
BudgetDistribution distribute_budget(Cents budget, const std::vector<std::size_t>& order,
                                     const WorkflowJob& wf, const CloudConfig& config,
                                     bool strict = false);

/// Sum of cheapest-type, both-delay task costs: the budget needed for a
/// distribution with no shortfall.
Cents distribution_floor(const WorkflowJob& wf, const CloudConfig& config);

/// Post-completion pool arithmetic: the budget available for redistribution
/// over the unscheduled tasks. A surplus (actual within sub-budget plus
/// spare) flows back in; an overrun is deducted as debt. May go negative.
Cents budget_update_pool(Cents actual_cost, Cents sub_budget, Cents spare,
                         Cents unscheduled_total);

/// One conservation snapshot per (re)distribution, recorded when auditing is
/// enabled. Exact identity:
///   spend + committed + unscheduled + spare == budget + shortfall
struct LedgerAudit {
    std::size_t workflow;
    Cents spend;
    Cents committed;    // sub-budgets of placed, unfinished tasks
    Cents unscheduled;  // sub-budgets still subject to redistribution
    Cents spare;
    Cents budget;
    Cents shortfall;
    bool balanced() const {
        return spend + committed + unscheduled + spare == budget + shortfall;
    }
};

struct SchedulerOptions {
    SharingPolicy policy = SharingPolicy::Full;
    bool strict_budget = false;
    bool audit_ledger = false;
};

/// Pure eligibility rule applied before the placement tiers; kept free for
/// property testing. `owner_workflow`/`origin_app` describe the candidate VM.
bool vm_eligible(SharingPolicy policy, std::size_t owner_workflow,
                 const std::string& origin_app, std::size_t task_workflow,
                 const std::string& task_app);

/// Budget-constrained provisioning and scheduling of a multi-workflow load:
/// per-workflow budget distribution on arrival, earliest-start-time ordered
/// placement over a three-tier idle-VM preference with a provisioning
/// fallback, a spare-budget update after every completion, and periodic
/// termination of VMs idle beyond the threshold.
class EbpsmScheduler final : public EventHandler {
public:
    EbpsmScheduler(Simulation& sim, std::vector<WorkflowJob>& jobs, SchedulerOptions options);

    void on_workflow_arrival(std::size_t workflow) override;
    void on_vm_provisioned(VmId vm) override;
    void on_container_deployed(VmId vm, const std::string& image) override;
    void on_task_started(std::size_t workflow, std::size_t task, VmId vm) override;
    void on_task_finished(std::size_t workflow, std::size_t task, VmId vm) override;
    void on_provision_check() override;

    // Results and introspection.
    Cents workflow_spend(std::size_t workflow) const { return runs_[workflow].spend; }
    double workflow_finish(std::size_t workflow) const { return runs_[workflow].exit_finish; }
    bool workflow_done(std::size_t workflow) const;
    Cents task_actual_cost(std::size_t workflow, std::size_t task) const;
    VmId task_vm(std::size_t workflow, std::size_t task) const;
    std::uint64_t reuse_count() const { return reuse_count_; }
    std::uint64_t cycles_run() const { return cycles_; }
    std::uint64_t terminations() const { return terminations_; }
    const std::vector<LedgerAudit>& audits() const { return audits_; }

private:
    struct TaskRun {
        VmId vm = 0;
        double claimed_at = 0.0;
        double delays_s = 0.0;     // provisioning/init charged to this task
        double work_s = 0.0;       // staging + execution + write-back
        double occupancy_s = 0.0;  // delays_s + work_s
        double actual_finish = 0.0;
        Cents actual_cost = 0;
        Cents frozen_sub_budget = 0;
        bool fresh_vm = false;
    };

    struct WorkflowRun {
        std::vector<double> eft;
        std::vector<std::size_t> order;
        std::vector<std::size_t> pending_preds;
        std::vector<std::size_t> type_choice;
        std::vector<TaskRun> task_runs;
        Cents spend = 0;
        Cents committed = 0;
        Cents shortfall = 0;
        std::size_t completed = 0;
        double exit_finish = 0.0;
        bool violated_in_progress = false;
        const ContainerImage* image = nullptr;
    };

    struct VmMeta {
        std::size_t owner_workflow = kNoIndex;
        std::string origin_app;
        std::size_t bound_workflow = kNoIndex;
        std::size_t bound_task = kNoIndex;
    };

    struct QueueEntry {
        double est = 0.0;
        double arrival = 0.0;
        std::size_t workflow = kNoIndex;
        std::size_t task = kNoIndex;
    };

    struct Candidate {
        VmId vm = 0;
        double finish = 0.0;
        Cents cost = 0;
    };

    bool containers_enabled() const { return options_.policy != SharingPolicy::NoContainer; }
    VmMeta& meta(VmId id);
    bool queue_order_before(const QueueEntry& a, const QueueEntry& b) const;
    void run_cycle();
    void place_task(std::size_t workflow, std::size_t task);
    Candidate estimate_on_vm(std::size_t workflow, std::size_t task, const Vm& vm) const;
    void claim_warm(std::size_t workflow, std::size_t task, VmId vm);
    void provision_fresh(std::size_t workflow, std::size_t task, std::size_t type_index);
    void begin_work(VmId vm);
    void update_budget(std::size_t workflow, std::size_t task);
    void redistribute(std::size_t workflow, Cents pool);
    void record_audit(std::size_t workflow);
    void enqueue_ready(std::size_t workflow, std::size_t task);

    Simulation& sim_;
    std::vector<WorkflowJob>& jobs_;
    SchedulerOptions options_;
    std::vector<WorkflowRun> runs_;
    std::vector<VmMeta> vm_meta_;  // indexed by VmId - 1
    std::vector<QueueEntry> queue_;
    std::vector<LedgerAudit> audits_;
    std::uint64_t reuse_count_ = 0;
    std::uint64_t cycles_ = 0;
    std::uint64_t terminations_ = 0;
};

}  // namespace waasim
