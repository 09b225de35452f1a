#include "waasim/scheduler.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "waasim/costs.hpp"

namespace waasim {

const char* to_string(SharingPolicy p) {
    switch (p) {
        case SharingPolicy::Full: return "full";
        case SharingPolicy::NoSharing: return "ns";
        case SharingPolicy::WithinApp: return "ws";
        case SharingPolicy::NoContainer: return "nc";
    }
    return "?";
}

SharingPolicy parse_policy(const std::string& text) {
    if (text == "full") return SharingPolicy::Full;
    if (text == "ns") return SharingPolicy::NoSharing;
    if (text == "ws") return SharingPolicy::WithinApp;
    if (text == "nc") return SharingPolicy::NoContainer;
    throw std::invalid_argument("unknown sharing policy '" + text +
                                "' (expected full|ns|ws|nc)");
}

namespace {

std::vector<std::size_t> topological_order(const WorkflowJob& wf) {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < wf.tasks.size(); ++i) index.emplace(wf.tasks[i].id, i);
    std::vector<std::size_t> in_degree(wf.tasks.size());
    for (std::size_t i = 0; i < wf.tasks.size(); ++i) {
        in_degree[i] = wf.tasks[i].predecessors.size();
    }
    std::vector<std::size_t> frontier;
    for (std::size_t i = 0; i < wf.tasks.size(); ++i) {
        if (in_degree[i] == 0) frontier.push_back(i);
    }
    std::vector<std::size_t> order;
    order.reserve(wf.tasks.size());
    for (std::size_t head = 0; head < frontier.size(); ++head) {
        std::size_t i = frontier[head];
        order.push_back(i);
        for (const auto& s : wf.tasks[i].successors) {
            std::size_t j = index.at(s);
            if (--in_degree[j] == 0) frontier.push_back(j);
        }
    }
    assert(order.size() == wf.tasks.size());
    return order;
}

}  // namespace

void assign_levels(WorkflowJob& wf) {
    auto order = topological_order(wf);
    for (std::size_t i : order) {
        Task& t = wf.tasks[i];
        if (t.predecessors.empty()) {
            t.level = 0;
            continue;
        }
        int best = 0;
        for (const auto& p : t.predecessors) {
            best = std::max(best, wf.tasks[wf.task_index(p)].level + 1);
        }
        t.level = best;
    }
}

std::vector<double> estimate_eft(const WorkflowJob& wf, const VmType& reference_type,
                                 const GlobalStorage& gs) {
    std::vector<double> eft(wf.tasks.size(), 0.0);
    for (std::size_t i : topological_order(wf)) {
        const Task& t = wf.tasks[i];
        double start = 0.0;
        for (const auto& p : t.predecessors) {
            start = std::max(start, eft[wf.task_index(p)]);
        }
        eft[i] = start + processing_time_estimate(t, wf, reference_type, gs);
    }
    return eft;
}

std::vector<std::size_t> build_execution_order(const WorkflowJob& wf,
                                               const std::vector<double>& eft) {
    std::vector<std::size_t> order(wf.tasks.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const Task& ta = wf.tasks[a];
        const Task& tb = wf.tasks[b];
        if (ta.level != tb.level) return ta.level < tb.level;
        if (eft[a] != eft[b]) return eft[a] < eft[b];
        return ta.id < tb.id;
    });
    return order;
}

BudgetDistribution distribute_budget(Cents budget, const std::vector<std::size_t>& order,
                                     const WorkflowJob& wf, const CloudConfig& config,
                                     bool strict) {
    const auto& catalogue = config.vm_catalogue;
    auto cost_on = [&](std::size_t task_index, std::size_t type_index) {
        const Task& t = wf.tasks[task_index];
        double pt = processing_time_estimate(t, wf, catalogue[type_index], config.global_storage);
        return task_cost(pt, true, true, catalogue[type_index], config, t.app_type);
    };

    BudgetDistribution out;
    out.sub_budgets.resize(order.size());
    out.type_choice.assign(order.size(), 0);
    Cents total_cheapest = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        out.sub_budgets[i] = cost_on(order[i], 0);
        total_cheapest += out.sub_budgets[i];
    }

    if (budget < total_cheapest) {
        if (strict) {
            throw InsufficientBudget("budget " + std::to_string(budget) +
                                     " cents below cheapest-type total of " +
                                     std::to_string(total_cheapest));
        }
        out.spare = 0;
        out.shortfall = total_cheapest - budget;
        return out;
    }

    Cents remaining = budget - total_cheapest;
    for (std::size_t i = 0; i < order.size(); ++i) {
        while (out.type_choice[i] + 1 < catalogue.size()) {
            Cents next = cost_on(order[i], out.type_choice[i] + 1);
            Cents increment = next - out.sub_budgets[i];
            if (increment > remaining) break;
            remaining -= increment;
            out.sub_budgets[i] = next;
            ++out.type_choice[i];
        }
    }
    out.spare = remaining;
    return out;
}

Cents distribution_floor(const WorkflowJob& wf, const CloudConfig& config) {
    Cents total = 0;
    for (const auto& t : wf.tasks) {
        double pt = processing_time_estimate(t, wf, config.cheapest_type(), config.global_storage);
        total += task_cost(pt, true, true, config.cheapest_type(), config, t.app_type);
    }
    return total;
}

Cents budget_update_pool(Cents actual_cost, Cents sub_budget, Cents spare,
                         Cents unscheduled_total) {
    Cents pool = sub_budget + spare;
    if (actual_cost <= pool) {
        return unscheduled_total + (pool - actual_cost);
    }
    return unscheduled_total - (actual_cost - pool);
}

bool vm_eligible(SharingPolicy policy, std::size_t owner_workflow,
                 const std::string& origin_app, std::size_t task_workflow,
                 const std::string& task_app) {
    switch (policy) {
        case SharingPolicy::Full:
        case SharingPolicy::NoContainer:
            return true;
        case SharingPolicy::WithinApp:
            return origin_app == task_app;
        case SharingPolicy::NoSharing:
            return owner_workflow == task_workflow;
    }
    return false;
}

EbpsmScheduler::EbpsmScheduler(Simulation& sim, std::vector<WorkflowJob>& jobs,
                               SchedulerOptions options)
    : sim_(sim), jobs_(jobs), options_(options) {
    runs_.resize(jobs_.size());
    sim_.set_handler(this);
}

bool EbpsmScheduler::workflow_done(std::size_t workflow) const {
    return !jobs_[workflow].tasks.empty() &&
           runs_[workflow].completed == jobs_[workflow].tasks.size();
}

Cents EbpsmScheduler::task_actual_cost(std::size_t workflow, std::size_t task) const {
    return runs_[workflow].task_runs[task].actual_cost;
}

void EbpsmScheduler::on_workflow_arrival(std::size_t w) {
    WorkflowJob& wf = jobs_[w];
    WorkflowRun& run = runs_[w];

    if (containers_enabled()) {
        run.image = sim_.config().image_for_app(wf.app_type);
        if (!run.image) {
            throw std::runtime_error("no container image configured for app type '" +
                                     wf.app_type + "'");
        }
    }

    assign_levels(wf);
    run.eft = estimate_eft(wf, sim_.config().cheapest_type(), sim_.config().global_storage);
    run.order = build_execution_order(wf, run.eft);
    run.pending_preds.resize(wf.tasks.size());
    run.task_runs.resize(wf.tasks.size());
    run.type_choice.assign(wf.tasks.size(), 0);
    for (std::size_t i = 0; i < wf.tasks.size(); ++i) {
        run.pending_preds[i] = wf.tasks[i].predecessors.size();
    }

    auto dist = distribute_budget(wf.budget, run.order, wf, sim_.config(), options_.strict_budget);
    for (std::size_t i = 0; i < run.order.size(); ++i) {
        wf.tasks[run.order[i]].sub_budget = dist.sub_budgets[i];
        run.type_choice[run.order[i]] = dist.type_choice[i];
    }
    wf.spare_budget = dist.spare;
    run.shortfall += dist.shortfall;
    record_audit(w);

    for (std::size_t i : wf.entry_tasks()) enqueue_ready(w, i);
    run_cycle();
}

void EbpsmScheduler::enqueue_ready(std::size_t w, std::size_t t) {
    Task& task = jobs_[w].tasks[t];
    assert(task.state == TaskState::Waiting);
    task.state = TaskState::Ready;
    task.state = TaskState::Queued;
    queue_.push_back(QueueEntry{sim_.now(), jobs_[w].arrival_s, w, t});
}

bool EbpsmScheduler::queue_order_before(const QueueEntry& a, const QueueEntry& b) const {
    if (a.est != b.est) return a.est < b.est;
    if (a.arrival != b.arrival) return a.arrival < b.arrival;
    if (jobs_[a.workflow].id != jobs_[b.workflow].id) {
        return jobs_[a.workflow].id < jobs_[b.workflow].id;
    }
    return jobs_[a.workflow].tasks[a.task].id < jobs_[b.workflow].tasks[b.task].id;
}

void EbpsmScheduler::run_cycle() {
    ++cycles_;
    if (queue_.empty()) return;
    std::vector<QueueEntry> batch;
    batch.swap(queue_);
    std::sort(batch.begin(), batch.end(),
              [this](const QueueEntry& a, const QueueEntry& b) { return queue_order_before(a, b); });
    for (const QueueEntry& entry : batch) place_task(entry.workflow, entry.task);
}

EbpsmScheduler::Candidate EbpsmScheduler::estimate_on_vm(std::size_t w, std::size_t t,
                                                         const Vm& vm) const {
    const WorkflowJob& wf = jobs_[w];
    const Task& task = wf.tasks[t];
    const WorkflowRun& run = runs_[w];
    double occupancy = 0.0;
    if (containers_enabled() && !vm.has_image(run.image->id)) {
        occupancy += run.image->init_delay_s;
    }
    occupancy += processing_time(task, wf, vm, sim_.config().global_storage, 1.0, 1.0);
    return Candidate{vm.id(), sim_.now() + occupancy,
                     occupancy_cost(occupancy, vm.type(), sim_.config().billing_period_s)};
}

void EbpsmScheduler::place_task(std::size_t w, std::size_t t) {
    const WorkflowJob& wf = jobs_[w];
    const Task& task = wf.tasks[t];
    const WorkflowRun& run = runs_[w];

    std::vector<VmId> tiers[3];
    for (VmId id : sim_.active_vms()) {
        const Vm& vm = sim_.vm(id);
        if (vm.state() != VmState::Idle) continue;
        const VmMeta& meta = vm_meta_[id - 1];
        if (!vm_eligible(options_.policy, meta.owner_workflow, meta.origin_app, w,
                         task.app_type)) {
            continue;
        }
        bool has_input = std::any_of(task.inputs.begin(), task.inputs.end(),
                                     [&](const std::string& d) { return vm.cache_contains(d); });
        if (has_input) {
            tiers[0].push_back(id);
        } else if (!containers_enabled() || vm.has_image(run.image->id)) {
            tiers[1].push_back(id);
        } else {
            tiers[2].push_back(id);
        }
    }

    for (const auto& tier : tiers) {
        bool found = false;
        Candidate best{};
        for (VmId id : tier) {
            Candidate c = estimate_on_vm(w, t, sim_.vm(id));
            if (c.cost > task.sub_budget) continue;
            // strict < keeps the lowest VM id on finish-time ties, since the
            // scan runs in ascending id order
            if (!found || c.finish < best.finish) {
                best = c;
                found = true;
            }
        }
        if (found) {
            claim_warm(w, t, best.vm);
            return;
        }
    }

    // Fastest new type whose full cost fits the sub-budget; tolerant
    // fallback provisions the cheapest type when nothing fits.
    const auto& catalogue = sim_.config().vm_catalogue;
    for (std::size_t ti = catalogue.size(); ti-- > 0;) {
        double occupancy = catalogue[ti].provisioning_delay_s +
                           (containers_enabled() ? run.image->init_delay_s : 0.0) +
                           processing_time_estimate(task, wf, catalogue[ti],
                                                    sim_.config().global_storage);
        Cents cost = occupancy_cost(occupancy, catalogue[ti], sim_.config().billing_period_s);
        if (cost <= task.sub_budget) {
            provision_fresh(w, t, ti);
            return;
        }
    }
    provision_fresh(w, t, 0);
}

void EbpsmScheduler::claim_warm(std::size_t w, std::size_t t, VmId id) {
    Task& task = jobs_[w].tasks[t];
    WorkflowRun& run = runs_[w];
    sim_.claim_vm(id);
    VmMeta& meta = vm_meta_[id - 1];
    meta.bound_workflow = w;
    meta.bound_task = t;

    TaskRun& tr = run.task_runs[t];
    tr = TaskRun{};
    tr.vm = id;
    tr.claimed_at = sim_.now();
    tr.frozen_sub_budget = task.sub_budget;
    task.state = TaskState::Running;
    run.committed += tr.frozen_sub_budget;
    ++reuse_count_;

    if (containers_enabled() && !sim_.vm(id).has_image(run.image->id)) {
        tr.delays_s += run.image->init_delay_s;
        bool started = sim_.deploy_container(id, *run.image);
        assert(started);
        (void)started;
    } else {
        begin_work(id);
    }
}

void EbpsmScheduler::provision_fresh(std::size_t w, std::size_t t, std::size_t type_index) {
    Task& task = jobs_[w].tasks[t];
    WorkflowRun& run = runs_[w];
    VmId id = sim_.provision_vm(type_index);
    vm_meta_.resize(std::max<std::size_t>(vm_meta_.size(), id));
    VmMeta& meta = vm_meta_[id - 1];
    meta.owner_workflow = w;
    meta.origin_app = task.app_type;
    meta.bound_workflow = w;
    meta.bound_task = t;

    TaskRun& tr = run.task_runs[t];
    tr = TaskRun{};
    tr.vm = id;
    tr.claimed_at = sim_.now();
    tr.fresh_vm = true;
    tr.delays_s = sim_.config().vm_catalogue[type_index].provisioning_delay_s;
    tr.frozen_sub_budget = task.sub_budget;
    task.state = TaskState::Running;
    run.committed += tr.frozen_sub_budget;
}

void EbpsmScheduler::on_vm_provisioned(VmId id) {
    VmMeta& meta = vm_meta_[id - 1];
    assert(meta.bound_task != kNoIndex);  // fresh VMs are born claimed
    sim_.claim_vm(id);
    WorkflowRun& run = runs_[meta.bound_workflow];
    if (containers_enabled() && !sim_.vm(id).has_image(run.image->id)) {
        run.task_runs[meta.bound_task].delays_s += run.image->init_delay_s;
        sim_.deploy_container(id, *run.image);
    } else {
        begin_work(id);
    }
}

void EbpsmScheduler::on_container_deployed(VmId id, const std::string&) { begin_work(id); }

void EbpsmScheduler::begin_work(VmId id) {
    VmMeta& meta = vm_meta_[id - 1];
    std::size_t w = meta.bound_workflow;
    std::size_t t = meta.bound_task;
    WorkflowJob& wf = jobs_[w];
    const Task& task = wf.tasks[t];
    TaskRun& tr = runs_[w].task_runs[t];
    Vm& vm = sim_.vm(id);

    double cpu_factor = sim_.sample_cpu_factor();
    double bw_in = sim_.sample_bandwidth_factor();
    double bw_out = sim_.sample_bandwidth_factor();

    auto in_items = resolve_items(wf, task.inputs);
    auto out_items = resolve_items(wf, task.outputs);
    const GlobalStorage& gs = sim_.config().global_storage;
    double staging_in = input_transfer_time(in_items, vm, gs, bw_in);
    double runtime = task_runtime(task, vm.type(), cpu_factor);
    double staging_out = output_transfer_time(out_items, vm, gs, bw_out);

    tr.work_s = staging_in + runtime + staging_out;
    tr.occupancy_s = tr.delays_s + tr.work_s;
    tr.actual_finish = tr.claimed_at + tr.occupancy_s;
    tr.actual_cost = occupancy_cost(tr.occupancy_s, vm.type(), sim_.config().billing_period_s);

    // Inputs fetched from global storage become cached alongside the work.
    for (const DataItem* item : in_items) vm.cache_insert(item->id, item->size_mb);

    double bp = sim_.config().billing_period_s;
    double release = tr.claimed_at + std::ceil(tr.occupancy_s / bp) * bp;
    release = std::max(release, sim_.now());

    sim_.schedule_event(Event{sim_.now(), 0, EventKind::TaskStarted, w, t, id, {}});
    sim_.schedule_event(Event{release, 0, EventKind::TaskFinished, w, t, id, {}});
}

void EbpsmScheduler::on_task_started(std::size_t, std::size_t, VmId) {
    // Trace marker; the finish event carries the state change.
}

void EbpsmScheduler::on_task_finished(std::size_t w, std::size_t t, VmId id) {
    WorkflowJob& wf = jobs_[w];
    Task& task = wf.tasks[t];
    WorkflowRun& run = runs_[w];
    TaskRun& tr = run.task_runs[t];
    Vm& vm = sim_.vm(id);

    for (const DataItem* item : resolve_items(wf, task.outputs)) {
        vm.cache_insert(item->id, item->size_mb);
    }

    double bp = sim_.config().billing_period_s;
    double held = std::ceil(tr.occupancy_s / bp) * bp;
    double busy = held - (tr.fresh_vm ? vm.type().provisioning_delay_s : 0.0);
    sim_.release_vm(id, busy);
    vm_meta_[id - 1].bound_workflow = kNoIndex;
    vm_meta_[id - 1].bound_task = kNoIndex;

    task.state = TaskState::Completed;
    ++run.completed;
    run.spend += tr.actual_cost;
    run.committed -= tr.frozen_sub_budget;
    if (task.successors.empty()) {
        run.exit_finish = std::max(run.exit_finish, tr.actual_finish);
    }

    update_budget(w, t);

    for (const auto& s : task.successors) {
        std::size_t child = wf.task_index(s);
        if (--run.pending_preds[child] == 0) enqueue_ready(w, child);
    }

    if (run.completed == wf.tasks.size()) {
        wf.exit_finish_s = run.exit_finish;
        if (options_.policy == SharingPolicy::NoSharing) {
            std::vector<VmId> owned;
            for (VmId v : sim_.active_vms()) {
                if (vm_meta_[v - 1].owner_workflow == w) owned.push_back(v);
            }
            for (VmId v : owned) {
                sim_.terminate_vm(v);
                ++terminations_;
            }
        }
    }

    run_cycle();
}

void EbpsmScheduler::update_budget(std::size_t w, std::size_t t) {
    WorkflowJob& wf = jobs_[w];
    WorkflowRun& run = runs_[w];
    const TaskRun& tr = run.task_runs[t];

    Cents pool = tr.frozen_sub_budget + wf.spare_budget;
    Cents unscheduled_total = 0;
    for (const Task& task : wf.tasks) {
        if (task.state == TaskState::Waiting || task.state == TaskState::Ready ||
            task.state == TaskState::Queued) {
            unscheduled_total += task.sub_budget;
        }
    }

    Cents pool_after;
    if (tr.actual_cost <= pool) {
        Cents sb = pool - tr.actual_cost;
        pool_after = unscheduled_total + sb;
    } else {
        Cents debt = tr.actual_cost - pool;
        pool_after = unscheduled_total - debt;
    }
    redistribute(w, pool_after);
    record_audit(w);
}

void EbpsmScheduler::redistribute(std::size_t w, Cents pool) {
    WorkflowJob& wf = jobs_[w];
    WorkflowRun& run = runs_[w];

    std::vector<std::size_t> suborder;
    for (std::size_t i : run.order) {
        TaskState s = wf.tasks[i].state;
        if (s == TaskState::Waiting || s == TaskState::Ready || s == TaskState::Queued) {
            suborder.push_back(i);
        }
    }

    if (pool < 0) {
        // Residual budget went negative: pin the rest to the cheapest type
        // and mark the violation in progress.
        Cents pinned = 0;
        for (std::size_t i : suborder) {
            double pt = processing_time_estimate(wf.tasks[i], wf, sim_.config().cheapest_type(),
                                                 sim_.config().global_storage);
            wf.tasks[i].sub_budget =
                task_cost(pt, true, true, sim_.config().cheapest_type(), sim_.config(),
                          wf.tasks[i].app_type);
            run.type_choice[i] = 0;
            pinned += wf.tasks[i].sub_budget;
        }
        wf.spare_budget = 0;
        run.shortfall += pinned - pool;
        run.violated_in_progress = true;
        return;
    }

    auto dist = distribute_budget(pool, suborder, wf, sim_.config(), options_.strict_budget);
    for (std::size_t i = 0; i < suborder.size(); ++i) {
        wf.tasks[suborder[i]].sub_budget = dist.sub_budgets[i];
        run.type_choice[suborder[i]] = dist.type_choice[i];
    }
    wf.spare_budget = dist.spare;
    run.shortfall += dist.shortfall;
}

void EbpsmScheduler::record_audit(std::size_t w) {
    if (!options_.audit_ledger) return;
    const WorkflowJob& wf = jobs_[w];
    const WorkflowRun& run = runs_[w];
    Cents unscheduled = 0;
    for (const Task& task : wf.tasks) {
        if (task.state == TaskState::Waiting || task.state == TaskState::Ready ||
            task.state == TaskState::Queued) {
            unscheduled += task.sub_budget;
        }
    }
    audits_.push_back(LedgerAudit{w, run.spend, run.committed, unscheduled, wf.spare_budget,
                                  wf.budget, run.shortfall});
}

void EbpsmScheduler::on_provision_check() {
    std::vector<VmId> expired;
    for (VmId id : sim_.active_vms()) {
        const Vm& vm = sim_.vm(id);
        if (vm.state() != VmState::Idle) continue;
        if (sim_.now() - *vm.idle_since_s() >= sim_.config().idle_threshold_s) {
            expired.push_back(id);
        }
    }
    for (VmId id : expired) {
        sim_.terminate_vm(id);
        ++terminations_;
    }
}

}  // namespace waasim
