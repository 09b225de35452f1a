#pragma once

#include "waasim/types.hpp"

namespace waasim {

/// Closed-form time and cost arithmetic for task execution on the platform.
///
/// Transfer times split into a global-storage term and a VM-bandwidth term;
/// only the bandwidth term is subject to degradation. Runtime scales the task
/// length by the (possibly degraded) machine capacity. Costs round occupancy
/// up to whole billing periods.

/// Seconds to pull one data volume from global storage onto a VM.
double read_seconds(double size_mb, const GlobalStorage& gs, double bandwidth_mb_per_s,
                    double bw_factor);

/// Seconds to push one data volume from a VM to global storage.
double write_seconds(double size_mb, const GlobalStorage& gs, double bandwidth_mb_per_s,
                     double bw_factor);

/// Total input staging time on a live VM. Items already present in the VM's
/// local cache contribute nothing.
double input_transfer_time(const std::vector<const DataItem*>& items, const Vm& vm,
                           const GlobalStorage& gs, double bw_factor);

/// Total output staging time; outputs are always written to global storage.
double output_transfer_time(const std::vector<const DataItem*>& items, const Vm& vm,
                            const GlobalStorage& gs, double bw_factor);

/// size_mi / (cpu_mips * cpu_factor)
double task_runtime(const Task& task, const VmType& vm_type, double cpu_factor);

/// Resolves a task's input/output ids against its workflow's data table.
std::vector<const DataItem*> resolve_items(const WorkflowJob& wf,
                                           const std::vector<std::string>& ids);

/// Input staging + runtime + output staging against a live VM's cache state.
double processing_time(const Task& task, const WorkflowJob& wf, const Vm& vm,
                       const GlobalStorage& gs, double cpu_factor, double bw_factor);

/// Estimation mode: no VM instance yet, so all inputs are assumed uncached
/// and no degradation is applied. This is the pessimistic bound used for
/// budgeting decisions.
double processing_time_estimate(const Task& task, const WorkflowJob& wf, const VmType& vm_type,
                                const GlobalStorage& gs);

/// ceil((vm_delay + container_delay + pt_s) / bp) * price, with each delay
/// included only when the corresponding flag is set.
Cents task_cost(double pt_s, bool include_vm_delay, bool include_container_delay,
                const VmType& vm_type, double billing_period_s, double container_init_delay_s);

/// Convenience overload pulling bp and the task's container delay from config.
Cents task_cost(double pt_s, bool include_vm_delay, bool include_container_delay,
                const VmType& vm_type, const CloudConfig& config, const std::string& app_type);

/// ceil(occupied_seconds / bp) * price — the billed cost of a finished task.
Cents occupancy_cost(double occupied_seconds, const VmType& vm_type, double billing_period_s);

}  // namespace waasim
