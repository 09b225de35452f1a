#include "waasim/costs.hpp"

#include <cassert>
#include <cmath>

namespace waasim {

double read_seconds(double size_mb, const GlobalStorage& gs, double bandwidth_mb_per_s,
                    double bw_factor) {
    return size_mb / gs.read_rate_mb_per_s + size_mb / (bandwidth_mb_per_s * bw_factor);
}

double write_seconds(double size_mb, const GlobalStorage& gs, double bandwidth_mb_per_s,
                     double bw_factor) {
    return size_mb / gs.write_rate_mb_per_s + size_mb / (bandwidth_mb_per_s * bw_factor);
}

double input_transfer_time(const std::vector<const DataItem*>& items, const Vm& vm,
                           const GlobalStorage& gs, double bw_factor) {
    double total = 0.0;
    for (const DataItem* item : items) {
        if (vm.cache_contains(item->id)) continue;
        total += read_seconds(item->size_mb, gs, vm.type().bandwidth_mb_per_s, bw_factor);
    }
    return total;
}

double output_transfer_time(const std::vector<const DataItem*>& items, const Vm& vm,
                            const GlobalStorage& gs, double bw_factor) {
    double total = 0.0;
    for (const DataItem* item : items) {
        total += write_seconds(item->size_mb, gs, vm.type().bandwidth_mb_per_s, bw_factor);
    }
    return total;
}

double task_runtime(const Task& task, const VmType& vm_type, double cpu_factor) {
    return task.size_mi / (vm_type.cpu_mips * cpu_factor);
}

std::vector<const DataItem*> resolve_items(const WorkflowJob& wf,
                                           const std::vector<std::string>& ids) {
    std::vector<const DataItem*> out;
    out.reserve(ids.size());
    for (const auto& id : ids) out.push_back(&wf.item(id));
    return out;
}

double processing_time(const Task& task, const WorkflowJob& wf, const Vm& vm,
                       const GlobalStorage& gs, double cpu_factor, double bw_factor) {
    return input_transfer_time(resolve_items(wf, task.inputs), vm, gs, bw_factor) +
           task_runtime(task, vm.type(), cpu_factor) +
           output_transfer_time(resolve_items(wf, task.outputs), vm, gs, bw_factor);
}

double processing_time_estimate(const Task& task, const WorkflowJob& wf, const VmType& vm_type,
                                const GlobalStorage& gs) {
    double total = 0.0;
    for (const auto& id : task.inputs) {
        total += read_seconds(wf.item(id).size_mb, gs, vm_type.bandwidth_mb_per_s, 1.0);
    }
    total += task.size_mi / vm_type.cpu_mips;
    for (const auto& id : task.outputs) {
        total += write_seconds(wf.item(id).size_mb, gs, vm_type.bandwidth_mb_per_s, 1.0);
    }
    return total;
}

Cents task_cost(double pt_s, bool include_vm_delay, bool include_container_delay,
                const VmType& vm_type, double billing_period_s, double container_init_delay_s) {
    assert(pt_s >= 0.0);
    double occupied = pt_s;
    if (include_vm_delay) occupied += vm_type.provisioning_delay_s;
    if (include_container_delay) occupied += container_init_delay_s;
    return occupancy_cost(occupied, vm_type, billing_period_s);
}

Cents task_cost(double pt_s, bool include_vm_delay, bool include_container_delay,
                const VmType& vm_type, const CloudConfig& config, const std::string& app_type) {
    const ContainerImage* image = config.image_for_app(app_type);
    double init = image ? image->init_delay_s : 0.0;
    return task_cost(pt_s, include_vm_delay, include_container_delay, vm_type,
                     config.billing_period_s, init);
}

Cents occupancy_cost(double occupied_seconds, const VmType& vm_type, double billing_period_s) {
    double periods = std::ceil(occupied_seconds / billing_period_s);
    return static_cast<Cents>(periods) * vm_type.price_cents_per_bp;
}

}  // namespace waasim
