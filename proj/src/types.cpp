#include "waasim/types.hpp"

#include <algorithm>
#include <queue>

namespace waasim {

const char* to_string(TaskState s) {
    switch (s) {
        case TaskState::Waiting: return "waiting";
        case TaskState::Ready: return "ready";
        case TaskState::Queued: return "queued";
        case TaskState::Running: return "running";
        case TaskState::Completed: return "completed";
    }
    return "?";
}

const char* to_string(VmState s) {
    switch (s) {
        case VmState::Provisioning: return "provisioning";
        case VmState::Idle: return "idle";
        case VmState::Busy: return "busy";
        case VmState::Terminated: return "terminated";
    }
    return "?";
}

std::size_t WorkflowJob::task_index(const std::string& task_id) const {
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (tasks[i].id == task_id) return i;
    }
    return kNoIndex;
}

std::vector<std::size_t> WorkflowJob::entry_tasks() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (tasks[i].predecessors.empty()) out.push_back(i);
    }
    return out;
}

std::vector<std::size_t> WorkflowJob::exit_tasks() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (tasks[i].successors.empty()) out.push_back(i);
    }
    return out;
}

const DataItem& WorkflowJob::item(const std::string& data_id) const {
    auto it = data.find(data_id);
    if (it == data.end()) {
        throw ValidationError(ValidationError::Kind::OrphanDataItem,
                              "unknown data item '" + data_id + "' in workflow '" + id + "'");
    }
    return it->second;
}

void CloudConfig::finalize() {
    if (billing_period_s <= 0) {
        throw ValidationError(ValidationError::Kind::BadField, "billing_period_s must be > 0");
    }
    if (idle_threshold_s < 0) {
        throw ValidationError(ValidationError::Kind::BadField, "idle_threshold_s must be >= 0");
    }
    if (provision_check_interval_s <= 0) {
        throw ValidationError(ValidationError::Kind::BadField,
                              "provision_check_interval_s must be > 0");
    }
    if (global_storage.read_rate_mb_per_s <= 0 || global_storage.write_rate_mb_per_s <= 0) {
        throw ValidationError(ValidationError::Kind::BadField, "global storage rates must be > 0");
    }
    for (const DegradationSpec* d : {&cpu_degradation, &bandwidth_degradation}) {
        if (d->max_pct < 0 || d->max_pct >= 100) {
            throw ValidationError(ValidationError::Kind::BadField,
                                  "degradation max_pct must be in [0, 100)");
        }
    }
    if (vm_catalogue.empty()) {
        throw ValidationError(ValidationError::Kind::BadField, "vm_catalogue must not be empty");
    }
    for (const auto& t : vm_catalogue) {
        if (t.cpu_mips <= 0 || t.price_cents_per_bp <= 0 || t.bandwidth_mb_per_s <= 0 ||
            t.storage_mb <= 0 || t.provisioning_delay_s < 0) {
            throw ValidationError(ValidationError::Kind::BadField,
                                  "vm type '" + t.name + "' has a non-positive field");
        }
    }
    std::stable_sort(vm_catalogue.begin(), vm_catalogue.end(),
                     [](const VmType& a, const VmType& b) { return a.cpu_mips < b.cpu_mips; });
    for (std::size_t i = 1; i < vm_catalogue.size(); ++i) {
        if (vm_catalogue[i].cpu_mips > vm_catalogue[i - 1].cpu_mips &&
            vm_catalogue[i].price_cents_per_bp <= vm_catalogue[i - 1].price_cents_per_bp) {
            throw ValidationError(ValidationError::Kind::BadField,
                                  "catalogue violates capacity/price ordering: '" +
                                      vm_catalogue[i].name + "'");
        }
    }
    for (const auto& img : container_images) {
        if (img.init_delay_s < 0) {
            throw ValidationError(ValidationError::Kind::BadField,
                                  "container image '" + img.id + "' has negative init delay");
        }
    }
}

std::size_t CloudConfig::type_index(const std::string& name) const {
    for (std::size_t i = 0; i < vm_catalogue.size(); ++i) {
        if (vm_catalogue[i].name == name) return i;
    }
    return kNoIndex;
}

const ContainerImage* CloudConfig::image_for_app(const std::string& app_type) const {
    for (const auto& img : container_images) {
        if (img.app_type == app_type) return &img;
    }
    return nullptr;
}

void Vm::add_image(const std::string& image_id) {
    if (image_set_.insert(image_id).second) images_.push_back(image_id);
}

void Vm::cache_insert(const std::string& data_id, double size_mb) {
    if (cache_set_.count(data_id)) return;  // FIFO: hits keep their original position
    if (size_mb > type_->storage_mb) return;
    while (cached_mb_ + size_mb > type_->storage_mb && !cache_.empty()) {
        auto& oldest = cache_.front();
        cached_mb_ -= oldest.second;
        cache_set_.erase(oldest.first);
        cache_.pop_front();
    }
    cache_.emplace_back(data_id, size_mb);
    cache_set_.insert(data_id);
    cached_mb_ += size_mb;
}

void Vm::clear_cache() {
    cache_.clear();
    cache_set_.clear();
    cached_mb_ = 0.0;
}

namespace {

void check_task_fields(const WorkflowJob& wf) {
    if (wf.budget < 0) {
        throw ValidationError(ValidationError::Kind::BadField,
                              "workflow '" + wf.id + "' has negative budget");
    }
    for (const auto& [id, item] : wf.data) {
        if (item.size_mb <= 0) {
            throw ValidationError(ValidationError::Kind::BadField,
                                  "data item '" + id + "' must have size_mb > 0");
        }
    }
    for (const auto& t : wf.tasks) {
        if (t.size_mi <= 0) {
            throw ValidationError(ValidationError::Kind::BadField,
                                  "task '" + t.id + "' must have size_mi > 0");
        }
    }
}

}  // namespace

void validate_dag(const WorkflowJob& wf) {
    check_task_fields(wf);

    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < wf.tasks.size(); ++i) {
        if (!index.emplace(wf.tasks[i].id, i).second) {
            throw ValidationError(ValidationError::Kind::BadField,
                                  "duplicate task id '" + wf.tasks[i].id + "'");
        }
    }

    auto require_task = [&](const std::string& id, const std::string& where) -> std::size_t {
        auto it = index.find(id);
        if (it == index.end()) {
            throw ValidationError(ValidationError::Kind::DanglingEdge,
                                  where + " references unknown task '" + id + "'");
        }
        return it->second;
    };

    // Edge consistency: predecessor and successor lists must mirror each other.
    for (const auto& t : wf.tasks) {
        for (const auto& p : t.predecessors) {
            const Task& pred = wf.tasks[require_task(p, "task '" + t.id + "'")];
            if (std::find(pred.successors.begin(), pred.successors.end(), t.id) ==
                pred.successors.end()) {
                throw ValidationError(ValidationError::Kind::DanglingEdge,
                                      "edge (" + p + ", " + t.id + ") lacks successor entry");
            }
        }
        for (const auto& s : t.successors) {
            const Task& succ = wf.tasks[require_task(s, "task '" + t.id + "'")];
            if (std::find(succ.predecessors.begin(), succ.predecessors.end(), t.id) ==
                succ.predecessors.end()) {
                throw ValidationError(ValidationError::Kind::DanglingEdge,
                                      "edge (" + t.id + ", " + s + ") lacks predecessor entry");
            }
        }
    }

    // Data wiring: producers must exist; consumed items must be declared and
    // either external or produced by a direct predecessor.
    for (const auto& [id, item] : wf.data) {
        if (item.producer) require_task(*item.producer, "data item '" + id + "'");
    }
    for (const auto& t : wf.tasks) {
        for (const auto& din : t.inputs) {
            auto it = wf.data.find(din);
            if (it == wf.data.end()) {
                throw ValidationError(ValidationError::Kind::OrphanDataItem,
                                      "task '" + t.id + "' consumes undeclared data '" + din + "'");
            }
            const auto& producer = it->second.producer;
            if (producer && std::find(t.predecessors.begin(), t.predecessors.end(), *producer) ==
                                t.predecessors.end()) {
                throw ValidationError(
                    ValidationError::Kind::DanglingEdge,
                    "task '" + t.id + "' consumes '" + din + "' produced by non-predecessor '" +
                        *producer + "'");
            }
        }
        for (const auto& dout : t.outputs) {
            auto it = wf.data.find(dout);
            if (it == wf.data.end()) {
                throw ValidationError(ValidationError::Kind::OrphanDataItem,
                                      "task '" + t.id + "' outputs undeclared data '" + dout + "'");
            }
            if (!it->second.producer || *it->second.producer != t.id) {
                throw ValidationError(ValidationError::Kind::DanglingEdge,
                                      "data '" + dout + "' is not marked as produced by '" +
                                          t.id + "'");
            }
        }
    }

    // Kahn's algorithm for acyclicity.
    std::vector<std::size_t> in_degree(wf.tasks.size(), 0);
    for (std::size_t i = 0; i < wf.tasks.size(); ++i) {
        in_degree[i] = wf.tasks[i].predecessors.size();
    }
    std::queue<std::size_t> frontier;
    for (std::size_t i = 0; i < wf.tasks.size(); ++i) {
        if (in_degree[i] == 0) frontier.push(i);
    }
    std::size_t visited = 0;
    while (!frontier.empty()) {
        std::size_t i = frontier.front();
        frontier.pop();
        ++visited;
        for (const auto& s : wf.tasks[i].successors) {
            std::size_t j = index.at(s);
            if (--in_degree[j] == 0) frontier.push(j);
        }
    }
    if (visited != wf.tasks.size()) {
        throw ValidationError(ValidationError::Kind::CyclicGraph,
                              "workflow '" + wf.id + "' contains a dependency cycle");
    }
}

}  // namespace waasim
