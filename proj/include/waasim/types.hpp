#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace waasim {

/// Currency is integer cents throughout; time is floating seconds.
using Cents = std::int64_t;
using VmId = std::uint64_t;

inline constexpr std::size_t kNoIndex = static_cast<std::size_t>(-1);

/// A named piece of data moved between tasks and global storage.
/// `producer` is empty for external workflow inputs.
struct DataItem {
    std::string id;
    double size_mb = 0.0;
    std::optional<std::string> producer;
};

enum class TaskState { Waiting, Ready, Queued, Running, Completed };

const char* to_string(TaskState s);

struct Task {
    std::string id;
    std::string workflow_id;
    double size_mi = 0.0;
    std::string app_type;
    std::vector<std::string> inputs;   // DataItem ids
    std::vector<std::string> outputs;  // DataItem ids
    std::vector<std::string> predecessors;
    std::vector<std::string> successors;
    int level = -1;            // assigned by the scheduler
    Cents sub_budget = 0;      // assigned by the scheduler
    TaskState state = TaskState::Waiting;
};

struct WorkflowJob {
    std::string id;
    std::string app_type;
    std::string size_class;  // small | medium | large (derived for loaded files)
    std::vector<Task> tasks;
    std::map<std::string, DataItem> data;
    Cents budget = 0;
    double arrival_s = 0.0;
    Cents spare_budget = 0;
    std::optional<double> exit_finish_s;

    std::size_t task_index(const std::string& task_id) const;
    std::vector<std::size_t> entry_tasks() const;
    std::vector<std::size_t> exit_tasks() const;
    const DataItem& item(const std::string& data_id) const;
};

/// A leasable machine class.
struct VmType {
    std::string name;
    double cpu_mips = 0.0;
    Cents price_cents_per_bp = 0;
    double bandwidth_mb_per_s = 0.0;
    double storage_mb = 0.0;
    double provisioning_delay_s = 0.0;
};

struct ContainerImage {
    std::string id;
    std::string app_type;
    double init_delay_s = 0.0;
};

struct GlobalStorage {
    double read_rate_mb_per_s = 0.0;
    double write_rate_mb_per_s = 0.0;
};

/// Truncated-normal percentage degradation: a sampled slowdown in [0, max_pct].
struct DegradationSpec {
    double mean_pct = 0.0;
    double stddev_pct = 0.0;
    double max_pct = 0.0;
};

struct CloudConfig {
    double billing_period_s = 1.0;
    std::vector<VmType> vm_catalogue;  // kept sorted by ascending cpu_mips
    GlobalStorage global_storage{};
    std::vector<ContainerImage> container_images;
    double idle_threshold_s = 5.0;
    double provision_check_interval_s = 5.0;
    DegradationSpec cpu_degradation{12.0, 10.0, 24.0};
    DegradationSpec bandwidth_degradation{9.5, 5.0, 19.0};
    std::uint64_t max_events = 50'000'000;  // livelock guard for the event loop

    /// Validates field ranges, sorts the catalogue by cpu_mips and checks
    /// that price increases strictly with capacity.
    void finalize();

    const VmType& cheapest_type() const { return vm_catalogue.front(); }
    const VmType& fastest_type() const { return vm_catalogue.back(); }
    std::size_t type_index(const std::string& name) const;
    const ContainerImage* image_for_app(const std::string& app_type) const;
};

enum class VmState { Provisioning, Idle, Busy, Terminated };

const char* to_string(VmState s);

/// A live machine instance with FIFO-ordered local data cache.
class Vm {
public:
    Vm(VmId id, std::size_t type_index, const VmType& type, double lease_start_s)
        : id_(id), type_index_(type_index), type_(&type), lease_start_s_(lease_start_s) {}

    VmId id() const { return id_; }
    std::size_t type_index() const { return type_index_; }
    const VmType& type() const { return *type_; }
    VmState state() const { return state_; }
    double lease_start_s() const { return lease_start_s_; }
    std::optional<double> idle_since_s() const { return idle_since_s_; }
    std::optional<double> lease_end_s() const { return lease_end_s_; }
    double busy_seconds_accumulated() const { return busy_seconds_; }

    bool has_image(const std::string& image_id) const { return image_set_.count(image_id) > 0; }
    void add_image(const std::string& image_id);
    const std::vector<std::string>& deployed_images() const { return images_; }

    bool cache_contains(const std::string& data_id) const { return cache_set_.count(data_id) > 0; }
    /// FIFO insert: evicts earliest-stored items until the new one fits.
    /// Items larger than the whole store are never cached.
    void cache_insert(const std::string& data_id, double size_mb);
    double cached_mb() const { return cached_mb_; }
    const std::deque<std::pair<std::string, double>>& cache() const { return cache_; }

    // State transitions are driven by the engine.
    void set_state(VmState s) { state_ = s; }
    void set_idle_since(std::optional<double> t) { idle_since_s_ = t; }
    void set_lease_end(double t) { lease_end_s_ = t; }
    void add_busy_seconds(double s) { busy_seconds_ += s; }
    void clear_cache();

private:
    VmId id_;
    std::size_t type_index_;
    const VmType* type_;
    VmState state_ = VmState::Provisioning;
    double lease_start_s_;
    std::optional<double> idle_since_s_;
    std::optional<double> lease_end_s_;
    double busy_seconds_ = 0.0;
    std::vector<std::string> images_;  // insertion order
    std::unordered_set<std::string> image_set_;
    std::deque<std::pair<std::string, double>> cache_;  // FIFO order
    std::unordered_set<std::string> cache_set_;
    double cached_mb_ = 0.0;
};

struct ValidationError : std::runtime_error {
    enum class Kind { CyclicGraph, DanglingEdge, OrphanDataItem, BadField };
    Kind kind;
    ValidationError(Kind k, const std::string& what) : std::runtime_error(what), kind(k) {}
};

/// Checks acyclicity, edge consistency and data-item wiring of a workflow.
/// Throws ValidationError on the first defect found.
void validate_dag(const WorkflowJob& workflow);

}  // namespace waasim
