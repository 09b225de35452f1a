#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <ostream>
#include <queue>
#include <string>
#include <vector>

#include "waasim/rng.hpp"
#include "waasim/types.hpp"

namespace waasim {

enum class EventKind {
    WorkflowArrival,
    VmProvisioned,
    ContainerDeployed,
    TaskStarted,
    TaskFinished,
    ProvisionCheck,
};

const char* to_string(EventKind k);

/// A timestamped simulation occurrence. Events are dispatched in
/// nondecreasing (time_s, seq) order; seq is assigned at enqueue time and
/// breaks ties first-in first-out.
struct Event {
    double time_s = 0.0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::ProvisionCheck;
    std::size_t workflow = kNoIndex;
    std::size_t task = kNoIndex;
    VmId vm = 0;
    std::string image;
};

struct EngineError : std::runtime_error {
    enum class Kind { PastEvent, LivelockGuard, UnknownVmType, VmBusy, InvalidState };
    Kind kind;
    EngineError(Kind k, const std::string& what) : std::runtime_error(what), kind(k) {}
};

/// Scheduler-side hooks invoked by the dispatch loop after the engine has
/// applied the mechanical state change for an event.
class EventHandler {
public:
    virtual ~EventHandler() = default;
    virtual void on_workflow_arrival(std::size_t workflow) = 0;
    virtual void on_vm_provisioned(VmId vm) = 0;
    virtual void on_container_deployed(VmId vm, const std::string& image) = 0;
    virtual void on_task_started(std::size_t workflow, std::size_t task, VmId vm) = 0;
    virtual void on_task_finished(std::size_t workflow, std::size_t task, VmId vm) = 0;
    virtual void on_provision_check() = 0;
};

/// Deterministic single-threaded discrete-event kernel: clock, event queue,
/// RNG substreams, degradation sampling and the VM lifecycle state machine.
/// One Simulation owns one replication's entire state; independent
/// replications may run concurrently with no shared state.
class Simulation {
public:
    Simulation(CloudConfig config, RngStreams rng);

    void set_handler(EventHandler* handler) { handler_ = handler; }

    /// Enables the tab-separated event trace. The resolver renders an
    /// event's subject ids; pass nullptr to use the index-based default.
    void set_trace(std::ostream* sink,
                   std::function<std::string(const Event&)> resolver = nullptr);

    double now() const { return clock_; }
    const CloudConfig& config() const { return config_; }
    RngStreams& rng() { return rng_; }

    /// Enqueues an event at or after the current clock and assigns its seq.
    void schedule_event(Event e);

    /// Dispatches until the queue is empty; returns the final clock.
    double run_until_idle();

    /// 1 - clamp(N(mean, stddev), 0, max)/100 for the configured CPU spec.
    double sample_cpu_factor();
    double sample_bandwidth_factor();

    /// Creates a VM of the given catalogue type in state provisioning and
    /// schedules its VmProvisioned event. Billing starts now.
    VmId provision_vm(std::size_t type_index);

    /// Terminates an idle VM immediately; its cache is discarded.
    void terminate_vm(VmId id);

    /// Schedules a ContainerDeployed event unless the image is already on
    /// the VM; returns false for that skip.
    bool deploy_container(VmId id, const ContainerImage& image);

    /// Idle -> busy transition when a task claims the VM.
    void claim_vm(VmId id);

    /// Busy -> idle transition when a task releases the VM; `busy_seconds`
    /// is the productive span being credited to the VM.
    void release_vm(VmId id, double busy_seconds);

    Vm& vm(VmId id);
    const Vm& vm(VmId id) const;
    /// Ids of all non-terminated VMs in ascending id order.
    const std::vector<VmId>& active_vms() const { return active_; }
    /// Every VM ever leased, terminated ones included.
    const std::vector<std::unique_ptr<Vm>>& all_vms() const { return vms_; }

    /// Whole billing periods charged for a terminated VM, in seconds.
    double charged_seconds(const Vm& vm) const;
    Cents charged_cents(const Vm& vm) const;

    std::uint64_t dispatched_events() const { return dispatched_; }

private:
    struct EventAfter {
        bool operator()(const Event& a, const Event& b) const {
            if (a.time_s != b.time_s) return a.time_s > b.time_s;
            return a.seq > b.seq;
        }
    };

    void dispatch(const Event& e);
    void write_trace(const Event& e);
    double sample_factor(const DegradationSpec& spec, RngStreams::Stream stream);
    void arm_provision_check();

    CloudConfig config_;
    RngStreams rng_;
    EventHandler* handler_ = nullptr;
    double clock_ = 0.0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t dispatched_ = 0;
    std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
    std::vector<std::unique_ptr<Vm>> vms_;
    std::vector<VmId> active_;
    bool check_armed_ = false;
    std::ostream* trace_ = nullptr;
    std::function<std::string(const Event&)> trace_resolver_;
};

}  // namespace waasim
