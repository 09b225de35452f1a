#include "waasim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace waasim {

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::WorkflowArrival: return "WorkflowArrival";
        case EventKind::VmProvisioned: return "VmProvisioned";
        case EventKind::ContainerDeployed: return "ContainerDeployed";
        case EventKind::TaskStarted: return "TaskStarted";
        case EventKind::TaskFinished: return "TaskFinished";
        case EventKind::ProvisionCheck: return "ProvisionCheck";
    }
    return "?";
}

Simulation::Simulation(CloudConfig config, RngStreams rng)
    : config_(std::move(config)), rng_(std::move(rng)) {
    config_.finalize();
}

void Simulation::set_trace(std::ostream* sink, std::function<std::string(const Event&)> resolver) {
    trace_ = sink;
    trace_resolver_ = std::move(resolver);
}

void Simulation::schedule_event(Event e) {
    if (e.time_s < clock_) {
        throw EngineError(EngineError::Kind::PastEvent,
                          "event scheduled in the past: " + std::to_string(e.time_s) +
                              " < " + std::to_string(clock_));
    }
    e.seq = next_seq_++;
    queue_.push(std::move(e));
}

double Simulation::run_until_idle() {
    while (!queue_.empty()) {
        Event e = queue_.top();
        queue_.pop();
        clock_ = e.time_s;
        if (++dispatched_ > config_.max_events) {
            throw EngineError(EngineError::Kind::LivelockGuard,
                              "event count exceeded cap of " +
                                  std::to_string(config_.max_events));
        }
        write_trace(e);
        dispatch(e);
    }
    if (!active_.empty()) {
        throw EngineError(EngineError::Kind::InvalidState,
                          "event queue drained while " + std::to_string(active_.size()) +
                              " VMs remain leased");
    }
    return clock_;
}

void Simulation::dispatch(const Event& e) {
    switch (e.kind) {
        case EventKind::WorkflowArrival:
            if (handler_) handler_->on_workflow_arrival(e.workflow);
            break;
        case EventKind::VmProvisioned: {
            Vm& v = vm(e.vm);
            if (v.state() != VmState::Provisioning) {
                throw EngineError(EngineError::Kind::InvalidState,
                                  "VmProvisioned for VM not in provisioning state");
            }
            v.set_state(VmState::Idle);
            v.set_idle_since(clock_);
            if (handler_) handler_->on_vm_provisioned(e.vm);
            break;
        }
        case EventKind::ContainerDeployed: {
            vm(e.vm).add_image(e.image);
            if (handler_) handler_->on_container_deployed(e.vm, e.image);
            break;
        }
        case EventKind::TaskStarted:
            if (handler_) handler_->on_task_started(e.workflow, e.task, e.vm);
            break;
        case EventKind::TaskFinished:
            if (handler_) handler_->on_task_finished(e.workflow, e.task, e.vm);
            break;
        case EventKind::ProvisionCheck:
            if (handler_) handler_->on_provision_check();
            check_armed_ = false;
            if (!active_.empty()) arm_provision_check();
            break;
    }
}

void Simulation::write_trace(const Event& e) {
    if (!trace_) return;
    char head[64];
    std::snprintf(head, sizeof(head), "%.6f\t%llu\t", e.time_s,
                  static_cast<unsigned long long>(e.seq));
    std::string line = head;
    line += to_string(e.kind);
    if (trace_resolver_) {
        line += '\t';
        line += trace_resolver_(e);
    } else {
        std::ostringstream subject;
        if (e.workflow != kNoIndex) subject << "\twf=" << e.workflow;
        if (e.task != kNoIndex) subject << "\ttask=" << e.task;
        if (e.vm != 0) subject << "\tvm=" << e.vm;
        if (!e.image.empty()) subject << "\timage=" << e.image;
        line += subject.str();
    }
    *trace_ << line << '\n';
}

double Simulation::sample_factor(const DegradationSpec& spec, RngStreams::Stream stream) {
    if (spec.max_pct <= 0.0) return 1.0;
    double pct = rng_.normal(stream, spec.mean_pct, spec.stddev_pct);
    pct = std::clamp(pct, 0.0, spec.max_pct);
    return 1.0 - pct / 100.0;
}

double Simulation::sample_cpu_factor() {
    return sample_factor(config_.cpu_degradation, RngStreams::Stream::CpuDegradation);
}

double Simulation::sample_bandwidth_factor() {
    return sample_factor(config_.bandwidth_degradation, RngStreams::Stream::BandwidthDegradation);
}

VmId Simulation::provision_vm(std::size_t type_index) {
    if (type_index >= config_.vm_catalogue.size()) {
        throw EngineError(EngineError::Kind::UnknownVmType,
                          "vm type index " + std::to_string(type_index) + " not in catalogue");
    }
    const VmType& type = config_.vm_catalogue[type_index];
    VmId id = static_cast<VmId>(vms_.size()) + 1;
    vms_.push_back(std::make_unique<Vm>(id, type_index, type, clock_));
    active_.push_back(id);
    schedule_event(Event{clock_ + type.provisioning_delay_s, 0, EventKind::VmProvisioned,
                         kNoIndex, kNoIndex, id, {}});
    if (!check_armed_) arm_provision_check();
    return id;
}

void Simulation::terminate_vm(VmId id) {
    Vm& v = vm(id);
    if (v.state() == VmState::Terminated) {
        throw EngineError(EngineError::Kind::InvalidState, "VM already terminated");
    }
    if (v.state() != VmState::Idle) {
        throw EngineError(EngineError::Kind::VmBusy, "cannot terminate non-idle VM");
    }
    v.set_state(VmState::Terminated);
    v.set_idle_since(std::nullopt);
    v.set_lease_end(clock_);
    v.clear_cache();
    active_.erase(std::find(active_.begin(), active_.end(), id));
}

bool Simulation::deploy_container(VmId id, const ContainerImage& image) {
    Vm& v = vm(id);
    if (v.state() == VmState::Terminated || v.state() == VmState::Provisioning) {
        throw EngineError(EngineError::Kind::InvalidState,
                          "cannot deploy container on VM in state " +
                              std::string(to_string(v.state())));
    }
    if (v.has_image(image.id)) return false;
    schedule_event(Event{clock_ + image.init_delay_s, 0, EventKind::ContainerDeployed,
                         kNoIndex, kNoIndex, id, image.id});
    return true;
}

void Simulation::claim_vm(VmId id) {
    Vm& v = vm(id);
    if (v.state() != VmState::Idle) {
        throw EngineError(EngineError::Kind::InvalidState, "claim requires an idle VM");
    }
    v.set_state(VmState::Busy);
    v.set_idle_since(std::nullopt);
}

void Simulation::release_vm(VmId id, double busy_seconds) {
    Vm& v = vm(id);
    if (v.state() != VmState::Busy) {
        throw EngineError(EngineError::Kind::InvalidState, "release requires a busy VM");
    }
    v.set_state(VmState::Idle);
    v.set_idle_since(clock_);
    v.add_busy_seconds(busy_seconds);
}

Vm& Simulation::vm(VmId id) {
    if (id == 0 || id > vms_.size()) {
        throw EngineError(EngineError::Kind::InvalidState, "unknown VM id " + std::to_string(id));
    }
    return *vms_[id - 1];
}

const Vm& Simulation::vm(VmId id) const {
    return const_cast<Simulation*>(this)->vm(id);
}

double Simulation::charged_seconds(const Vm& v) const {
    double end = v.lease_end_s().value_or(clock_);
    double periods = std::ceil((end - v.lease_start_s()) / config_.billing_period_s);
    return periods * config_.billing_period_s;
}

Cents Simulation::charged_cents(const Vm& v) const {
    double end = v.lease_end_s().value_or(clock_);
    double periods = std::ceil((end - v.lease_start_s()) / config_.billing_period_s);
    return static_cast<Cents>(periods) * v.type().price_cents_per_bp;
}

void Simulation::arm_provision_check() {
    check_armed_ = true;
    schedule_event(Event{clock_ + config_.provision_check_interval_s, 0,
                         EventKind::ProvisionCheck, kNoIndex, kNoIndex, 0, {}});
}

}  // namespace waasim
