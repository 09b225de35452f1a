#pragma once

#include <functional>

#include "waasim/engine.hpp"
#include "waasim/harness.hpp"

namespace waasim::test {

/// One-type catalogue matching the worked examples: 2 MIPS @ 1 cent/s,
/// 25 MB/s bandwidth, 50 MB/s storage rates, 45 s + 10 s delays, 1 s
/// billing, degradation off.
inline CloudConfig demo_config() {
    CloudConfig config;
    config.billing_period_s = 1.0;
    config.vm_catalogue = {{"small", 2, 1, 25, 20000, 45}};
    config.global_storage = {50, 50};
    config.container_images = {{"img-demo", "demo", 10}};
    config.idle_threshold_s = 5.0;
    config.provision_check_interval_s = 5.0;
    config.cpu_degradation = {0, 0, 0};
    config.bandwidth_degradation = {0, 0, 0};
    config.finalize();
    return config;
}

/// The evaluation catalogue (four linear-priced types) with degradation off.
inline CloudConfig table2_config() {
    ExperimentConfig experiment = default_experiment_config();
    CloudConfig config = experiment.cloud;
    config.cpu_degradation = {0, 0, 0};
    config.bandwidth_degradation = {0, 0, 0};
    config.container_images.push_back({"img-demo", "demo", 10});
    config.finalize();
    return config;
}

struct TaskSpec {
    std::string id;
    double mi;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
};

struct ItemSpec {
    std::string id;
    double mb;
    std::string producer;  // empty = external
};

/// Small hand-rolled workflow builder for targeted scenarios. Edges are
/// derived from item producers plus any explicit extra edges.
inline WorkflowJob make_workflow(const std::string& id, const std::vector<TaskSpec>& tasks,
                                 const std::vector<ItemSpec>& items,
                                 const std::vector<std::pair<std::string, std::string>>& edges = {},
                                 Cents budget = 1'000'000, const std::string& app = "demo") {
    WorkflowJob wf;
    wf.id = id;
    wf.app_type = app;
    wf.size_class = "small";
    wf.budget = budget;
    for (const auto& item : items) {
        DataItem d;
        d.id = item.id;
        d.size_mb = item.mb;
        if (!item.producer.empty()) d.producer = item.producer;
        wf.data.emplace(d.id, d);
    }
    for (const auto& spec : tasks) {
        Task t;
        t.id = spec.id;
        t.workflow_id = id;
        t.app_type = app;
        t.size_mi = spec.mi;
        t.inputs = spec.inputs;
        t.outputs = spec.outputs;
        wf.tasks.push_back(std::move(t));
    }
    auto add_edge = [&wf](const std::string& parent, const std::string& child) {
        Task& p = wf.tasks[wf.task_index(parent)];
        Task& c = wf.tasks[wf.task_index(child)];
        if (std::find(p.successors.begin(), p.successors.end(), child) == p.successors.end()) {
            p.successors.push_back(child);
            c.predecessors.push_back(parent);
        }
    };
    for (auto& t : wf.tasks) {
        for (const auto& in : t.inputs) {
            const auto& producer = wf.data.at(in).producer;
            if (producer) add_edge(*producer, t.id);
        }
    }
    for (const auto& [parent, child] : edges) add_edge(parent, child);
    return wf;
}

/// Scriptable engine handler for targeted lifecycle tests.
struct MockHandler : EventHandler {
    std::function<void(std::size_t)> arrival;
    std::function<void(VmId)> provisioned;
    std::function<void(VmId, const std::string&)> deployed;
    std::function<void(std::size_t, std::size_t, VmId)> finished;
    std::function<void()> check;

    void on_workflow_arrival(std::size_t w) override {
        if (arrival) arrival(w);
    }
    void on_vm_provisioned(VmId v) override {
        if (provisioned) provisioned(v);
    }
    void on_container_deployed(VmId v, const std::string& image) override {
        if (deployed) deployed(v, image);
    }
    void on_task_started(std::size_t, std::size_t, VmId) override {}
    void on_task_finished(std::size_t w, std::size_t t, VmId v) override {
        if (finished) finished(w, t, v);
    }
    void on_provision_check() override {
        if (check) check();
    }
};

}  // namespace waasim::test
