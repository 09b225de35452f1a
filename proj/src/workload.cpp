#include "waasim/workload.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "waasim/costs.hpp"
#include "waasim/scheduler.hpp"

namespace waasim {

using nlohmann::json;

double LogUniform::sample(RngStreams& rng, RngStreams::Stream stream) const {
    if (hi <= lo) return lo;
    double u = rng.uniform01(stream);
    return lo * std::exp(u * std::log(hi / lo));
}

const std::vector<std::string>& known_app_types() {
    static const std::vector<std::string> apps = {"cybershake", "epigenome", "ligo", "montage",
                                                  "sipht"};
    return apps;
}

TemplateSet TemplateSet::defaults() {
    TemplateSet set;
    // Width fractions follow the qualitative parallelism ranking
    // (cybershake > montage > ligo > epigenome > sipht); magnitudes keep a
    // median task at tens-to-hundreds of seconds on the smallest VM type.
    set.apps["cybershake"] =
        TemplateParams{{40, 400}, {50, 400}, {2000, 6000}, 0.47, 0.30, 0.55};
    set.apps["montage"] = TemplateParams{{20, 120}, {100, 800}, {0, 0}, 0.35, 0.25, 0.45};
    set.apps["ligo"] = TemplateParams{{150, 900}, {50, 400}, {0, 0}, 0.23, 0.15, 0.32};
    set.apps["epigenome"] = TemplateParams{{300, 2000}, {5, 40}, {0, 0}, 0.19, 0.10, 0.25};
    set.apps["sipht"] = TemplateParams{{60, 400}, {5, 60}, {0, 0}, 0.09, 0.0, 0.15};
    return set;
}

const TemplateParams& TemplateSet::at(const std::string& app) const {
    auto it = apps.find(app);
    if (it == apps.end()) throw std::invalid_argument("no template for app type '" + app + "'");
    return it->second;
}

int size_class_target(const std::string& size_class) {
    if (size_class == "small") return 50;
    if (size_class == "medium") return 100;
    if (size_class == "large") return 1000;
    throw std::invalid_argument("unknown size class '" + size_class + "'");
}

std::string size_class_for_count(std::size_t task_count) {
    if (task_count <= 75) return "small";
    if (task_count <= 550) return "medium";
    return "large";
}

namespace {

constexpr auto kShape = RngStreams::Stream::WorkloadShape;

/// Incrementally assembles one workflow; ids are local until sealed.
class DagBuilder {
public:
    DagBuilder(std::string workflow_id, std::string app, const TemplateParams& params,
               RngStreams& rng)
        : params_(params), rng_(rng) {
        wf_.id = std::move(workflow_id);
        wf_.app_type = std::move(app);
    }

    std::size_t add_task() {
        Task t;
        t.id = "t" + pad(wf_.tasks.size() + 1);
        t.workflow_id = wf_.id;
        t.app_type = wf_.app_type;
        t.size_mi = params_.mi.sample(rng_, kShape);
        wf_.tasks.push_back(std::move(t));
        return wf_.tasks.size() - 1;
    }

    std::string add_external_input(std::size_t task) {
        std::string id = new_item(params_.data_mb.sample(rng_, kShape), std::nullopt);
        wf_.tasks[task].inputs.push_back(id);
        return id;
    }

    std::string add_output(std::size_t task, bool heavy = false) {
        const LogUniform& dist = heavy ? params_.heavy_data_mb : params_.data_mb;
        std::string id = new_item(dist.sample(rng_, kShape), wf_.tasks[task].id);
        wf_.tasks[task].outputs.push_back(id);
        return id;
    }

    /// Adds the data input plus the implied control edge to its producer.
    void consume(std::size_t task, const std::string& data_id) {
        wf_.tasks[task].inputs.push_back(data_id);
        const auto& producer = wf_.data.at(data_id).producer;
        if (producer) add_edge(wf_.task_index(*producer), task);
    }

    void add_edge(std::size_t parent, std::size_t child) {
        Task& p = wf_.tasks[parent];
        Task& c = wf_.tasks[child];
        if (std::find(p.successors.begin(), p.successors.end(), c.id) != p.successors.end()) {
            return;
        }
        p.successors.push_back(c.id);
        c.predecessors.push_back(p.id);
    }

    WorkflowJob seal() {
        // Canonical ids: "<workflow>/<local>" so caches and traces stay
        // unambiguous across workflows.
        const std::string prefix = wf_.id + "/";
        for (auto& t : wf_.tasks) {
            t.id = prefix + t.id;
            for (auto* list : {&t.inputs, &t.outputs, &t.predecessors, &t.successors}) {
                for (auto& ref : *list) ref = prefix + ref;
            }
        }
        std::map<std::string, DataItem> renamed;
        for (auto& [id, item] : wf_.data) {
            item.id = prefix + id;
            if (item.producer) item.producer = prefix + *item.producer;
            renamed.emplace(item.id, std::move(item));
        }
        wf_.data = std::move(renamed);
        return std::move(wf_);
    }

private:
    static std::string pad(std::size_t k) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04zu", k);
        return buf;
    }

    std::string new_item(double size_mb, std::optional<std::string> producer) {
        DataItem item;
        item.id = "d" + pad(wf_.data.size() + 1);
        item.size_mb = size_mb;
        item.producer = std::move(producer);
        std::string id = item.id;
        wf_.data.emplace(id, std::move(item));
        return id;
    }

    WorkflowJob wf_;
    const TemplateParams& params_;
    RngStreams& rng_;
};

// A short wide mosaic pipeline: projection fan-out, overlap fitting, a
// model join that broadcasts to a background level, then aggregation.
void build_montage(DagBuilder& b, int n) {
    int a = std::max(2, std::min<int>(std::lround(0.35 * n), (n - 5) / 2));
    int c = n - 2 * a - 3;
    std::vector<std::size_t> project(a), fit(a);
    std::vector<std::string> project_out(a), fit_out(a);
    for (int i = 0; i < a; ++i) {
        project[i] = b.add_task();
        b.add_external_input(project[i]);
        project_out[i] = b.add_output(project[i]);
    }
    for (int i = 0; i < a; ++i) {
        fit[i] = b.add_task();
        b.consume(fit[i], project_out[i]);
        b.consume(fit[i], project_out[(i + 1) % a]);
        fit_out[i] = b.add_output(fit[i]);
    }
    std::size_t model = b.add_task();
    for (int i = 0; i < a; ++i) b.consume(model, fit_out[i]);
    std::string model_out = b.add_output(model);
    std::vector<std::string> bg_out(c);
    for (int i = 0; i < c; ++i) {
        std::size_t bg = b.add_task();
        b.consume(bg, model_out);
        bg_out[i] = b.add_output(bg);
    }
    std::size_t add = b.add_task();
    for (int i = 0; i < c; ++i) b.consume(add, bg_out[i]);
    std::string add_out = b.add_output(add);
    std::size_t shrink = b.add_task();
    b.consume(shrink, add_out);
    b.add_output(shrink);
}

// Two bulk producers feed a very wide pair of synthesis/peak levels that
// join into one collector; consumers of the same bulk item reward locality.
void build_cybershake(DagBuilder& b, int n) {
    std::size_t gen[2];
    std::string gen_out[2];
    for (int i = 0; i < 2; ++i) {
        gen[i] = b.add_task();
        b.add_external_input(gen[i]);
        gen_out[i] = b.add_output(gen[i], /*heavy=*/true);
    }
    int lane_tasks = n - 3;
    int synth = (lane_tasks + 1) / 2;
    int peaks = lane_tasks - synth;
    std::vector<std::string> synth_out(synth);
    std::vector<std::string> tail_out;
    for (int i = 0; i < synth; ++i) {
        std::size_t s = b.add_task();
        b.consume(s, gen_out[i % 2]);
        synth_out[i] = b.add_output(s);
    }
    for (int i = 0; i < peaks; ++i) {
        std::size_t p = b.add_task();
        b.consume(p, synth_out[i]);
        tail_out.push_back(b.add_output(p));
    }
    for (int i = peaks; i < synth; ++i) tail_out.push_back(synth_out[i]);
    std::size_t zip = b.add_task();
    for (const auto& out : tail_out) b.consume(zip, out);
    b.add_output(zip);
}

// Parallel per-lane chains between a split and a merge; compute dominated.
void build_epigenome(DagBuilder& b, int n) {
    const int stages = 5;
    int m = std::max(2, (n - 3) / stages);
    int extra = n - 3 - stages * m;  // lanes 0..extra-1 get one more stage
    std::size_t split = b.add_task();
    b.add_external_input(split);
    std::vector<std::string> lane_out(m);
    for (int i = 0; i < m; ++i) lane_out[i] = b.add_output(split);
    for (int i = 0; i < m; ++i) {
        int depth = stages + (i < extra ? 1 : 0);
        for (int s = 0; s < depth; ++s) {
            std::size_t stage = b.add_task();
            b.consume(stage, lane_out[i]);
            lane_out[i] = b.add_output(stage);
        }
    }
    std::size_t merge = b.add_task();
    for (int i = 0; i < m; ++i) b.consume(merge, lane_out[i]);
    std::string merged = b.add_output(merge);
    std::size_t final_task = b.add_task();
    b.consume(final_task, merged);
    b.add_output(final_task);
}

// Bank/inspiral lanes with grouped coincidence joins and a second pass.
void build_ligo(DagBuilder& b, int n) {
    int m = std::max(2, static_cast<int>(std::lround((n - 1) / 4.25)));
    int g = std::max(1, m / 5);
    m = std::max(2, (n - 1 - g) / 4);
    int pad = n - (4 * m + g + 1);
    std::vector<std::string> bank_out(m), insp_out(m);
    for (int i = 0; i < m; ++i) {
        std::size_t bank = b.add_task();
        b.add_external_input(bank);
        bank_out[i] = b.add_output(bank);
    }
    for (int i = 0; i < m; ++i) {
        std::size_t insp = b.add_task();
        b.consume(insp, bank_out[i]);
        insp_out[i] = b.add_output(insp);
    }
    std::vector<std::string> thinca_out(g);
    for (int i = 0; i < g; ++i) {
        std::size_t thinca = b.add_task();
        for (int j = i; j < m; j += g) b.consume(thinca, insp_out[j]);
        thinca_out[i] = b.add_output(thinca);
    }
    std::vector<std::string> second_out;
    for (int i = 0; i < m; ++i) {
        std::size_t trig = b.add_task();
        b.consume(trig, thinca_out[i % g]);
        std::string trig_out = b.add_output(trig);
        std::size_t insp2 = b.add_task();
        b.consume(insp2, trig_out);
        second_out.push_back(b.add_output(insp2));
    }
    for (int i = 0; i < pad; ++i) {
        std::size_t aux = b.add_task();
        b.consume(aux, thinca_out[i % g]);
        second_out.push_back(b.add_output(aux));
    }
    std::size_t join = b.add_task();
    for (const auto& out : second_out) b.consume(join, out);
    b.add_output(join);
}

// A handful of deep lanes with a single collector: low parallelism.
void build_sipht(DagBuilder& b, int n) {
    int w = std::max(2, static_cast<int>(std::lround(0.09 * n)));
    int lane_tasks = n - 2;
    std::vector<std::string> lane_out(w);
    for (int i = 0; i < w; ++i) {
        int depth = lane_tasks / w + (i < lane_tasks % w ? 1 : 0);
        std::string carry;
        for (int s = 0; s < depth; ++s) {
            std::size_t stage = b.add_task();
            if (s == 0) {
                b.add_external_input(stage);
            } else {
                b.consume(stage, carry);
            }
            carry = b.add_output(stage);
        }
        lane_out[i] = carry;
    }
    std::size_t concat = b.add_task();
    for (int i = 0; i < w; ++i) b.consume(concat, lane_out[i]);
    std::string concat_out = b.add_output(concat);
    std::size_t final_task = b.add_task();
    b.consume(final_task, concat_out);
    b.add_output(final_task);
}

}  // namespace

WorkflowJob instantiate_template(const std::string& workflow_id, const std::string& app,
                                 const TemplateParams& params, int n, RngStreams& rng) {
    DagBuilder builder(workflow_id, app, params, rng);
    if (app == "montage") {
        build_montage(builder, n);
    } else if (app == "cybershake") {
        build_cybershake(builder, n);
    } else if (app == "epigenome") {
        build_epigenome(builder, n);
    } else if (app == "ligo") {
        build_ligo(builder, n);
    } else if (app == "sipht") {
        build_sipht(builder, n);
    } else {
        throw std::invalid_argument("unknown app type '" + app + "'");
    }
    WorkflowJob wf = builder.seal();
    validate_dag(wf);
    return wf;
}

Cents min_cost_estimate(const WorkflowJob& wf, const CloudConfig& config) {
    const VmType& type = config.cheapest_type();
    const GlobalStorage& gs = config.global_storage;
    Cents total = 0;
    bool first = true;
    for (const Task& t : wf.tasks) {
        double pt = 0.0;
        for (const auto& id : t.inputs) {
            const DataItem& item = wf.item(id);
            if (item.producer) continue;  // produced on the same VM, cached
            pt += read_seconds(item.size_mb, gs, type.bandwidth_mb_per_s, 1.0);
        }
        pt += t.size_mi / type.cpu_mips;
        for (const auto& id : t.outputs) {
            pt += write_seconds(wf.item(id).size_mb, gs, type.bandwidth_mb_per_s, 1.0);
        }
        total += task_cost(pt, first, first, type, config, t.app_type);
        first = false;
    }
    return total;
}

Cents max_cost_estimate(const WorkflowJob& wf, const CloudConfig& config) {
    const VmType& type = config.fastest_type();
    Cents total = 0;
    for (const Task& t : wf.tasks) {
        double pt = processing_time_estimate(t, wf, type, config.global_storage);
        total += task_cost(pt, true, true, type, config, t.app_type);
    }
    return total;
}

Cents assign_budget(const WorkflowJob& wf, const CloudConfig& config, RngStreams& rng,
                    BudgetMode mode) {
    Cents lo = min_cost_estimate(wf, config);
    Cents hi = std::max(lo, max_cost_estimate(wf, config));
    if (mode == BudgetMode::UniformSufficient) {
        lo = std::max(lo, distribution_floor(wf, config));
        hi = std::max(hi, lo);
    }
    return rng.uniform_int(RngStreams::Stream::Budgets, lo, hi);
}

std::vector<WorkflowJob> generate_workload(const WorkloadSpec& spec, const CloudConfig& config,
                                           const TemplateSet& templates) {
    if (spec.count <= 0) throw std::invalid_argument("workload count must be > 0");
    if (spec.arrival_rate_per_min <= 0) {
        throw std::invalid_argument("arrival rate must be > 0");
    }
    std::vector<std::string> apps =
        spec.app_types.empty() ? known_app_types() : spec.app_types;
    std::vector<std::string> sizes = spec.size_classes.empty()
                                         ? std::vector<std::string>{"small", "medium", "large"}
                                         : spec.size_classes;

    RngStreams rng(spec.seed);
    double mean_gap = 60.0 / spec.arrival_rate_per_min;
    double clock = 0.0;
    std::vector<WorkflowJob> jobs;
    jobs.reserve(spec.count);
    for (int k = 0; k < spec.count; ++k) {
        double gap = std::max(rng.exponential(RngStreams::Stream::Arrivals, mean_gap), 1e-9);
        clock += gap;
        auto combo = rng.uniform_int(kShape, 0,
                                     static_cast<std::int64_t>(apps.size() * sizes.size()) - 1);
        const std::string& app = apps[static_cast<std::size_t>(combo) / sizes.size()];
        const std::string& size_class = sizes[static_cast<std::size_t>(combo) % sizes.size()];
        int target = size_class_target(size_class);
        int n = static_cast<int>(rng.uniform_int(kShape, std::lround(0.9 * target),
                                                 std::lround(1.1 * target)));

        char name[16];
        std::snprintf(name, sizeof(name), "w%04d", k + 1);
        WorkflowJob wf = instantiate_template(name, app, templates.at(app), n, rng);
        wf.arrival_s = clock;
        wf.size_class = size_class;
        wf.budget = assign_budget(wf, config, rng, spec.budget_mode);
        jobs.push_back(std::move(wf));
    }
    return jobs;
}

namespace {

std::string local_id(const WorkflowJob& wf, const std::string& canonical) {
    const std::string prefix = wf.id + "/";
    if (canonical.rfind(prefix, 0) == 0) return canonical.substr(prefix.size());
    return canonical;
}

void check_fields(const json& record, const std::set<std::string>& allowed, int line) {
    for (const auto& [key, value] : record.items()) {
        (void)value;
        if (!allowed.count(key)) {
            throw ParseError(line, "unknown field '" + key + "' in '" +
                                       record.value("record", "?") + "' record");
        }
    }
}

template <typename T>
T required(const json& record, const std::string& field, int line) {
    if (!record.contains(field)) {
        throw ParseError(line, "missing field '" + field + "' in '" +
                                   record.value("record", "?") + "' record");
    }
    try {
        return record.at(field).get<T>();
    } catch (const json::exception&) {
        throw ParseError(line, "field '" + field + "' has the wrong type");
    }
}

}  // namespace

void save_workload(const std::filesystem::path& path, const std::vector<WorkflowJob>& jobs,
                   const WorkloadHeader& header) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << json{{"record", "header"},
                {"format_version", header.format_version},
                {"seed", header.seed},
                {"arrival_rate_per_min", header.arrival_rate_per_min}}
               .dump()
        << '\n';
    for (const WorkflowJob& wf : jobs) {
        out << json{{"record", "workflow"},
                    {"id", wf.id},
                    {"app_type", wf.app_type},
                    {"budget_cents", wf.budget},
                    {"arrival_s", wf.arrival_s}}
                   .dump()
            << '\n';
        for (const Task& t : wf.tasks) {
            out << json{{"record", "task"},
                        {"id", local_id(wf, t.id)},
                        {"size_mi", t.size_mi},
                        {"app_type", t.app_type}}
                       .dump()
                << '\n';
        }
        for (const auto& [id, item] : wf.data) {
            json record{{"record", "data"},
                        {"id", local_id(wf, id)},
                        {"size_mb", item.size_mb}};
            if (item.producer) record["producer"] = local_id(wf, *item.producer);
            out << record.dump() << '\n';
        }
        for (const Task& t : wf.tasks) {
            for (const auto& s : t.successors) {
                out << json{{"record", "edge"},
                            {"parent", local_id(wf, t.id)},
                            {"child", local_id(wf, s)}}
                           .dump()
                    << '\n';
            }
            for (const auto& d : t.inputs) {
                out << json{{"record", "input"},
                            {"task", local_id(wf, t.id)},
                            {"data", local_id(wf, d)}}
                           .dump()
                    << '\n';
            }
        }
    }
}

std::vector<WorkflowJob> load_workload(const std::filesystem::path& path,
                                       const CloudConfig& config) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open workload file '" + path.string() + "'");

    WorkloadHeader header;
    bool header_seen = false;
    std::vector<WorkflowJob> jobs;
    std::vector<bool> budget_given;
    std::vector<bool> arrival_given;
    std::set<std::string> workflow_ids;

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(line_no, std::string("not a JSON record: ") + e.what());
        }
        std::string kind = required<std::string>(record, "record", line_no);
        if (kind == "header") {
            check_fields(record, {"record", "format_version", "seed", "arrival_rate_per_min"},
                         line_no);
            header.format_version = required<int>(record, "format_version", line_no);
            if (header.format_version != 1) {
                throw ParseError(line_no, "unsupported format_version " +
                                              std::to_string(header.format_version));
            }
            header.seed = required<std::uint64_t>(record, "seed", line_no);
            header.arrival_rate_per_min =
                required<double>(record, "arrival_rate_per_min", line_no);
            header_seen = true;
            continue;
        }
        if (kind == "workflow") {
            check_fields(record, {"record", "id", "app_type", "budget_cents", "arrival_s"},
                         line_no);
            WorkflowJob wf;
            wf.id = required<std::string>(record, "id", line_no);
            wf.app_type = required<std::string>(record, "app_type", line_no);
            if (!workflow_ids.insert(wf.id).second) {
                throw ParseError(line_no, "duplicate workflow id '" + wf.id + "'");
            }
            bool has_budget = record.contains("budget_cents");
            bool has_arrival = record.contains("arrival_s");
            if (has_budget) wf.budget = required<Cents>(record, "budget_cents", line_no);
            if (has_arrival) wf.arrival_s = required<double>(record, "arrival_s", line_no);
            jobs.push_back(std::move(wf));
            budget_given.push_back(has_budget);
            arrival_given.push_back(has_arrival);
            continue;
        }
        if (jobs.empty()) {
            throw ParseError(line_no, "'" + kind + "' record before any workflow record");
        }
        WorkflowJob& wf = jobs.back();
        const std::string prefix = wf.id + "/";
        if (kind == "task") {
            check_fields(record, {"record", "id", "size_mi", "app_type"}, line_no);
            Task t;
            t.id = prefix + required<std::string>(record, "id", line_no);
            t.workflow_id = wf.id;
            t.size_mi = required<double>(record, "size_mi", line_no);
            t.app_type = required<std::string>(record, "app_type", line_no);
            wf.tasks.push_back(std::move(t));
        } else if (kind == "data") {
            check_fields(record, {"record", "id", "size_mb", "producer"}, line_no);
            DataItem item;
            item.id = prefix + required<std::string>(record, "id", line_no);
            item.size_mb = required<double>(record, "size_mb", line_no);
            if (record.contains("producer")) {
                item.producer = prefix + required<std::string>(record, "producer", line_no);
            }
            if (wf.data.count(item.id)) {
                throw ParseError(line_no, "duplicate data id '" + item.id + "'");
            }
            std::string id = item.id;
            wf.data.emplace(id, std::move(item));
        } else if (kind == "edge") {
            check_fields(record, {"record", "parent", "child"}, line_no);
            std::string parent = prefix + required<std::string>(record, "parent", line_no);
            std::string child = prefix + required<std::string>(record, "child", line_no);
            std::size_t p = wf.task_index(parent);
            std::size_t c = wf.task_index(child);
            if (p == kNoIndex || c == kNoIndex) {
                throw ParseError(line_no, "edge references unknown task");
            }
            wf.tasks[p].successors.push_back(child);
            wf.tasks[c].predecessors.push_back(parent);
        } else if (kind == "input") {
            check_fields(record, {"record", "task", "data"}, line_no);
            std::string task = prefix + required<std::string>(record, "task", line_no);
            std::size_t t = wf.task_index(task);
            if (t == kNoIndex) throw ParseError(line_no, "input references unknown task");
            wf.tasks[t].inputs.push_back(prefix +
                                         required<std::string>(record, "data", line_no));
        } else {
            throw ParseError(line_no, "unknown record kind '" + kind + "'");
        }
    }
    if (!header_seen) throw ParseError(line_no, "missing header record");

    // Derive task outputs from producer fields, then validate.
    for (WorkflowJob& wf : jobs) {
        for (const auto& [id, item] : wf.data) {
            if (!item.producer) continue;
            std::size_t t = wf.task_index(*item.producer);
            if (t != kNoIndex) wf.tasks[t].outputs.push_back(id);
        }
        wf.size_class = size_class_for_count(wf.tasks.size());
        validate_dag(wf);
    }

    // Fill omitted arrivals/budgets from the header's generator settings.
    RngStreams rng(header.seed);
    double clock = 0.0;
    double mean_gap = 60.0 / header.arrival_rate_per_min;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (!arrival_given[i]) {
            clock += std::max(rng.exponential(RngStreams::Stream::Arrivals, mean_gap), 1e-9);
            jobs[i].arrival_s = clock;
        } else {
            clock = jobs[i].arrival_s;
        }
        if (!budget_given[i]) {
            jobs[i].budget = assign_budget(jobs[i], config, rng);
        }
        if (jobs[i].budget <= 0) {
            throw ValidationError(ValidationError::Kind::BadField,
                                  "workflow '" + jobs[i].id + "' has non-positive budget");
        }
    }
    return jobs;
}

}  // namespace waasim
