#include "waasim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace waasim {

using nlohmann::json;

ExperimentConfig default_experiment_config() {
    ExperimentConfig config;
    config.cloud.billing_period_s = 1.0;
    config.cloud.vm_catalogue = {
        {"small", 2, 1, 62.5, 20000, 45},
        {"medium", 4, 2, 62.5, 40000, 45},
        {"large", 8, 4, 62.5, 80000, 45},
        {"xlarge", 16, 8, 62.5, 160000, 45},
    };
    config.cloud.global_storage = {50.0, 50.0};
    for (const auto& app : known_app_types()) {
        config.cloud.container_images.push_back({"img-" + app, app, 10.0});
    }
    config.cloud.idle_threshold_s = 5.0;
    config.cloud.provision_check_interval_s = 5.0;
    config.cloud.cpu_degradation = {12.0, 10.0, 24.0};
    config.cloud.bandwidth_degradation = {9.5, 5.0, 19.0};
    config.workload.count = 100;
    config.workload.arrival_rate_per_min = 1.0;
    config.replications = 10;
    return config;
}

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.count(key)) {
            throw std::runtime_error("config: unknown key '" + key + "' in " + where);
        }
    }
}

DegradationSpec parse_degradation(const json& obj, const std::string& where) {
    reject_unknown(obj, {"mean_pct", "stddev_pct", "max_pct"}, where);
    DegradationSpec spec;
    spec.mean_pct = obj.value("mean_pct", 0.0);
    spec.stddev_pct = obj.value("stddev_pct", 0.0);
    spec.max_pct = obj.value("max_pct", 0.0);
    return spec;
}

LogUniform parse_range(const json& value, const std::string& where) {
    if (!value.is_array() || value.size() != 2) {
        throw std::runtime_error("config: " + where + " must be a [lo, hi] pair");
    }
    return LogUniform{value[0].get<double>(), value[1].get<double>()};
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
    json root = json::parse(json_text);
    ExperimentConfig config = default_experiment_config();
    reject_unknown(root,
                   {"cloud", "workload", "templates", "policy", "replications", "master_seed",
                    "sweeps", "workload_file", "trace"},
                   "top level");

    if (root.contains("cloud")) {
        const json& cloud = root["cloud"];
        reject_unknown(cloud,
                       {"billing_period_s", "vm_types", "global_storage", "container_images",
                        "idle_threshold_s", "provision_check_interval_s", "cpu_degradation",
                        "bandwidth_degradation", "max_events"},
                       "cloud");
        config.cloud.billing_period_s =
            cloud.value("billing_period_s", config.cloud.billing_period_s);
        if (cloud.contains("vm_types")) {
            config.cloud.vm_catalogue.clear();
            for (const json& t : cloud["vm_types"]) {
                reject_unknown(t,
                               {"name", "cpu_mips", "price_cents_per_bp", "bandwidth_mb_per_s",
                                "storage_mb", "provisioning_delay_s"},
                               "vm_types entry");
                config.cloud.vm_catalogue.push_back(
                    {t.at("name").get<std::string>(), t.at("cpu_mips").get<double>(),
                     t.at("price_cents_per_bp").get<Cents>(),
                     t.at("bandwidth_mb_per_s").get<double>(), t.at("storage_mb").get<double>(),
                     t.value("provisioning_delay_s", 45.0)});
            }
        }
        if (cloud.contains("global_storage")) {
            const json& gs = cloud["global_storage"];
            reject_unknown(gs, {"read_rate_mb_per_s", "write_rate_mb_per_s"}, "global_storage");
            config.cloud.global_storage = {gs.at("read_rate_mb_per_s").get<double>(),
                                           gs.at("write_rate_mb_per_s").get<double>()};
        }
        if (cloud.contains("container_images")) {
            config.cloud.container_images.clear();
            for (const json& img : cloud["container_images"]) {
                reject_unknown(img, {"id", "app_type", "init_delay_s"}, "container_images entry");
                config.cloud.container_images.push_back({img.at("id").get<std::string>(),
                                                         img.at("app_type").get<std::string>(),
                                                         img.value("init_delay_s", 10.0)});
            }
        }
        config.cloud.idle_threshold_s =
            cloud.value("idle_threshold_s", config.cloud.idle_threshold_s);
        config.cloud.provision_check_interval_s =
            cloud.value("provision_check_interval_s", config.cloud.provision_check_interval_s);
        if (cloud.contains("cpu_degradation")) {
            config.cloud.cpu_degradation =
                parse_degradation(cloud["cpu_degradation"], "cpu_degradation");
        }
        if (cloud.contains("bandwidth_degradation")) {
            config.cloud.bandwidth_degradation =
                parse_degradation(cloud["bandwidth_degradation"], "bandwidth_degradation");
        }
        config.cloud.max_events = cloud.value("max_events", config.cloud.max_events);
    }

    if (root.contains("workload")) {
        const json& wl = root["workload"];
        reject_unknown(
            wl, {"count", "arrival_rate_per_min", "seed", "app_types", "size_classes",
                 "budget_mode"},
            "workload");
        config.workload.count = wl.value("count", config.workload.count);
        config.workload.arrival_rate_per_min =
            wl.value("arrival_rate_per_min", config.workload.arrival_rate_per_min);
        config.workload.seed = wl.value("seed", config.workload.seed);
        if (wl.contains("app_types")) {
            config.workload.app_types = wl["app_types"].get<std::vector<std::string>>();
        }
        if (wl.contains("size_classes")) {
            config.workload.size_classes = wl["size_classes"].get<std::vector<std::string>>();
        }
        if (wl.contains("budget_mode")) {
            std::string mode = wl["budget_mode"].get<std::string>();
            if (mode == "uniform_min_max") {
                config.workload.budget_mode = BudgetMode::UniformMinMax;
            } else if (mode == "uniform_sufficient") {
                config.workload.budget_mode = BudgetMode::UniformSufficient;
            } else {
                throw std::runtime_error("config: unknown budget_mode '" + mode + "'");
            }
        }
    }

    if (root.contains("templates")) {
        for (const auto& [app, spec] : root["templates"].items()) {
            reject_unknown(spec, {"mi", "data_mb", "heavy_data_mb", "width_frac"},
                           "templates." + app);
            TemplateParams params = config.templates.apps.count(app)
                                        ? config.templates.apps[app]
                                        : TemplateParams{};
            if (spec.contains("mi")) params.mi = parse_range(spec["mi"], "templates." + app + ".mi");
            if (spec.contains("data_mb")) {
                params.data_mb = parse_range(spec["data_mb"], "templates." + app + ".data_mb");
            }
            if (spec.contains("heavy_data_mb")) {
                params.heavy_data_mb =
                    parse_range(spec["heavy_data_mb"], "templates." + app + ".heavy_data_mb");
            }
            params.width_frac = spec.value("width_frac", params.width_frac);
            config.templates.apps[app] = params;
        }
    }

    if (root.contains("policy")) config.policy = parse_policy(root["policy"].get<std::string>());
    config.replications = root.value("replications", config.replications);
    if (config.replications < 1) throw std::runtime_error("config: replications must be >= 1");
    config.master_seed = root.value("master_seed", config.master_seed);
    if (root.contains("sweeps")) {
        const json& sweeps = root["sweeps"];
        reject_unknown(sweeps, {"arrival_rate", "cpu_degradation", "vm_delay", "container_delay"},
                       "sweeps");
        if (sweeps.contains("arrival_rate")) {
            config.sweeps.arrival_rate = sweeps["arrival_rate"].get<std::vector<double>>();
        }
        if (sweeps.contains("cpu_degradation")) {
            config.sweeps.cpu_degradation = sweeps["cpu_degradation"].get<std::vector<double>>();
        }
        if (sweeps.contains("vm_delay")) {
            config.sweeps.vm_delay = sweeps["vm_delay"].get<std::vector<double>>();
        }
        if (sweeps.contains("container_delay")) {
            config.sweeps.container_delay = sweeps["container_delay"].get<std::vector<double>>();
        }
    }
    config.workload_file = root.value("workload_file", config.workload_file);
    config.trace = root.value("trace", config.trace);

    config.cloud.finalize();
    return config;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_experiment_config(buffer.str());
}

double ReplicationMetrics::budget_met_pct() const {
    if (workflows.empty()) return 100.0;
    std::size_t met = 0;
    for (const auto& w : workflows) met += w.met ? 1 : 0;
    return 100.0 * static_cast<double>(met) / static_cast<double>(workflows.size());
}

ReplicationMetrics run_replication(const ExperimentConfig& config, int replication,
                                   std::ostream* trace_sink) {
    std::uint64_t seed = RngStreams::derive_seed(config.master_seed, replication);

    std::vector<WorkflowJob> jobs;
    if (!config.workload_file.empty()) {
        jobs = load_workload(config.workload_file, config.cloud);
    } else {
        WorkloadSpec spec = config.workload;
        spec.seed = seed;
        jobs = generate_workload(spec, config.cloud, config.templates);
    }

    Simulation sim(config.cloud, RngStreams(seed));
    if (trace_sink) {
        sim.set_trace(trace_sink, [&jobs](const Event& e) {
            std::ostringstream out;
            bool first = true;
            auto sep = [&]() {
                if (!first) out << '\t';
                first = false;
            };
            if (e.workflow != kNoIndex) {
                sep();
                out << "wf=" << jobs[e.workflow].id;
            }
            if (e.task != kNoIndex) {
                sep();
                out << "task=" << jobs[e.workflow].tasks[e.task].id;
            }
            if (e.vm != 0) {
                sep();
                out << "vm=" << e.vm;
            }
            if (!e.image.empty()) {
                sep();
                out << "image=" << e.image;
            }
            return out.str();
        });
    }

    SchedulerOptions options;
    options.policy = config.policy;
    EbpsmScheduler scheduler(sim, jobs, options);
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        validate_dag(jobs[i]);
        sim.schedule_event(
            Event{jobs[i].arrival_s, 0, EventKind::WorkflowArrival, i, kNoIndex, 0, {}});
    }

    ReplicationMetrics metrics;
    metrics.replication = replication;
    metrics.seed = seed;
    metrics.final_clock_s = sim.run_until_idle();
    metrics.events = sim.dispatched_events();

    for (std::size_t i = 0; i < jobs.size(); ++i) {
        WorkflowMetrics wm;
        wm.id = jobs[i].id;
        wm.app_type = jobs[i].app_type;
        wm.size_class = jobs[i].size_class;
        wm.arrival_s = jobs[i].arrival_s;
        wm.makespan_s = scheduler.workflow_finish(i) - jobs[i].arrival_s;
        wm.cost = scheduler.workflow_spend(i);
        wm.budget = jobs[i].budget;
        wm.met = wm.cost <= wm.budget;
        wm.cost_budget_ratio =
            wm.budget > 0 ? static_cast<double>(wm.cost) / static_cast<double>(wm.budget) : 0.0;
        metrics.workflows.push_back(std::move(wm));
        metrics.total_attributed_cents += scheduler.workflow_spend(i);
    }

    double busy = 0.0;
    double charged = 0.0;
    for (const auto& vm : sim.all_vms()) {
        busy += vm->busy_seconds_accumulated();
        charged += sim.charged_seconds(*vm);
        metrics.total_charged_cents += sim.charged_cents(*vm);
        ++metrics.vm_count_by_type[vm->type().name];
    }
    metrics.avg_vm_utilization = charged > 0 ? busy / charged : 0.0;
    for (const auto& type : config.cloud.vm_catalogue) {
        metrics.vm_count_by_type.emplace(type.name, 0);  // keep columns stable
    }
    return metrics;
}

std::vector<ReplicationMetrics> run_experiment(
    const ExperimentConfig& config, const std::optional<std::filesystem::path>& out_dir) {
    std::vector<ReplicationMetrics> all;
    for (int rep = 0; rep < config.replications; ++rep) {
        std::ofstream trace_file;
        std::ostream* sink = nullptr;
        if (config.trace && out_dir) {
            std::filesystem::path rep_dir = *out_dir / ("rep_" + std::to_string(rep));
            std::filesystem::create_directories(rep_dir);
            trace_file.open(rep_dir / "trace.tsv");
            sink = &trace_file;
        }
        all.push_back(run_replication(config, rep, sink));
    }
    return all;
}

double nearest_rank_percentile(std::vector<double> values, double pct) {
    if (values.empty()) throw std::invalid_argument("percentile of empty set");
    std::sort(values.begin(), values.end());
    auto n = static_cast<double>(values.size());
    auto rank = static_cast<std::size_t>(std::ceil(pct / 100.0 * n));
    rank = std::clamp<std::size_t>(rank, 1, values.size());
    return values[rank - 1];
}

Summary summarize(const std::vector<ReplicationMetrics>& metrics) {
    Summary s;
    s.replication_count = static_cast<int>(metrics.size());

    std::map<std::string, std::vector<double>> per_app;
    std::vector<double> all_makespans;
    std::vector<double> violated_ratios;
    double met_pct_sum = 0.0;
    double util_sum = 0.0;
    std::map<std::string, double> vm_count_sum;
    for (const auto& rep : metrics) {
        met_pct_sum += rep.budget_met_pct();
        util_sum += rep.avg_vm_utilization;
        for (const auto& [type, count] : rep.vm_count_by_type) {
            vm_count_sum[type] += static_cast<double>(count);
        }
        for (const auto& w : rep.workflows) {
            ++s.workflow_count;
            per_app[w.app_type].push_back(w.makespan_s);
            all_makespans.push_back(w.makespan_s);
            if (!w.met) {
                ++s.violated_count;
                violated_ratios.push_back(w.cost_budget_ratio);
            }
        }
    }
    if (!metrics.empty()) {
        s.budget_met_pct = met_pct_sum / static_cast<double>(metrics.size());
        s.utilization_mean = util_sum / static_cast<double>(metrics.size());
        for (const auto& [type, sum] : vm_count_sum) {
            s.mean_vm_count_by_type[type] = sum / static_cast<double>(metrics.size());
        }
    }
    for (auto& [app, values] : per_app) {
        AppAggregate agg;
        agg.count = values.size();
        agg.median = nearest_rank_percentile(values, 50);
        agg.q1 = nearest_rank_percentile(values, 25);
        agg.q3 = nearest_rank_percentile(values, 75);
        s.makespan_by_app[app] = agg;
    }
    if (!all_makespans.empty()) {
        s.median_makespan_all = nearest_rank_percentile(all_makespans, 50);
    }
    if (!violated_ratios.empty()) {
        for (int p : {10, 30, 50, 70, 90}) {
            s.violated_ratio_percentiles[p] = nearest_rank_percentile(violated_ratios, p);
        }
    }
    return s;
}

namespace {

std::string fmt(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    return buf;
}

void write_boxplot_svg(const Summary& summary, const std::filesystem::path& path) {
    if (summary.makespan_by_app.empty()) return;
    const int box_w = 70;
    const int gap = 40;
    const int height = 320;
    const int margin = 50;
    int width = margin * 2 +
                static_cast<int>(summary.makespan_by_app.size()) * (box_w + gap);
    double max_val = 0.0;
    for (const auto& [app, agg] : summary.makespan_by_app) {
        max_val = std::max(max_val, agg.q3 * 1.2);
    }
    if (max_val <= 0) max_val = 1.0;
    auto y_of = [&](double v) { return height - margin - (v / max_val) * (height - 2 * margin); };

    std::ofstream out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    out << "<text x=\"10\" y=\"20\" font-size=\"13\">makespan by app type (s)</text>\n";
    int x = margin;
    for (const auto& [app, agg] : summary.makespan_by_app) {
        double y1 = y_of(agg.q1);
        double y2 = y_of(agg.median);
        double y3 = y_of(agg.q3);
        out << "<rect x=\"" << x << "\" y=\"" << fmt(y3) << "\" width=\"" << box_w
            << "\" height=\"" << fmt(std::max(1.0, y1 - y3))
            << "\" fill=\"#9ecae1\" stroke=\"#333\"/>\n";
        out << "<line x1=\"" << x << "\" y1=\"" << fmt(y2) << "\" x2=\"" << x + box_w
            << "\" y2=\"" << fmt(y2) << "\" stroke=\"#000\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << x << "\" y=\"" << height - margin + 18 << "\" font-size=\"12\">"
            << app << "</text>\n";
        out << "<text x=\"" << x << "\" y=\"" << height - margin + 34 << "\" font-size=\"10\">"
            << fmt(agg.median) << "</text>\n";
        x += box_w + gap;
    }
    out << "</svg>\n";
}

}  // namespace

void emit_outputs(const Summary& summary, const std::vector<ReplicationMetrics>& metrics,
                  const std::filesystem::path& out_dir, const EmitOptions& options) {
    if (!std::filesystem::is_directory(out_dir)) {
        throw std::runtime_error("output directory does not exist: " + out_dir.string());
    }

    for (const auto& rep : metrics) {
        std::filesystem::path rep_dir = out_dir / ("rep_" + std::to_string(rep.replication));
        std::filesystem::create_directory(rep_dir);

        std::ofstream wf_csv(rep_dir / "workflows.csv");
        wf_csv << "workflow_id,app_type,size_class,arrival_s,makespan_s,cost_cents,budget_cents,"
                  "met\n";
        for (const auto& w : rep.workflows) {
            wf_csv << w.id << ',' << w.app_type << ',' << w.size_class << ',' << fmt(w.arrival_s)
                   << ',' << fmt(w.makespan_s) << ',' << w.cost << ',' << w.budget << ','
                   << (w.met ? 1 : 0) << '\n';
        }

        std::ofstream plat_csv(rep_dir / "platform.csv");
        plat_csv << "replication,seed,workflow_count,budget_met_pct,avg_vm_utilization,"
                    "total_charged_cents,total_attributed_cents,final_clock_s,events";
        for (const auto& [type, count] : rep.vm_count_by_type) {
            plat_csv << ",vm_count_" << type;
            (void)count;
        }
        plat_csv << '\n';
        plat_csv << rep.replication << ',' << rep.seed << ',' << rep.workflows.size() << ','
                 << fmt(rep.budget_met_pct()) << ',' << fmt(rep.avg_vm_utilization) << ','
                 << rep.total_charged_cents << ',' << rep.total_attributed_cents << ','
                 << fmt(rep.final_clock_s) << ',' << rep.events;
        for (const auto& [type, count] : rep.vm_count_by_type) {
            (void)type;
            plat_csv << ',' << count;
        }
        plat_csv << '\n';
    }

    std::ofstream sum_csv(out_dir / "summary.csv");
    sum_csv << "section,key,value\n";
    sum_csv << "platform,replications," << summary.replication_count << '\n';
    sum_csv << "platform,workflows," << summary.workflow_count << '\n';
    sum_csv << "platform,budget_met_pct," << fmt(summary.budget_met_pct) << '\n';
    sum_csv << "platform,utilization_mean," << fmt(summary.utilization_mean) << '\n';
    sum_csv << "platform,median_makespan_s," << fmt(summary.median_makespan_all) << '\n';
    sum_csv << "platform,violated_count," << summary.violated_count << '\n';
    for (const auto& [p, v] : summary.violated_ratio_percentiles) {
        sum_csv << "violated_ratio_percentile,p" << p << ',' << fmt(v) << '\n';
    }
    for (const auto& [app, agg] : summary.makespan_by_app) {
        sum_csv << "makespan_median," << app << ',' << fmt(agg.median) << '\n';
        sum_csv << "makespan_q1," << app << ',' << fmt(agg.q1) << '\n';
        sum_csv << "makespan_q3," << app << ',' << fmt(agg.q3) << '\n';
    }
    for (const auto& [type, mean] : summary.mean_vm_count_by_type) {
        sum_csv << "mean_vm_count," << type << ',' << fmt(mean) << '\n';
    }

    std::ofstream report(out_dir / "report.txt");
    report << "run summary\n===========\n";
    report << "replications:        " << summary.replication_count << '\n';
    report << "workflows:           " << summary.workflow_count << '\n';
    report << "budget met:          " << fmt(summary.budget_met_pct) << " %\n";
    report << "mean VM utilization: " << fmt(summary.utilization_mean * 100.0) << " %\n";
    report << "median makespan:     " << fmt(summary.median_makespan_all) << " s\n";
    if (summary.violated_ratio_percentiles.empty()) {
        report << "budget violations:   none\n";
    } else {
        report << "budget violations:   " << summary.violated_count
               << " (cost/budget percentiles:";
        for (const auto& [p, v] : summary.violated_ratio_percentiles) {
            report << " p" << p << "=" << fmt(v);
        }
        report << ")\n";
    }
    report << "\nmakespan by app type (s)\n";
    for (const auto& [app, agg] : summary.makespan_by_app) {
        report << "  " << app << ": median " << fmt(agg.median) << "  q1 " << fmt(agg.q1)
               << "  q3 " << fmt(agg.q3) << "  n=" << agg.count << '\n';
    }
    report << "\nmean VM count by type\n";
    for (const auto& [type, mean] : summary.mean_vm_count_by_type) {
        report << "  " << type << ": " << fmt(mean) << '\n';
    }

    if (options.boxplots) {
        write_boxplot_svg(summary, out_dir / "makespan_boxplot.svg");
    }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> parts;
    std::stringstream in(line);
    std::string field;
    while (std::getline(in, field, ',')) parts.push_back(field);
    return parts;
}

}  // namespace

std::vector<ReplicationMetrics> load_metrics(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw std::runtime_error("metrics directory does not exist: " + dir.string());
    }
    std::vector<std::filesystem::path> rep_dirs;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_directory() && entry.path().filename().string().rfind("rep_", 0) == 0) {
            rep_dirs.push_back(entry.path());
        }
    }
    std::sort(rep_dirs.begin(), rep_dirs.end(), [](const auto& a, const auto& b) {
        auto num = [](const std::filesystem::path& p) {
            return std::stoi(p.filename().string().substr(4));
        };
        return num(a) < num(b);
    });

    std::vector<ReplicationMetrics> all;
    for (const auto& rep_dir : rep_dirs) {
        ReplicationMetrics rep;
        rep.replication = std::stoi(rep_dir.filename().string().substr(4));

        std::ifstream wf_csv(rep_dir / "workflows.csv");
        if (!wf_csv) throw std::runtime_error("missing " + (rep_dir / "workflows.csv").string());
        std::string line;
        std::getline(wf_csv, line);  // header
        while (std::getline(wf_csv, line)) {
            auto parts = split_csv_line(line);
            if (parts.size() != 8) throw std::runtime_error("malformed row in workflows.csv");
            WorkflowMetrics w;
            w.id = parts[0];
            w.app_type = parts[1];
            w.size_class = parts[2];
            w.arrival_s = std::stod(parts[3]);
            w.makespan_s = std::stod(parts[4]);
            w.cost = std::stoll(parts[5]);
            w.budget = std::stoll(parts[6]);
            w.met = parts[7] == "1";
            w.cost_budget_ratio =
                w.budget > 0 ? static_cast<double>(w.cost) / static_cast<double>(w.budget) : 0.0;
            rep.workflows.push_back(std::move(w));
        }

        std::ifstream plat_csv(rep_dir / "platform.csv");
        if (plat_csv) {
            std::string header;
            std::getline(plat_csv, header);
            auto names = split_csv_line(header);
            if (std::getline(plat_csv, line)) {
                auto parts = split_csv_line(line);
                for (std::size_t i = 0; i < names.size() && i < parts.size(); ++i) {
                    if (names[i] == "seed") rep.seed = std::stoull(parts[i]);
                    if (names[i] == "avg_vm_utilization") {
                        rep.avg_vm_utilization = std::stod(parts[i]);
                    }
                    if (names[i] == "total_charged_cents") {
                        rep.total_charged_cents = std::stoll(parts[i]);
                    }
                    if (names[i] == "total_attributed_cents") {
                        rep.total_attributed_cents = std::stoll(parts[i]);
                    }
                    if (names[i] == "final_clock_s") rep.final_clock_s = std::stod(parts[i]);
                    if (names[i] == "events") rep.events = std::stoull(parts[i]);
                    if (names[i].rfind("vm_count_", 0) == 0) {
                        rep.vm_count_by_type[names[i].substr(9)] = std::stoull(parts[i]);
                    }
                }
            }
        }
        all.push_back(std::move(rep));
    }
    return all;
}

ExperimentConfig apply_sweep_axis(const ExperimentConfig& config, const std::string& axis,
                                  double value) {
    ExperimentConfig out = config;
    if (axis == "arrival_rate") {
        out.workload.arrival_rate_per_min = value;
    } else if (axis == "cpu_degradation") {
        out.cloud.cpu_degradation = {value / 2.0, 1.0, value};
    } else if (axis == "vm_delay") {
        for (auto& type : out.cloud.vm_catalogue) type.provisioning_delay_s = value;
    } else if (axis == "container_delay") {
        for (auto& img : out.cloud.container_images) img.init_delay_s = value;
    } else {
        throw std::invalid_argument(
            "unknown sweep axis '" + axis +
            "' (expected arrival_rate|cpu_degradation|vm_delay|container_delay)");
    }
    return out;
}

const std::vector<double>& sweep_values(const ExperimentConfig& config, const std::string& axis) {
    if (axis == "arrival_rate") return config.sweeps.arrival_rate;
    if (axis == "cpu_degradation") return config.sweeps.cpu_degradation;
    if (axis == "vm_delay") return config.sweeps.vm_delay;
    if (axis == "container_delay") return config.sweeps.container_delay;
    throw std::invalid_argument("unknown sweep axis '" + axis + "'");
}

}  // namespace waasim
