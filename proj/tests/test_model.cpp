#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "waasim/costs.hpp"

using namespace waasim;
using namespace waasim::test;

namespace {

Vm make_vm(const VmType& type) { return Vm(1, 0, type, 0.0); }

const VmType kSmall25{"small", 2, 1, 25, 20000, 45};  // matches the worked examples

DataItem item(const std::string& id, double mb) { return DataItem{id, mb, std::nullopt}; }

}  // namespace

TEST_CASE("input transfer time sums global-storage and bandwidth terms per miss") {
    GlobalStorage gs{50, 50};
    Vm vm = make_vm(kSmall25);
    DataItem d100 = item("d100", 100);

    // 100 MB: 100/50 + 100/25 = 6 s
    CHECK(input_transfer_time({&d100}, vm, gs, 1.0) == doctest::Approx(6.0).epsilon(1e-12));

    vm.cache_insert("d100", 100);
    CHECK(input_transfer_time({&d100}, vm, gs, 1.0) == 0.0);

    DataItem d50 = item("d50", 50);
    Vm vm2 = make_vm(kSmall25);
    vm2.cache_insert("d50", 50);
    CHECK(input_transfer_time({&d100, &d50}, vm2, gs, 1.0) ==
          doctest::Approx(6.0).epsilon(1e-12));

    CHECK(input_transfer_time({}, vm, gs, 1.0) == 0.0);
}

TEST_CASE("output transfer always writes to global storage") {
    GlobalStorage gs{50, 50};
    Vm vm = make_vm(kSmall25);
    DataItem d100 = item("d100", 100);

    CHECK(output_transfer_time({&d100}, vm, gs, 1.0) == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(output_transfer_time({}, vm, gs, 1.0) == 0.0);

    // cached outputs are still written back
    vm.cache_insert("d100", 100);
    CHECK(output_transfer_time({&d100}, vm, gs, 1.0) == doctest::Approx(6.0).epsilon(1e-12));

    // 19% bandwidth degradation: 2 + 100/20.25
    double degraded = output_transfer_time({&d100}, vm, gs, 0.81);
    CHECK(degraded == doctest::Approx(2.0 + 100.0 / 20.25).epsilon(1e-12));
    CHECK(degraded == doctest::Approx(6.938271604938272).epsilon(1e-9));
}

TEST_CASE("task runtime scales size by degraded capacity") {
    Task t;
    t.size_mi = 100;
    CHECK(task_runtime(t, kSmall25, 1.0) == doctest::Approx(50.0).epsilon(1e-12));
    CHECK(task_runtime(t, kSmall25, 0.76) == doctest::Approx(65.78947368421052).epsilon(1e-9));

    Task unit;
    unit.size_mi = 2;  // equal to capacity
    CHECK(task_runtime(unit, kSmall25, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("processing time sums staging, runtime and write-back") {
    auto wf = make_workflow("w1",
                            {{"t1", 100, {"din"}, {"dout"}}},
                            {{"din", 100, ""}, {"dout", 100, "t1"}});
    GlobalStorage gs{50, 50};
    Vm vm = make_vm(kSmall25);

    // 6 + 50 + 6
    CHECK(processing_time(wf.tasks[0], wf, vm, gs, 1.0, 1.0) ==
          doctest::Approx(62.0).epsilon(1e-12));

    // cached input, no output
    auto wf2 = make_workflow("w2", {{"t1", 100, {"din"}, {}}}, {{"din", 100, ""}});
    Vm vm2 = make_vm(kSmall25);
    vm2.cache_insert("din", 100);
    CHECK(processing_time(wf2.tasks[0], wf2, vm2, gs, 1.0, 1.0) ==
          doctest::Approx(50.0).epsilon(1e-12));

    // estimation mode ignores the cache entirely
    CHECK(processing_time_estimate(wf.tasks[0], wf, kSmall25, gs) ==
          doctest::Approx(62.0).epsilon(1e-12));
    Vm cached = make_vm(kSmall25);
    cached.cache_insert("din", 100);
    CHECK(processing_time_estimate(wf.tasks[0], wf, kSmall25, gs) >=
          processing_time(wf.tasks[0], wf, cached, gs, 1.0, 1.0));
}

TEST_CASE("task cost rounds occupancy up to whole billing periods") {
    CloudConfig config = demo_config();
    const VmType& small = config.vm_catalogue[0];

    // pt=100 with both delays on a 1 s period at 1 cent
    CHECK(task_cost(100, true, true, small, 1.0, 10.0) == 155);
    CHECK(task_cost(0, false, false, small, 1.0, 10.0) == 0);

    VmType pricey{"p", 2, 4, 25, 20000, 45};
    CHECK(task_cost(155, false, false, pricey, 60.0, 10.0) == 12);  // ceil(155/60)*4

    CHECK(task_cost(100, true, true, small, config, "demo") == 155);
}

TEST_CASE("task cost is monotone in occupancy and delay flags") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> pt_dist(0.0, 500.0);
    for (int i = 0; i < 200; ++i) {
        double a = pt_dist(gen);
        double b = a + pt_dist(gen) * 0.1;
        VmType type{"t", 4, 3, 30, 1000, 45};
        CHECK(task_cost(a, false, false, type, 1.0, 10.0) <=
              task_cost(b, false, false, type, 1.0, 10.0));
        CHECK(task_cost(a, false, false, type, 1.0, 10.0) <=
              task_cost(a, true, false, type, 1.0, 10.0));
        CHECK(task_cost(a, true, false, type, 1.0, 10.0) <=
              task_cost(a, true, true, type, 1.0, 10.0));
    }
}

TEST_CASE("unit billing period with no delays degenerates to ceil(pt)*price") {
    VmType type{"t", 4, 3, 30, 1000, 45};
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> pt_dist(0.0, 300.0);
    for (int i = 0; i < 200; ++i) {
        double pt = pt_dist(gen);
        CHECK(task_cost(pt, false, false, type, 1.0, 10.0) ==
              static_cast<Cents>(std::ceil(pt)) * 3);
    }
}

TEST_CASE("cache-hit arithmetic identity on dyadic sizes") {
    // Dyadic sizes and rates make every term exactly representable, so the
    // identity holds bit for bit.
    GlobalStorage gs{64, 64};
    VmType type{"t", 2, 1, 32, 100000, 45};
    std::vector<DataItem> items = {item("a", 64), item("b", 128), item("c", 256),
                                   item("d", 512)};
    std::vector<const DataItem*> refs;
    for (auto& d : items) refs.push_back(&d);

    Vm uncached = make_vm(type);
    double full = input_transfer_time(refs, uncached, gs, 1.0);

    Vm vm = make_vm(type);
    vm.cache_insert("b", 128);
    vm.cache_insert("d", 512);
    double hit_contribution = read_seconds(128, gs, 32, 1.0) + read_seconds(512, gs, 32, 1.0);
    CHECK(input_transfer_time(refs, vm, gs, 1.0) == full - hit_contribution);
}

TEST_CASE("vm cache is FIFO bounded by storage capacity") {
    VmType tiny{"tiny", 2, 1, 25, 300, 45};
    Vm vm = make_vm(tiny);
    vm.cache_insert("a", 100);
    vm.cache_insert("b", 100);
    vm.cache_insert("c", 100);
    CHECK(vm.cached_mb() == 300);
    CHECK(vm.cache_contains("a"));

    vm.cache_insert("d", 150);  // evicts a and b, the earliest stored
    CHECK_FALSE(vm.cache_contains("a"));
    CHECK_FALSE(vm.cache_contains("b"));
    CHECK(vm.cache_contains("c"));
    CHECK(vm.cache_contains("d"));
    CHECK(vm.cached_mb() == 250);

    // an item larger than the store is never cached
    vm.cache_insert("huge", 400);
    CHECK_FALSE(vm.cache_contains("huge"));
    CHECK(vm.cached_mb() == 250);

    // re-inserting keeps the original FIFO position
    vm.cache_insert("c", 100);
    vm.cache_insert("e", 200);  // evicts c then d
    CHECK_FALSE(vm.cache_contains("c"));
    CHECK(vm.cache_contains("e"));
}

TEST_CASE("vm cache never exceeds capacity under random churn") {
    VmType type{"t", 2, 1, 25, 1000, 45};
    Vm vm = make_vm(type);
    std::mt19937_64 gen(13);
    std::uniform_real_distribution<double> size_dist(1.0, 700.0);
    for (int i = 0; i < 500; ++i) {
        vm.cache_insert("d" + std::to_string(gen() % 40), size_dist(gen));
        CHECK(vm.cached_mb() <= type.storage_mb);
        double sum = 0;
        for (const auto& [id, mb] : vm.cache()) sum += mb;
        CHECK(sum == doctest::Approx(vm.cached_mb()));
    }
}

TEST_CASE("validate_dag accepts a chain and rejects malformed graphs") {
    auto chain = make_workflow("w1",
                               {{"a", 10, {}, {"da"}}, {"b", 10, {"da"}, {"db"}},
                                {"c", 10, {"db"}, {}}},
                               {{"da", 10, "a"}, {"db", 10, "b"}});
    CHECK_NOTHROW(validate_dag(chain));

    SUBCASE("two tasks referencing each other form a cycle") {
        auto cyc = make_workflow("w2", {{"a", 10, {}, {}}, {"b", 10, {}, {}}}, {},
                                 {{"a", "b"}, {"b", "a"}});
        CHECK_THROWS_AS(validate_dag(cyc), ValidationError);
        try {
            validate_dag(cyc);
        } catch (const ValidationError& e) {
            CHECK(e.kind == ValidationError::Kind::CyclicGraph);
        }
    }

    SUBCASE("edge to an unknown task id") {
        auto bad = make_workflow("w3", {{"a", 10, {}, {}}}, {});
        bad.tasks[0].successors.push_back("ghost");
        try {
            validate_dag(bad);
            CHECK(false);
        } catch (const ValidationError& e) {
            CHECK(e.kind == ValidationError::Kind::DanglingEdge);
        }
    }

    SUBCASE("consuming an undeclared item") {
        auto bad = make_workflow("w4", {{"a", 10, {}, {}}}, {});
        bad.tasks[0].inputs.push_back("ghost-data");
        try {
            validate_dag(bad);
            CHECK(false);
        } catch (const ValidationError& e) {
            CHECK(e.kind == ValidationError::Kind::OrphanDataItem);
        }
    }

    SUBCASE("non-positive sizes are rejected") {
        auto bad = make_workflow("w5", {{"a", 0, {}, {}}}, {});
        CHECK_THROWS_AS(validate_dag(bad), ValidationError);
    }
}
