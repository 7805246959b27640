#include "doctest.h"

#include <numeric>
#include <set>

#include "blicket/tasks.hpp"

using namespace blicket;

TEST_CASE("experiment 2 conditions") {
    const auto conds = exp2_conditions();
    REQUIRE(conds.size() == 6);
    const char *ids[] = {"disj", "noisy-disj", "conj", "noisy-conj", "3conj", "noisy-3conj"};
    const int blickets[] = {1, 1, 2, 2, 3, 3};
    for (std::size_t i = 0; i < conds.size(); ++i) {
        const auto &c = conds[i];
        CHECK(c.id == ids[i]);
        CHECK(c.experiment == Experiment::Two);
        REQUIRE(c.tasks.size() == 2);
        CHECK(c.tasks[0].role == TaskRole::Training1);
        CHECK(c.tasks[0].n_blocks == 3);
        CHECK(c.tasks[0].blickets.size() == blickets[i]);
        CHECK(c.tasks[0].intervention_limit == 12);
        CHECK(c.tasks[0].form == canonical_form(kCanonicalNames[i]));
        const auto &t = c.transfer_task();
        CHECK(t.role == TaskRole::Transfer);
        CHECK(t.n_blocks == 6);
        CHECK(t.blickets.size() == 3);
        CHECK(t.intervention_limit == 20);
        CHECK(t.form_name == CanonicalName::Conjunctive);
    }
    CHECK(conds[4].tasks[0].blickets.bits == 0b111u);
}

TEST_CASE("experiment 1 conditions") {
    const auto conds = exp1_conditions();
    REQUIRE(conds.size() == 8);
    std::set<std::string> ids;
    for (const auto &c : conds) {
        ids.insert(c.id);
        const bool is_long = c.id.rfind("long", 0) == 0;
        const bool transfer_conj = c.id.find("-conj-") != std::string::npos;
        const bool same = c.id.find("-same") != std::string::npos;
        REQUIRE(c.tasks.size() == (is_long ? 3u : 2u));
        const auto train_form = same == transfer_conj ? CanonicalName::Conjunctive
                                                      : CanonicalName::Disjunctive;
        CHECK(c.tasks[0].n_blocks == 3);
        CHECK(c.tasks[0].form_name == train_form);
        CHECK(c.tasks[0].blickets.size() == (train_form == CanonicalName::Conjunctive ? 2 : 1));
        if (is_long) {
            CHECK(c.tasks[1].role == TaskRole::Training2);
            CHECK(c.tasks[1].n_blocks == 6);
            CHECK(c.tasks[1].blickets.size() == 3);
            CHECK(c.tasks[1].form_name == train_form);
        }
        CHECK(c.transfer_task().n_blocks == 9);
        CHECK(c.transfer_task().blickets.size() == 4);
        CHECK(c.transfer_task().form_name ==
              (transfer_conj ? CanonicalName::Conjunctive : CanonicalName::Disjunctive));
        for (const auto &t : c.tasks) CHECK(t.intervention_limit == kExp1DefaultCap);
    }
    CHECK(ids.size() == 8);
    const auto lds = find_condition("long-disj-same");
    REQUIRE(lds);
    for (const auto &t : lds->tasks) CHECK(t.form_name == CanonicalName::Disjunctive);
    CHECK(exp1_conditions(17)[0].tasks[0].intervention_limit == 17);
    CHECK_FALSE(find_condition("nope"));
}

TEST_CASE("machine response") {
    const auto c = *find_condition("conj");
    const auto &transfer = c.transfer_task();
    Rng rng(1);
    int fired = 0;
    for (int i = 0; i < 1000; ++i) fired += machine_response(transfer, BlockSet{0b011}, rng);
    CHECK(fired >= 999);
    CHECK(activation_probability(transfer.form, 1) <= 1e-3);

    TaskConfig noisy = make_task(3, 2, CanonicalName::NoisyConjunctive, 12, TaskRole::Training1);
    Rng mc(2);
    int on = 0;
    for (int i = 0; i < 10000; ++i) on += machine_response(noisy, BlockSet{0b011}, mc);
    CHECK(std::abs(on / 10000.0 - 0.75) < 0.02);
}

TEST_CASE("machine response depends only on the blicket overlap") {
    const TaskConfig t = make_task(6, 3, CanonicalName::NoisyDisjunctive, 20, TaskRole::Transfer);
    for (std::uint32_t q = 0; q < 64; ++q) {
        // Same seed, any intervention with the same overlap → same draw.
        for (std::uint32_t r = 0; r < 64; ++r) {
            if (overlap(BlockSet{q}, t.blickets) != overlap(BlockSet{r}, t.blickets)) continue;
            Rng a(q * 64 + r), b(q * 64 + r);
            REQUIRE(machine_response(t, BlockSet{q}, a) == machine_response(t, BlockSet{r}, b));
        }
    }
}

TEST_CASE("counterbalancing is cosmetic") {
    const auto t = make_task(3, 2, CanonicalName::Conjunctive, 12, TaskRole::Training1);
    Rng a(1), b(2);
    const auto pa = counterbalance(t, a);
    const auto pb = counterbalance(t, b);
    CHECK(pa.letters == std::vector<std::string>{"A", "B", "C"});
    CHECK(pb.letters == pa.letters);
    std::vector<int> sorted = pa.block_at_slot;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<int>{0, 1, 2});
    bool differs = pa.colors != pb.colors || pa.block_at_slot != pb.block_at_slot;
    for (std::uint64_t s = 3; !differs && s < 20; ++s) {
        Rng r(s);
        const auto p = counterbalance(t, r);
        differs = p.colors != pa.colors || p.block_at_slot != pa.block_at_slot;
    }
    CHECK(differs);
    CHECK(t.blickets.bits == 0b011u);
}

TEST_CASE("task and condition JSON round trip") {
    for (const auto exp : {Experiment::One, Experiment::Two}) {
        for (const auto &c : conditions(exp)) {
            const auto back = condition_from_json(to_json(c));
            CHECK(back.id == c.id);
            CHECK(back.experiment == c.experiment);
            REQUIRE(back.tasks.size() == c.tasks.size());
            for (std::size_t i = 0; i < c.tasks.size(); ++i) {
                CHECK(back.tasks[i].n_blocks == c.tasks[i].n_blocks);
                CHECK(back.tasks[i].blickets == c.tasks[i].blickets);
                CHECK(back.tasks[i].form == c.tasks[i].form);
                CHECK(back.tasks[i].form_name == c.tasks[i].form_name);
                CHECK(back.tasks[i].intervention_limit == c.tasks[i].intervention_limit);
                CHECK(back.tasks[i].role == c.tasks[i].role);
            }
        }
    }
    const auto custom = task_from_json(nlohmann::json::parse(
        R"({"role":"transfer","n_blocks":4,"blickets":[1,3],"form":{"bias":1.2,"gain":7},"limit":9})"));
    CHECK(custom.blickets.bits == 0b1010u);
    CHECK(custom.form == SigmoidForm{1.2, 7});
    CHECK_FALSE(custom.form_name);
    CHECK_THROWS(task_from_json(nlohmann::json::parse(
        R"({"role":"transfer","n_blocks":4,"blickets":[5],"form":{"name":"Conjunctive"},"limit":9})")));
    CHECK_THROWS(task_from_json(nlohmann::json::parse(
        R"({"role":"transfer","n_blocks":4,"blickets":[1],"form":{"name":"Wobbly"},"limit":9})")));
}
