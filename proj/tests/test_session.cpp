#include "doctest.h"

#include <httplib.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "blicket/evaluation.hpp"
#include "blicket/log_io.hpp"
#include "blicket/session.hpp"

using namespace blicket;

namespace {

SessionOptions options(const std::string &condition, std::uint64_t seed,
                       std::optional<AgentSpec> lens = std::nullopt) {
    SessionOptions o;
    o.condition_id = condition;
    o.seed = seed;
    o.lens = lens;
    return o;
}

int status_of(const std::function<void()> &f) {
    try {
        f();
    } catch (const SessionError &e) {
        return e.status();
    }
    return 200;
}

// A server on an ephemeral loopback port for the lifetime of the fixture.
struct LiveServer {
    SessionManager manager;
    httplib::Server server;
    int port = 0;
    std::thread thread;

    LiveServer() {
        register_routes(server, manager);
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~LiveServer() {
        server.stop();
        thread.join();
    }
};

}  // namespace

TEST_CASE("interventions follow the machine and the limits") {
    SessionManager m;
    const auto id = m.create(options("conj", 1));
    // Block 0 is a blicket; one blicket never fires a conjunctive machine.
    const auto r = m.intervene(id, {0});
    CHECK_FALSE(r.activated);
    CHECK(r.trial == 1);
    CHECK(r.remaining == 11);
    CHECK(r.role == TaskRole::Training1);

    CHECK(status_of([&] { m.intervene(id, {3}); }) == 400);
    CHECK(status_of([&] { m.intervene(id, {1, 1}); }) == 400);
    CHECK(status_of([&] { m.intervene("s999999", {0}); }) == 404);
    CHECK(status_of([&] { m.beliefs(id); }) == 400);
    CHECK(status_of([&] { m.create(options("nope", 1)); }) == 400);

    for (int i = 1; i < 12; ++i) m.intervene(id, {});
    // The training limit advances to the transfer task automatically.
    const auto first_transfer = m.intervene(id, {0, 1});
    CHECK(first_transfer.task_index == 1);
    CHECK(first_transfer.trial == 1);
    CHECK(first_transfer.activated);
    InterventionResult last;
    for (int i = 1; i < 20; ++i) last = m.intervene(id, {i % 6});
    CHECK(last.session_complete);
    CHECK(status_of([&] { m.intervene(id, {0}); }) == 409);
    CHECK(status_of([&] { m.next_task(id); }) == 409);

    const auto done = m.finish(id);
    CHECK(done.log.tasks.size() == 2);
    CHECK_FALSE(done.ground_truth);
    CHECK(status_of([&] { m.finish(id); }) == 404);

    std::istringstream in(done.jsonl);
    const auto back = ingest(in);
    REQUIRE(back.logs.size() == 1);
    CHECK(back.logs[0] == done.log);
    const auto c = *find_condition("conj");
    CHECK(predictive_likelihood(make_spec(AgentKind::HBM, 1, {0.5, 1.0}), back.logs[0], c, 1).size() ==
          20);
}

TEST_CASE("seeded sessions replay identically") {
    SessionManager m;
    auto play = [&](std::uint64_t seed) {
        const auto id = m.create(options("noisy-conj", seed));
        std::vector<int> outcomes;
        for (int i = 0; i < 12; ++i) outcomes.push_back(m.intervene(id, {0, 1}).activated);
        return outcomes;
    };
    CHECK(play(5) == play(5));
    const auto description = m.describe(m.create(options("noisy-conj", 5)));
    CHECK(description.dump().find("blickets") == std::string::npos);
}

TEST_CASE("lens beliefs equal an offline replay") {
    SessionManager m;
    const auto spec = make_spec(AgentKind::HBM, 3, {0.4, 1.0});
    const auto id = m.create(options("conj", 2, spec));
    const auto fresh = m.beliefs(id, 3);
    for (double p : fresh.blicket_probability) CHECK(p == doctest::Approx(0.5));
    CHECK(fresh.suggestions.size() == 3);
    CHECK(fresh.form_marginal.size() == 400);

    AgentState offline = init_agent(spec, 3);
    const std::vector<std::vector<int>> plays{{0}, {1, 2}, {0, 1}, {}, {2}};
    for (const auto &blocks : plays) {
        const auto r = m.intervene(id, blocks);
        offline = observe(offline, {BlockSet::from_indices(blocks), r.activated});
    }
    const auto view = m.beliefs(id, 8);
    for (int b = 0; b < 3; ++b) {
        CHECK(std::abs(view.blicket_probability[b] - blicket_probability(*offline.belief, b)) < 1e-12);
    }
    const auto fm = form_marginal(*offline.belief);
    for (std::size_t f = 0; f < fm.size(); ++f) {
        REQUIRE(std::abs(view.form_marginal.weights[f] - fm.weights[f]) < 1e-12);
    }
    const auto combined = eig_table(*offline.belief).combined(0.4);
    for (std::size_t i = 0; i < view.suggestions.size(); ++i) {
        CHECK(view.suggestions[i].combined_eig == combined[view.suggestions[i].intervention.bits]);
        if (i > 0) CHECK(view.suggestions[i].combined_eig <= view.suggestions[i - 1].combined_eig);
    }

    // Moving to the transfer task resets structures and carries forms.
    m.next_task(id);
    offline = begin_task(offline, 6);
    const auto transfer = m.beliefs(id);
    CHECK(transfer.task_index == 1);
    CHECK(transfer.blicket_probability.size() == 6);
    for (double p : transfer.blicket_probability) CHECK(p == doctest::Approx(0.5));
    const auto carried = form_marginal(*offline.belief);
    for (std::size_t f = 0; f < carried.size(); ++f) {
        REQUIRE(std::abs(transfer.form_marginal.weights[f] - carried.weights[f]) < 1e-12);
    }
}

TEST_CASE("checkpoints are written per intervention") {
    const auto dir = std::filesystem::temp_directory_path() / "blicket_session_ckpt";
    std::filesystem::remove_all(dir);
    SessionManager m(dir);
    const auto id = m.create(options("disj", 3));
    m.intervene(id, {0});
    m.intervene(id, {1});
    std::ifstream in(dir / (id + ".jsonl"));
    const auto logs = ingest(in);
    REQUIRE(logs.logs.size() == 1);
    CHECK(logs.logs[0].tasks[0].events.size() == 2);
    std::filesystem::remove_all(dir);
}

TEST_CASE("HTTP surface") {
    LiveServer live;
    httplib::Client cli("127.0.0.1", live.port);

    auto created = cli.Post("/sessions",
                            R"({"condition_id":"conj","seed":4,"reveal":true,)"
                            R"("lens":{"model":"hbm","prior":2,"w":0.5,"t":1.0}})",
                            "application/json");
    REQUIRE(created);
    CHECK(created->status == 201);
    const auto session = nlohmann::json::parse(created->body);
    const std::string id = session.at("session_id");
    CHECK(session.at("tasks").size() == 2);
    CHECK(session.dump().find("blickets") == std::string::npos);

    const std::string base = "/sessions/" + id;
    auto beliefs = cli.Get(base + "/beliefs?k=4");
    REQUIRE(beliefs);
    CHECK(beliefs->status == 200);
    const auto b = nlohmann::json::parse(beliefs->body);
    CHECK(b.at("suggestions").size() == 4);
    CHECK(b.at("form_marginal").at("forms").size() == 400);
    for (const auto &p : b.at("blicket_probability")) CHECK(p.get<double>() == doctest::Approx(0.5));

    auto step = cli.Post(base + "/interventions", R"({"intervention":[0]})", "application/json");
    REQUIRE(step);
    CHECK(step->status == 200);
    const auto s = nlohmann::json::parse(step->body);
    CHECK(s.at("outcome") == 0);
    CHECK(s.at("trial") == 1);
    CHECK(s.at("remaining") == 11);

    CHECK(cli.Post(base + "/interventions", R"({"intervention":[7]})", "application/json")->status ==
          400);
    CHECK(cli.Post(base + "/interventions", "{bad json", "application/json")->status == 400);
    CHECK(cli.Post("/sessions/s424242/interventions", R"({"intervention":[0]})",
                   "application/json")->status == 404);
    CHECK(cli.Post("/sessions", R"({"condition_id":"missing"})", "application/json")->status == 400);

    CHECK(cli.Post(base + "/next-task", "", "application/json")->status == 200);
    for (int i = 0; i < 20; ++i) {
        REQUIRE(cli.Post(base + "/interventions", R"({"intervention":[0,1]})", "application/json")
                    ->status == 200);
    }
    CHECK(cli.Post(base + "/interventions", R"({"intervention":[0]})", "application/json")->status ==
          409);

    auto fin = cli.Post(base + "/finish", "", "application/json");
    REQUIRE(fin);
    CHECK(fin->status == 200);
    const auto f = nlohmann::json::parse(fin->body);
    CHECK(f.at("ground_truth").size() == 2);
    std::istringstream in(f.at("log").get<std::string>());
    const auto logs = ingest(in);
    REQUIRE(logs.logs.size() == 1);
    CHECK(logs.logs[0].tasks[0].events.size() == 1);
    CHECK(logs.logs[0].tasks[1].events.size() == 20);
    CHECK(cli.Get(base)->status == 404);

    auto no_lens = cli.Post("/sessions", R"({"condition_id":"disj"})", "application/json");
    const std::string other = nlohmann::json::parse(no_lens->body).at("session_id");
    CHECK(cli.Get("/sessions/" + other + "/beliefs")->status == 400);
}
