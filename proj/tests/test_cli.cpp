#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "blicket");
    std::vector<const char *> argv;
    for (const auto &a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = blicket::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::size_t count_lines(const std::string &s) {
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

std::string slurp(const std::filesystem::path &p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    std::filesystem::path path;
    TempDir() : path(std::filesystem::temp_directory_path() / "blicket_cli_test") {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("simulate writes JSONL logs") {
    const auto r = run({"simulate", "--model", "random", "--experiment", "2", "--condition", "conj",
                        "--seed", "1"});
    CHECK(r.code == 0);
    CHECK(count_lines(r.out) == 32);
    CHECK(run({"simulate", "--model", "random", "--experiment", "2", "--condition", "conj",
               "--seed", "1"})
              .out == r.out);
    const auto all = run({"simulate", "--model", "fixed-form", "--seed", "2"});
    CHECK(all.code == 0);
    CHECK(count_lines(all.out) == 6 * 32);
    const auto exp1 = run({"simulate", "--model", "random", "--experiment", "1", "--condition",
                           "long-conj-diff", "--cap", "5"});
    CHECK(count_lines(exp1.out) == 15);
}

TEST_CASE("usage errors exit with 1") {
    CHECK(run({}).code == 1);
    CHECK(run({"simulate", "--model", "oracle"}).code == 1);
    CHECK(run({"simulate", "--condition", "nope"}).code == 1);
    CHECK(run({"simulate", "--experiment", "3"}).code == 1);
    CHECK(run({"simulate", "--model", "hbm", "--w", "2"}).code == 1);
    CHECK(run({"score"}).code == 1);
    CHECK(run({"simulate", "--format", "xml"}).code == 1);
    const auto r = run({"simulate", "--model", "oracle"});
    CHECK(r.err.find("Usage") != std::string::npos);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("data errors exit with 2") {
    TempDir dir;
    const auto bad = dir.path / "bad.jsonl";
    std::ofstream(bad) << R"({"participant_id":"p","condition_id":"conj","task_role":"transfer","trial":1,"intervention":[9],"outcome":0})"
                       << "\n";
    const auto r = run({"score", "--logs", bad.string(), "--model", "random"});
    CHECK(r.code == 2);
    CHECK(r.err.find("line 1") != std::string::npos);
    CHECK(run({"score", "--logs", (dir.path / "missing.jsonl").string()}).code == 2);
}

TEST_CASE("score, compare and recover outputs") {
    TempDir dir;
    const auto logs = dir.path / "synth.jsonl";
    REQUIRE(run({"simulate", "--model", "hbm", "--condition", "disj", "--n", "4", "--seed", "3",
                 "--out", logs.string()})
                .code == 0);
    CHECK(std::filesystem::exists(dir.path / "synth.jsonl.manifest.json"));

    const auto csv = dir.path / "scores.csv";
    REQUIRE(run({"score", "--logs", logs.string(), "--model", "hbm", "--prior", "2", "--out",
                 csv.string()})
                .code == 0);
    const auto table = slurp(csv);
    CHECK(table.rfind("model,prior_index,t,w,fold,unit", 0) == 0);
    CHECK(count_lines(table) == 1 + 4 * 60);
    const auto manifest = nlohmann::json::parse(slurp(dir.path / "scores.csv.manifest.json"));
    CHECK(manifest.at("command") == "score");
    CHECK(manifest.at("config").at("prior") == 2);

    const auto one = run({"score", "--logs", logs.string(), "--model", "structure-only-eig",
                          "--prior", "1", "--t", "0.1", "--format", "json"});
    REQUIRE(one.code == 0);
    const auto rows = nlohmann::json::parse(one.out).at("rows");
    CHECK(rows.size() == 4);
    CHECK(rows[0].at("w") == 0.0);

    const auto cmp = run({"compare", "--experiment", "2", "--logs", logs.string(), "--seed", "7"});
    REQUIRE(cmp.code == 0);
    const auto j = nlohmann::json::parse(cmp.out);
    CHECK(j.contains("best_model_counts"));
    CHECK(j.at("manifest").at("fold_plan").at("stratified") == true);
    CHECK(run({"compare", "--experiment", "2", "--logs", logs.string(), "--seed", "7"}).out ==
          cmp.out);

    const auto rec = run({"recover", "--condition", "disj", "--n", "1", "--seed", "2", "--format",
                          "csv"});
    REQUIRE(rec.code == 0);
    CHECK(count_lines(rec.out) == 6);
}
