#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#ifndef CELLFIT_CLI_PATH
#error "CELLFIT_CLI_PATH must point at the built command-line binary"
#endif

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output; // stdout and stderr combined
};

const fs::path& work_dir() {
    static const fs::path dir = [] {
        std::random_device rd;
        const fs::path d =
            fs::temp_directory_path() / ("cellfit_cli_test_" + std::to_string(rd()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

fs::path wpath(const std::string& name) { return work_dir() / name; }

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << text;
}

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path capture = wpath("capture_" + std::to_string(counter++) + ".log");
    const std::string cmd =
        std::string(CELLFIT_CLI_PATH) + " " + args + " > " + capture.string() + " 2>&1";
    const int raw = std::system(cmd.c_str());
    RunResult result;
    REQUIRE(raw != -1);
    result.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    result.output = read_file(capture);
    return result;
}

int count_lines(const std::string& text) {
    int n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

// shared fixtures produced once and reused across cases
const fs::path& xor_train_csv() {
    static const fs::path path = [] {
        const fs::path p = wpath("xor_train.csv");
        const auto r = run_cli("synth --preset xor --n 4000 --seed 7 --out " + p.string());
        REQUIRE(r.exit_code == 0);
        return p;
    }();
    return path;
}

const fs::path& xor_test_csv() {
    static const fs::path path = [] {
        const fs::path p = wpath("xor_test.csv");
        const auto r = run_cli("synth --preset xor --n 2000 --seed 8 --out " + p.string());
        REQUIRE(r.exit_code == 0);
        return p;
    }();
    return path;
}

const fs::path& xor_model_json() {
    static const fs::path path = [] {
        const fs::path p = wpath("xor_model.json");
        const auto r = run_cli("train --input " + xor_train_csv().string() +
                               " --pool constant,constant --gamma 3 --alpha 1.0 --seed 11" +
                               " --out " + p.string());
        REQUIRE(r.exit_code == 0);
        REQUIRE(r.output.find("trained") != std::string::npos);
        return p;
    }();
    return path;
}

} // namespace

TEST_CASE("version flag reports the library version") {
    const auto r = run_cli("--version");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("0.1.0") != std::string::npos);
}

TEST_CASE("synthetic sampling writes the requested number of rows") {
    const fs::path out = wpath("synth_check.csv");
    const auto r = run_cli("synth --preset checkerboard --n 50 --seed 3 --out " + out.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("wrote 50 rows") != std::string::npos);
    const std::string text = read_file(out);
    CHECK(count_lines(text) == 51); // header + 50 rows
    CHECK(text.rfind("x1,x2,label", 0) == 0);
}

TEST_CASE("training then evaluating recovers the planted structure") {
    const fs::path report = wpath("xor_eval.json");
    const auto r = run_cli("evaluate --model " + xor_model_json().string() + " --input " +
                           xor_test_csv().string() + " --out " + report.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("level  selected  correct  realized") != std::string::npos);

    const auto parsed = nlohmann::json::parse(read_file(report));
    CHECK(parsed.at("n").get<int>() == 2000);
    // doubles are serialized as shortest round-trip strings
    CHECK(std::stod(parsed.at("accuracy").get<std::string>()) >= 0.9);
    CHECK(parsed.at("cells").size() == 4); // four quadrants
}

TEST_CASE("prediction emits one scored row per input row") {
    const fs::path out = wpath("xor_pred.csv");
    const auto r = run_cli("predict --model " + xor_model_json().string() + " --input " +
                           xor_test_csv().string() + " --out " + out.string());
    CHECK(r.exit_code == 0);
    const std::string text = read_file(out);
    CHECK(text.rfind("row,proba,class", 0) == 0);
    CHECK(count_lines(text) == 2001);

    // probabilities parse and classes are thresholded consistently
    std::istringstream lines(text);
    std::string line;
    std::getline(lines, line); // header
    int checked = 0;
    while (std::getline(lines, line) && checked < 100) {
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        const double p = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
        const int cls = std::stoi(line.substr(c2 + 1));
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        CHECK(cls == (p >= 0.5 ? 1 : 0));
        ++checked;
    }
    CHECK(checked == 100);
}

TEST_CASE("identical seeds reproduce byte-identical artifacts") {
    const fs::path m1 = wpath("det_model_1.json");
    const fs::path m2 = wpath("det_model_2.json");
    const std::string flags = "train --input " + xor_train_csv().string() +
                              " --pool constant,constant --gamma 3 --alpha 1.0 --seed 11 --out ";
    REQUIRE(run_cli(flags + m1.string()).exit_code == 0);
    REQUIRE(run_cli(flags + m2.string()).exit_code == 0);
    CHECK(read_file(m1) == read_file(m2));
    CHECK(read_file(m1) == read_file(xor_model_json()));
}

TEST_CASE("refinement traces stream one decision per line") {
    const fs::path model = wpath("traced_model.json");
    const fs::path trace = wpath("trace.jsonl");
    const auto r = run_cli("train --input " + xor_train_csv().string() +
                           " --pool constant,constant --gamma 3 --alpha 1.0 --seed 11 --out " +
                           model.string() + " --trace " + trace.string());
    CHECK(r.exit_code == 0);

    // the traced run must produce the same model as the untraced one
    CHECK(read_file(model) == read_file(xor_model_json()));

    std::istringstream lines(read_file(trace));
    std::string line;
    int steps = 0;
    int splits = 0;
    double last_after = -1.0;
    while (std::getline(lines, line)) {
        REQUIRE_FALSE(line.empty());
        const auto js = nlohmann::json::parse(line); // every line is standalone JSON
        CHECK(js.contains("cell"));
        CHECK(js.contains("candidates"));
        CHECK(js.contains("children"));
        const std::string action = js.at("action").get<std::string>();
        CHECK((action == "split" || action == "keep"));
        const double before = std::stod(js.at("objective_before").get<std::string>());
        const double after = std::stod(js.at("objective_after").get<std::string>());
        if (action == "split") {
            CHECK(after < before);
            CHECK(js.at("children").size() >= 2);
            ++splits;
        } else {
            CHECK(after == before);
            CHECK(js.at("children").empty());
        }
        if (steps > 0) CHECK(before == last_after);
        last_after = after;
        ++steps;
    }
    CHECK(steps >= 2);
    CHECK(splits >= 1);
}

TEST_CASE("benchmark renders the comparison table against every baseline") {
    const fs::path train_csv = wpath("cb_train.csv");
    const fs::path test_csv = wpath("cb_test.csv");
    REQUIRE(run_cli("synth --preset checkerboard --n 800 --seed 21 --out " + train_csv.string())
                .exit_code == 0);
    REQUIRE(run_cli("synth --preset checkerboard --n 500 --seed 22 --out " + test_csv.string())
                .exit_code == 0);

    const fs::path out = wpath("bench.json");
    const auto r = run_cli("benchmark --input " + train_csv.string() + " --test " +
                           test_csv.string() +
                           " --pool constant,tree --alpha 0.3 --seed 3 --s-min 25 --v-min 12" +
                           " --out " + out.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("== confident counts ==") != std::string::npos);
    CHECK(r.output.find("== accuracy among confident ==") != std::string::npos);
    CHECK(r.output.find("== losses ==") != std::string::npos);
    CHECK(r.output.find("cellfit") != std::string::npos);

    const auto parsed = nlohmann::json::parse(read_file(out));
    REQUIRE(parsed.at("rows").size() == 6); // the model plus five baselines
    CHECK(parsed.at("rows")[0].at("method") == "cellfit");
    CHECK(parsed.at("levels").size() == 4); // default confidence ladder
    for (const auto& row : parsed.at("rows")) {
        REQUIRE(row.at("confidence").size() == 4);
        // confident counts cannot grow as the threshold rises
        int prev = INT32_MAX;
        for (const auto& c : row.at("confidence")) {
            const int sel = c.at("selected").get<int>();
            CHECK(sel <= prev);
            prev = sel;
        }
    }
}

TEST_CASE("the leaf-cap sweep prints one row per cap") {
    const fs::path out = wpath("tradeoff.json");
    const auto r = run_cli("tradeoff --input " + xor_train_csv().string() + " --test " +
                           xor_test_csv().string() +
                           " --pool constant,constant --gamma 3 --alpha 1.0 --seed 11" +
                           " --leaves 1,2,4 --out " + out.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("max_leaves") != std::string::npos);
    const auto parsed = nlohmann::json::parse(read_file(out));
    REQUIRE(parsed.at("rows").size() == 3);
    CHECK(parsed.at("rows")[0].at("max_leaves").get<int>() == 1);
    CHECK(parsed.at("rows")[0].at("cells").get<int>() == 1);
}

TEST_CASE("data preparation imputes gaps and reports dropped columns") {
    // column "leaky" is missing in 60% of rows and must be dropped;
    // column "patchy" has one gap to fill
    std::string csv = "keep,patchy,leaky,label\n";
    for (int i = 0; i < 10; ++i) {
        const std::string patchy = i == 4 ? "" : std::to_string(i * 1.5);
        const std::string leaky = i < 6 ? "NA" : "1.0";
        csv += std::to_string(i) + "," + patchy + "," + leaky + "," +
               (i % 2 ? "1" : "0") + "\n";
    }
    const fs::path in = wpath("prep_in.csv");
    write_file(in, csv);

    const fs::path out = wpath("prep_out.csv");
    const fs::path report = wpath("prep_report.json");
    const auto r = run_cli("prep --input " + in.string() + " --out " + out.string() +
                           " --impute knn --knn-k 3 --missing-threshold 0.5 --report " +
                           report.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("dropped column 'leaky'") != std::string::npos);

    const auto rep = nlohmann::json::parse(read_file(report));
    REQUIRE(rep.at("dropped").size() == 1);
    CHECK(rep.at("dropped")[0].at("name") == "leaky");
    CHECK(std::stod(rep.at("dropped")[0].at("missing_fraction").get<std::string>()) ==
          doctest::Approx(0.6));
    CHECK(rep.at("kept").size() == 2);

    const std::string cleaned = read_file(out);
    CHECK(cleaned.rfind("keep,patchy,label", 0) == 0);
    CHECK(cleaned.find("NA") == std::string::npos);
    CHECK(cleaned.find(",,") == std::string::npos); // the gap was filled
    CHECK(count_lines(cleaned) == 11);
}

TEST_CASE("standardization through the prep pipeline centers numerics") {
    std::string csv = "v,label\n";
    for (int i = 0; i < 8; ++i)
        csv += std::to_string(10.0 + i) + "," + (i % 2 ? "1" : "0") + "\n";
    const fs::path in = wpath("std_in.csv");
    write_file(in, csv);
    const fs::path out = wpath("std_out.csv");
    const auto r = run_cli("prep --input " + in.string() + " --out " + out.string() +
                           " --standardize");
    CHECK(r.exit_code == 0);

    // the transformed column must average to zero
    std::istringstream lines(read_file(out));
    std::string line;
    std::getline(lines, line);
    double sum = 0.0;
    int n = 0;
    while (std::getline(lines, line)) {
        sum += std::stod(line.substr(0, line.find(',')));
        ++n;
    }
    CHECK(n == 8);
    CHECK(sum == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("stable matching from a score table") {
    const fs::path scores = wpath("scores.csv");
    write_file(scores, "recipient,d_alpha,d_beta\nr1,0.9,0.2\nr2,0.3,0.8\n");
    const auto r = run_cli("match --scores " + scores.string());
    CHECK(r.exit_code == 0);
    const auto parsed = nlohmann::json::parse(r.output);
    REQUIRE(parsed.at("assignments").size() == 2);
    CHECK(parsed.at("assignments")[0].at("recipient") == "r1");
    CHECK(parsed.at("assignments")[0].at("donor") == "d_alpha");
    CHECK(parsed.at("assignments")[1].at("recipient") == "r2");
    CHECK(parsed.at("assignments")[1].at("donor") == "d_beta");
    CHECK(parsed.at("stable").get<bool>());
    CHECK(parsed.at("unmatched").empty());

    // capacity widening lets one donor take both recipients
    const fs::path out = wpath("match.json");
    const auto r2 = run_cli("match --scores " + scores.string() + " --capacity 2,2 --out " +
                            out.string());
    CHECK(r2.exit_code == 0);
    CHECK(r2.output.find("matched 2 of 2") != std::string::npos);
    const auto parsed2 = nlohmann::json::parse(read_file(out));
    CHECK(parsed2.at("assignments").size() == 2);
}

TEST_CASE("feature relevance report lands beside the evaluation") {
    const fs::path features_json = wpath("features.json");
    const auto r = run_cli("evaluate --model " + xor_model_json().string() + " --input " +
                           xor_test_csv().string() + " --features " + features_json.string());
    CHECK(r.exit_code == 0);
    const auto parsed = nlohmann::json::parse(read_file(features_json));
    CHECK(parsed.contains("global"));
    CHECK(parsed.at("cells").size() == 4);

    const fs::path features_txt = wpath("features.txt");
    const auto r2 = run_cli("evaluate --model " + xor_model_json().string() + " --input " +
                            xor_test_csv().string() + " --features " + features_txt.string());
    CHECK(r2.exit_code == 0);
    // a .txt destination gets the plain-text rendering, not JSON
    const auto not_json = nlohmann::json::parse(read_file(features_txt), nullptr, false);
    CHECK(not_json.is_discarded());
}

TEST_CASE("IO failures exit with code 2") {
    const auto r = run_cli("train --input " + wpath("no_such_file.csv").string() + " --out " +
                           wpath("never.json").string());
    CHECK(r.exit_code == 2);

    const auto r2 = run_cli("evaluate --model " + wpath("no_such_model.json").string() +
                            " --input " + xor_test_csv().string());
    CHECK(r2.exit_code == 2);
}

TEST_CASE("configuration mistakes exit with code 3") {
    const auto bad_loss = run_cli("train --input " + xor_train_csv().string() +
                                  " --loss banana --out " + wpath("never2.json").string());
    CHECK(bad_loss.exit_code == 3);

    const auto bad_flag = run_cli("train --input " + xor_train_csv().string() +
                                  " --wat 7 --out " + wpath("never3.json").string());
    CHECK(bad_flag.exit_code == 3);

    const auto bad_gamma = run_cli("train --input " + xor_train_csv().string() +
                                   " --gamma 9 --out " + wpath("never4.json").string());
    CHECK(bad_gamma.exit_code == 3);

    const auto no_sub = run_cli("");
    CHECK(no_sub.exit_code == 3);
}

TEST_CASE("infeasible training data exits with code 4") {
    std::string csv = "x1,label\n";
    for (int i = 0; i < 10; ++i) csv += std::to_string(i) + "," + (i % 2 ? "1" : "0") + "\n";
    const fs::path tiny = wpath("tiny.csv");
    write_file(tiny, csv);
    // ten rows cannot satisfy the default 50 + 25 per-cell minima
    const auto r = run_cli("train --input " + tiny.string() + " --out " +
                           wpath("never5.json").string());
    CHECK(r.exit_code == 4);
    CHECK(r.output.find("s_min + v_min") != std::string::npos);
}

TEST_CASE("a model from a newer format is refused with both versions named") {
    const std::string original = read_file(xor_model_json());
    auto doc = nlohmann::json::parse(original);
    doc["format_version"] = 42;
    const fs::path future = wpath("future_model.json");
    write_file(future, doc.dump());

    const auto r = run_cli("evaluate --model " + future.string() + " --input " +
                           xor_test_csv().string());
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("42") != std::string::npos);
    CHECK(r.output.find("1") != std::string::npos);
}
