#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

// End-to-end checks of the installed binary: flags, exit codes, file formats
// and byte determinism. The binary path arrives via MOTORMAP_CLI.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "motormap/dataset.hpp"
#include "motormap/metrics.hpp"

using namespace motormap;
namespace fs = std::filesystem;

namespace {

std::string cli_path() {
    const char* env = std::getenv("MOTORMAP_CLI");
    REQUIRE_MESSAGE(env != nullptr, "MOTORMAP_CLI must point at the motormap binary");
    return env;
}

fs::path work_dir() {
    const fs::path dir = fs::temp_directory_path() / "motormap_test_cli";
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

RunResult run(const std::string& args, const fs::path& dir) {
    const fs::path out_file = dir / "_stdout.txt";
    const fs::path err_file = dir / "_stderr.txt";
    const std::string cmd = cli_path() + " " + args + " > " + out_file.string() + " 2> " + err_file.string();
    const int status = std::system(cmd.c_str());
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    RunResult res;
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    res.out = slurp(out_file);
    res.err = slurp(err_file);
    return res;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t count_lines(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++n;
    return n;
}

std::size_t count_occurrences(const std::string& hay, const std::string& needle) {
    std::size_t n = 0, pos = 0;
    while ((pos = hay.find(needle, pos)) != std::string::npos) {
        ++n;
        pos += needle.size();
    }
    return n;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

} // namespace

TEST_CASE("generate: default run writes the 13-objective set and the ratio") {
    const auto dir = work_dir();
    const auto csv = dir / "cands.csv";
    const RunResult res = run("generate --output " + csv.string() + " --seed 42", dir);
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("preservation ratio") != std::string::npos);
    REQUIRE(fs::exists(csv));
    REQUIRE(fs::exists(dir / "cands.csv.meta"));

    const CandidateSet set = load_candidates(csv.string());
    CHECK(set.objectives.cols() == 13);
    CHECK(set.params.cols() == 7);
    CHECK(set.size() >= 20);
    CHECK(set.size() <= 1020);
    CHECK(set.operating_points.size() == 3);
}

TEST_CASE("generate: --single-op A narrows to 5 objectives") {
    const auto dir = work_dir();
    const auto csv = dir / "single.csv";
    const RunResult res = run("generate --output " + csv.string() + " --single-op A --seed 3", dir);
    CHECK(res.exit_code == 0);
    const CandidateSet set = load_candidates(csv.string());
    CHECK(set.objectives.cols() == 5);
    CHECK(set.operating_points.size() == 1);
}

TEST_CASE("generate: zero generations with --keep-infeasible returns the seed population") {
    const auto dir = work_dir();
    const auto csv = dir / "init.csv";
    const RunResult res =
        run("generate --output " + csv.string() + " --generations 0 --keep-infeasible --seed 5", dir);
    CHECK(res.exit_code == 0);
    CHECK(load_candidates(csv.string()).size() == 20);
}

TEST_CASE("embed: pca writes an N x 2 map, byte-identical across runs") {
    const auto dir = work_dir();
    const auto cands = dir / "cands.csv";
    REQUIRE(run("generate --output " + cands.string() + " --single-op A --pop 16 --generations 6 --seed 1", dir)
                .exit_code == 0);
    const auto emb = dir / "emb_pca.csv";
    const std::string cmd = "embed --input " + cands.string() + " --output " + emb.string() + " --method pca";
    REQUIRE(run(cmd, dir).exit_code == 0);
    const std::string first = slurp(emb);
    const CandidateSet original = load_candidates(cands.string());
    const CandidateSet embedded = load_candidates(emb.string());
    CHECK(embedded.size() == original.size());
    CHECK(embedded.objectives.cols() == 2);

    REQUIRE(run(cmd, dir).exit_code == 0);
    CHECK(slurp(emb) == first);
}

TEST_CASE("embed: tsne writes the map, the trace and the sidecar deterministically") {
    const auto dir = work_dir();
    const auto cands = dir / "cands.csv";
    REQUIRE(run("generate --output " + cands.string() + " --single-op A --pop 16 --generations 4 --seed 2", dir)
                .exit_code == 0);
    const auto emb = dir / "map.csv";
    const std::string cmd = "embed --input " + cands.string() + " --output " + emb.string() +
                            " --method tsne --iterations 60 --seed 9";
    REQUIRE(run(cmd, dir).exit_code == 0);
    REQUIRE(fs::exists(dir / "map_trace.csv"));
    REQUIRE(fs::exists(dir / "map.csv.meta"));
    const std::string map1 = slurp(emb);
    const std::string trace1 = slurp(dir / "map_trace.csv");
    CHECK(trace1.rfind("iteration,kl\n", 0) == 0);

    REQUIRE(run(cmd, dir).exit_code == 0);
    CHECK(slurp(emb) == map1);
    CHECK(slurp(dir / "map_trace.csv") == trace1);
}

TEST_CASE("embed: strict isomap on split data exits 2 with DisconnectedGraph") {
    const auto dir = work_dir();
    std::string csv = "id,f1,f2\n";
    for (int i = 0; i < 6; ++i)
        csv += "a" + std::to_string(i) + "," + std::to_string(i * 0.1) + ",0\n";
    for (int i = 0; i < 6; ++i)
        csv += "b" + std::to_string(i) + "," + std::to_string(500.0 + i * 0.1) + ",0\n";
    write_file(dir / "split.csv", csv);
    const RunResult res = run("embed --input " + (dir / "split.csv").string() + " --output " +
                                  (dir / "iso.csv").string() +
                                  " --method isomap --k 3 --connect strict --scale none",
                              dir);
    CHECK(res.exit_code == 2);
    CHECK(res.err.find("DisconnectedGraph") != std::string::npos);
}

TEST_CASE("metrics: identity embedding scores trustworthiness 1") {
    const auto dir = work_dir();
    std::string orig = "id,f1,f2\n";
    std::string emb = "id,y1,y2\n";
    for (int i = 0; i < 25; ++i) {
        const double a = 0.37 * i + 0.11 * (i % 7);
        const double b = 1.7 * ((i * 13) % 11) - 3.0;
        orig += "p" + std::to_string(i) + "," + std::to_string(a) + "," + std::to_string(b) + "\n";
        emb += "p" + std::to_string(i) + "," + std::to_string(a) + "," + std::to_string(b) + "\n";
    }
    write_file(dir / "orig.csv", orig);
    write_file(dir / "emb.csv", emb);
    const auto report = dir / "report.txt";
    const RunResult res = run("metrics --input " + (dir / "orig.csv").string() + " --embedding " +
                                  (dir / "emb.csv").string() + " --output " + report.string() +
                                  " --k 5 --clusters 3 --scale none --seed 1",
                              dir);
    REQUIRE(res.exit_code == 0);
    bool found = false;
    for (const auto& [key, value] : read_key_value_file(report.string()))
        if (key == "trustworthiness") {
            CHECK(std::stod(value) == doctest::Approx(1.0).epsilon(1e-12));
            found = true;
        }
    CHECK(found);
    CHECK(fs::exists(dir / "report.txt.labels.csv"));
}

TEST_CASE("metrics: unknown embedding ids exit 1 with IdMismatch") {
    const auto dir = work_dir();
    write_file(dir / "orig.csv", "id,f1\na,1\nb,2\nc,3\n");
    write_file(dir / "emb.csv", "id,y1,y2\na,0,0\nzz,1,1\n");
    const RunResult res = run("metrics --input " + (dir / "orig.csv").string() + " --embedding " +
                                  (dir / "emb.csv").string() + " --output " + (dir / "r.txt").string() +
                                  " --k 1 --clusters 2",
                              dir);
    CHECK(res.exit_code == 1);
    CHECK(res.err.find("IdMismatch") != std::string::npos);
}

TEST_CASE("plot: one circle per candidate, 3-D input rejected") {
    const auto dir = work_dir();
    write_file(dir / "two.csv", "id,y1,y2\na,0,0\nb,1,1\n");
    const auto svg = dir / "two.svg";
    REQUIRE(run("plot --input " + (dir / "two.csv").string() + " --output " + svg.string(), dir).exit_code == 0);
    const std::string content = slurp(svg);
    CHECK(count_occurrences(content, "<circle") == 2);
    CHECK(content.find("<svg") != std::string::npos);

    write_file(dir / "three.csv", "id,y1,y2,y3\na,0,0,0\nb,1,1,1\n");
    const RunResult bad =
        run("plot --input " + (dir / "three.csv").string() + " --output " + (dir / "bad.svg").string(), dir);
    CHECK(bad.exit_code == 1);
    CHECK(bad.err.find("NotTwoDimensional") != std::string::npos);
}

TEST_CASE("plot: golden bytes for a fixed input and config") {
    const char* golden_env = std::getenv("MOTORMAP_GOLDEN_DIR");
    REQUIRE_MESSAGE(golden_env != nullptr, "MOTORMAP_GOLDEN_DIR must point at tests/golden");
    const fs::path golden = fs::path(golden_env) / "scatter.svg";

    const auto dir = work_dir();
    std::string emb = "id,y1,y2\n";
    for (int i = 0; i < 12; ++i)
        emb += "g" + std::to_string(i) + "," + std::to_string(0.3 * i - 1.0) + "," +
               std::to_string((i * i) % 7 - 3.0) + "\n";
    write_file(dir / "fixed.csv", emb);
    const auto svg = dir / "fixed.svg";
    REQUIRE(run("plot --input " + (dir / "fixed.csv").string() + " --output " + svg.string() +
                    " --width 640 --height 480 --radius 4",
                dir)
                .exit_code == 0);

    if (!fs::exists(golden)) {
        // first run records the golden file
        fs::create_directories(golden.parent_path());
        fs::copy_file(svg, golden);
        MESSAGE("golden file recorded at ", golden.string());
    }
    CHECK(slurp(svg) == slurp(golden));
}

TEST_CASE("pick: cluster counts of 1 and N behave as stated") {
    const auto dir = work_dir();
    const auto cands = dir / "c.csv";
    REQUIRE(run("generate --output " + cands.string() + " --single-op A --pop 12 --generations 2 --seed 4", dir)
                .exit_code == 0);
    const auto emb = dir / "e.csv";
    REQUIRE(run("embed --input " + cands.string() + " --output " + emb.string() + " --method pca", dir)
                .exit_code == 0);

    const std::size_t n = load_candidates(emb.string()).size();

    const auto one = dir / "one.csv";
    REQUIRE(run("pick --input " + cands.string() + " --embedding " + emb.string() + " --output " + one.string() +
                    " --clusters 1 --seed 7",
                dir)
                .exit_code == 0);
    CHECK(count_lines(one) == 2); // header + a single representative

    const auto all = dir / "all.csv";
    REQUIRE(run("pick --input " + cands.string() + " --embedding " + emb.string() + " --output " + all.string() +
                    " --clusters " + std::to_string(n) + " --seed 7",
                dir)
                .exit_code == 0);
    CHECK(count_lines(all) == n + 1);
}

TEST_CASE("pick: matches the scripted module-level pipeline") {
    const auto dir = work_dir();
    const auto cands = dir / "c.csv";
    REQUIRE(run("generate --output " + cands.string() + " --single-op A --pop 16 --generations 4 --seed 8", dir)
                .exit_code == 0);
    const auto emb = dir / "e.csv";
    REQUIRE(run("embed --input " + cands.string() + " --output " + emb.string() + " --method pca", dir)
                .exit_code == 0);
    const auto reps = dir / "reps.csv";
    REQUIRE(run("pick --input " + cands.string() + " --embedding " + emb.string() + " --output " + reps.string() +
                    " --clusters 4 --seed 11",
                dir)
                .exit_code == 0);

    // module-level oracle
    const CandidateSet embedded = load_candidates(emb.string());
    const KMeansResult km = kmeans(embedded.objectives, 4, 11, 4);
    const auto want = pick_representatives(embedded.ids, km.labels, km.centroids, embedded.objectives);

    std::ifstream in(reps);
    std::string line;
    std::getline(in, line); // header
    std::vector<std::string> got;
    while (std::getline(in, line))
        if (!line.empty()) got.push_back(line.substr(0, line.find(',')));
    CHECK(got == want);
}

TEST_CASE("embed: missing input exits 3, 3-D maps work for every method") {
    const auto dir = work_dir();
    const RunResult missing = run("embed --input " + (dir / "nope.csv").string() + " --output " +
                                      (dir / "o.csv").string() + " --method pca",
                                  dir);
    CHECK(missing.exit_code == 3);

    const auto cands = dir / "c.csv";
    REQUIRE(run("generate --output " + cands.string() + " --pop 20 --generations 4 --seed 12", dir).exit_code == 0);
    for (const std::string method : {"tsne", "pca", "isomap"}) {
        const auto out = dir / (method + "3.csv");
        std::string cmd = "embed --input " + cands.string() + " --output " + out.string() + " --method " + method +
                          " -d 3 --seed 2";
        if (method == "tsne") cmd += " --iterations 40";
        if (method == "isomap") cmd += " --k 8 --connect mst";
        REQUIRE_MESSAGE(run(cmd, dir).exit_code == 0, method);
        CHECK(load_candidates(out.string()).objectives.cols() == 3);
    }
}

TEST_CASE("embed: isomap largest-component policy drops the minority blob") {
    const auto dir = work_dir();
    std::string csv = "id,f1,f2\n";
    for (int i = 0; i < 9; ++i)
        csv += "a" + std::to_string(i) + "," + std::to_string(i * 0.1) + ",0\n";
    for (int i = 0; i < 5; ++i)
        csv += "b" + std::to_string(i) + "," + std::to_string(400.0 + i * 0.1) + ",1\n";
    write_file(dir / "split.csv", csv);
    const auto out = dir / "iso.csv";
    const RunResult res = run("embed --input " + (dir / "split.csv").string() + " --output " + out.string() +
                                  " --method isomap --k 2 --connect largest --scale none",
                              dir);
    CHECK(res.exit_code == 0);
    CHECK(res.err.find("dropped") != std::string::npos);
    const CandidateSet embedded = load_candidates(out.string());
    CHECK(embedded.size() == 9);
    for (const auto& id : embedded.ids) CHECK(id[0] == 'a');
}

TEST_CASE("embed: minmax scaling and the beta dump are wired through") {
    const auto dir = work_dir();
    const auto cands = dir / "c.csv";
    REQUIRE(run("generate --output " + cands.string() + " --single-op A --pop 12 --generations 2 --seed 9", dir)
                .exit_code == 0);
    const auto out = dir / "mm.csv";
    const RunResult res = run("embed --input " + cands.string() + " --output " + out.string() +
                                  " --method tsne --iterations 30 --scale minmax --seed 3 --dump-betas " +
                                  (dir / "betas.csv").string(),
                              dir);
    CHECK(res.exit_code == 0);
    REQUIRE(fs::exists(dir / "betas.csv"));
    CHECK(count_lines(dir / "betas.csv") == load_candidates(cands.string()).size() + 1);
}

TEST_CASE("config file: flag beats config beats default") {
    const auto dir = work_dir();
    write_file(dir / "conf.ini", "[generate]\npop = 10\ngenerations = 2\n");
    const auto csv = dir / "from_config.csv";
    const RunResult res = run("--config " + (dir / "conf.ini").string() + " generate --output " + csv.string() +
                                  " --keep-infeasible --generations 0 --seed 6",
                              dir);
    REQUIRE(res.exit_code == 0);
    // pop 10 from the config, generations 0 from the flag
    CHECK(load_candidates(csv.string()).size() == 10);
}
