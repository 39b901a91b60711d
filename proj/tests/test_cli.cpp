#include "doctest.h"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <thread>

#include <boost/asio.hpp>

#include "pendlab/csv.hpp"
#include "pendlab/report.hpp"

namespace fs = std::filesystem;
using namespace pendlab;

namespace {

const std::string kBin = PENDLAB_BINARY;
const std::string kScenarios = std::string(PENDLAB_SOURCE_DIR) + "/scenarios/";

fs::path scratch(const std::string& name) {
    fs::path p = fs::path(PENDLAB_TEST_TMP) / "cli" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run(const std::string& args, const fs::path& log) {
    const int status = std::system((kBin + " " + args + " > " + log.string() + " 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::uint16_t free_port() {
    boost::asio::io_context io;
    boost::asio::ip::tcp::acceptor a(io, {boost::asio::ip::make_address("127.0.0.1"), 0});
    return a.local_endpoint().port();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("run: bang-bang at the inverted position enters the band within 5 s") {
    const auto dir = scratch("bang");
    CHECK(run("run " + kScenarios + "bang_bang_pi.scn --out " + dir.string(), dir / "log.txt") == 0);
    const auto summary = slurp(dir / "summary.txt");
    CHECK(summary.find("outcome: Completed") != std::string::npos);
    const auto parsed = parse_csv(slurp(dir / "session.csv"));
    CHECK(parsed.frames.size() == 20001);
    SessionRecord rec;
    apply_settings(rec.config, parsed.config);
    rec.frames = parsed.frames;
    const auto entry = summary_band_entry(rec);
    REQUIRE(entry);
    CHECK(*entry < 5.0);
    CHECK(summary.find("band entry") != std::string::npos);
}

TEST_CASE("run: summary compares predicted and observed equilibria") {
    const auto dir = scratch("pid");
    CHECK(run("run " + kScenarios + "pid_disturbance.scn --out " + dir.string(), dir / "log.txt") == 0);
    const auto summary = slurp(dir / "summary.txt");
    CHECK(summary.find("sigma predicted: 0.130193214") != std::string::npos);
    CHECK(summary.find("theta predicted: 1 rad") != std::string::npos);
}

TEST_CASE("run: usage errors exit 2") {
    const auto dir = scratch("usage");
    CHECK(run("run " + dir.string() + "/missing.scn --out " + dir.string(), dir / "log1.txt") == 2);
    std::ofstream(dir / "bad.scn") << "params.b = -3\n";
    CHECK(run("run " + (dir / "bad.scn").string() + " --out " + dir.string(), dir / "log2.txt") == 2);
    CHECK(slurp(dir / "log2.txt").find("params.b") != std::string::npos);
    CHECK(run("run " + kScenarios + "pd_zero_friction.scn --set nonsense=1", dir / "log3.txt") == 2);
    CHECK(run("frobnicate", dir / "log4.txt") == 2);
    CHECK(run("", dir / "log5.txt") == 2);
}

TEST_CASE("run: divergence exits 1") {
    const auto dir = scratch("diverge");
    std::ofstream(dir / "blowup.scn") << "mode = open_loop\nreference.type = constant\nreference.value = 1e9\n"
                                         "limits.tau_min = -1e9\nlimits.tau_max = 1e9\nduration = 1\n";
    CHECK(run("run " + (dir / "blowup.scn").string() + " --out " + dir.string(), dir / "log.txt") == 1);
    CHECK(slurp(dir / "summary.txt").find("outcome: Diverged") != std::string::npos);
}

TEST_CASE("run: --set overrides and the CSV reproduces itself") {
    const auto dir = scratch("repro");
    const auto first = dir / "first";
    const auto second = dir / "second";
    CHECK(run("run " + kScenarios + "sine_tracking_noisy.scn --set duration=2 --set seed=9 --out " + first.string(),
              dir / "log1.txt") == 0);
    const auto csv = slurp(first / "session.csv");
    CHECK(csv.find("#config seed = 9") != std::string::npos);
    CHECK(csv.find("#config duration = 2") != std::string::npos);
    CHECK(run("run " + (first / "session.csv").string() + " --out " + second.string(), dir / "log2.txt") == 0);
    CHECK(slurp(second / "session.csv") == csv);
}

TEST_CASE("run: --inputs replays a recorded input log") {
    const auto dir = scratch("inputs");
    std::ofstream(dir / "joy.scn") << "reference.type = joystick\ncontroller.type = pd\nduration = 1\n";
    std::ofstream(dir / "inputs.jsonl") << R"({"raw":1023,"tick":100,"type":"adc_frame","v":1})" << "\n"
                                        << R"({"b":0.5,"tick":400,"type":"set_friction","v":1})" << "\n";
    CHECK(run("run " + (dir / "joy.scn").string() + " --inputs " + (dir / "inputs.jsonl").string() + " --out " +
                  dir.string(),
              dir / "log.txt") == 0);
    const auto parsed = parse_csv(slurp(dir / "session.csv"));
    CHECK(parsed.frames[99].r < 0.1);
    CHECK(parsed.frames.back().r > 3.0);
}

TEST_CASE("sweep: friction presets give four rows") {
    const auto dir = scratch("sweep");
    CHECK(run("sweep " + kScenarios + "p_control.scn --param params.b --values 0,0.1,0.5,1.0 --set duration=10 --out " +
                  dir.string(),
              dir / "log.txt") == 0);
    const auto table = slurp(dir / "sweep.txt");
    std::istringstream lines(table);
    std::string line;
    int rows = -1;  // header
    while (std::getline(lines, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 4);
    for (const char* v : {"0", "0.1", "0.5", "1.0"})
        CHECK(fs::exists(dir / (std::string("params.b=") + v + ".csv")));
}

TEST_CASE("sweep: a single value matches run") {
    const auto dir = scratch("sweep_one");
    CHECK(run("sweep " + kScenarios + "p_control.scn --param controller.kp --values 1 --set duration=5 --out " +
                  (dir / "sweep").string(),
              dir / "log1.txt") == 0);
    CHECK(run("run " + kScenarios + "p_control.scn --set duration=5 --set controller.kp=1 --out " +
                  (dir / "run").string(),
              dir / "log2.txt") == 0);
    CHECK(slurp(dir / "sweep" / "controller.kp=1.csv") == slurp(dir / "run" / "session.csv"));
}

TEST_CASE("sweep: non-numeric parameters are rejected") {
    const auto dir = scratch("sweep_bad");
    CHECK(run("sweep " + kScenarios + "p_control.scn --param controller.type --values p,pd --out " + dir.string(),
              dir / "log.txt") == 2);
}

TEST_CASE("sweep: divergent rows are marked and the sweep continues") {
    const auto dir = scratch("sweep_diverge");
    std::ofstream(dir / "ol.scn") << "mode = open_loop\nreference.type = constant\nreference.value = 0\n"
                                     "limits.tau_min = -1e9\nlimits.tau_max = 1e9\nduration = 0.5\n";
    CHECK(run("sweep " + (dir / "ol.scn").string() + " --param reference.value --values 0,1e9,0.1 --out " +
                  dir.string(),
              dir / "log.txt") == 1);
    const auto table = slurp(dir / "sweep.txt");
    CHECK(table.find("Diverged") != std::string::npos);
    CHECK(fs::exists(dir / "reference.value=0.1.csv"));
}

TEST_CASE("serve: start, answer, stop on SIGINT") {
    const auto dir = scratch("serve");
    const auto port = free_port();
    const std::string cmd = kBin + " serve --port " + std::to_string(port) + " > " + (dir / "out.txt").string() +
                            " 2>&1 & echo $! > " + (dir / "pid").string();
    REQUIRE(std::system(cmd.c_str()) == 0);
    std::this_thread::sleep_for(std::chrono::milliseconds(300));
    const auto pid = std::stoi(slurp(dir / "pid"));

    boost::asio::io_context io;
    boost::asio::ip::tcp::socket socket(io);
    socket.connect({boost::asio::ip::make_address("127.0.0.1"), port});
    boost::asio::write(socket, boost::asio::buffer(std::string(R"({"nonce":5,"type":"ping","v":1})") + "\n"));
    boost::asio::streambuf buf;
    boost::asio::read_until(socket, buf, "pong");
    socket.close();

    std::system(("kill -INT " + std::to_string(pid)).c_str());
    for (int i = 0; i < 50 && std::system(("kill -0 " + std::to_string(pid) + " 2>/dev/null").c_str()) == 0; ++i)
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
    CHECK(std::system(("kill -0 " + std::to_string(pid) + " 2>/dev/null").c_str()) != 0);
    CHECK(slurp(dir / "out.txt").find("serving on 127.0.0.1:" + std::to_string(port)) != std::string::npos);
}

TEST_CASE("serve: busy port exits 1 with a diagnostic") {
    const auto dir = scratch("serve_busy");
    boost::asio::io_context io;
    boost::asio::ip::tcp::acceptor holder(io, {boost::asio::ip::make_address("127.0.0.1"), 0});
    const auto port = holder.local_endpoint().port();
    CHECK(run("serve --port " + std::to_string(port), dir / "log.txt") == 1);
    CHECK(slurp(dir / "log.txt").find("cannot listen") != std::string::npos);
}

TEST_CASE("serve: environment port, flag wins over it") {
    const auto dir = scratch("serve_env");
    boost::asio::io_context io;
    boost::asio::ip::tcp::acceptor holder(io, {boost::asio::ip::make_address("127.0.0.1"), 0});
    const auto busy = holder.local_endpoint().port();
    // the environment port is busy, so reaching bind proves it was used
    const int status = std::system(("PENDLAB_PORT=" + std::to_string(busy) + " " + kBin + " serve > " +
                                    (dir / "log.txt").string() + " 2>&1")
                                       .c_str());
    CHECK(WEXITSTATUS(status) == 1);
    CHECK(slurp(dir / "log.txt").find(":" + std::to_string(busy)) != std::string::npos);

    const auto port = free_port();
    const std::string cmd = "PENDLAB_PORT=" + std::to_string(busy) + " " + kBin + " serve --port " +
                            std::to_string(port) + " > " + (dir / "out.txt").string() + " 2>&1 & echo $! > " +
                            (dir / "pid").string();
    REQUIRE(std::system(cmd.c_str()) == 0);
    std::this_thread::sleep_for(std::chrono::milliseconds(300));
    const auto pid = std::stoi(slurp(dir / "pid"));
    std::system(("kill -INT " + std::to_string(pid)).c_str());
    std::this_thread::sleep_for(std::chrono::milliseconds(200));
    CHECK(slurp(dir / "out.txt").find("serving on 127.0.0.1:" + std::to_string(port)) != std::string::npos);
}

}
