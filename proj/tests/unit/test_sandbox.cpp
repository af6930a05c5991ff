#include <catch_amalgamated.hpp>

#include "codeedu/tools/registry.hpp"
#include "codeedu/tools/unit_tests.hpp"
#include "test_support.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <set>

using namespace codeedu;
using namespace codeedu::tools;
using codeedu::testing::TempDir;

namespace {

const ProcessSandbox& sandbox() {
    static ProcessSandbox instance(testing::python_sandbox_config());
    return instance;
}

ExecutionResult run(const std::string& source, const std::filesystem::path& parent, SandboxPolicy policy = {},
                    std::string stdin_text = {}) {
    return sandbox().execute({source, std::move(stdin_text), policy, parent});
}

std::set<std::string> tree(const std::filesystem::path& root) {
    std::set<std::string> out;
    std::error_code ec;
    for (auto it = std::filesystem::recursive_directory_iterator(
             root, std::filesystem::directory_options::skip_permission_denied, ec);
         it != std::filesystem::recursive_directory_iterator(); it.increment(ec)) {
        if (ec) break;
        out.insert(it->path().string());
    }
    return out;
}

} // namespace

TEST_CASE("sandbox runs a trivial program", "[sandbox]") {
    TempDir scratch;
    auto result = run("print('hi')", scratch.path());
    CHECK(result.verdict == Verdict::ok);
    CHECK(result.exit_status == 0);
    CHECK(result.stdout_text == "hi\n");

    auto sum = run("print(1+1)", scratch.path());
    CHECK(sum.stdout_text == "2\n");

    auto echo = run("import sys\nprint(sys.stdin.read().upper(), end='')", scratch.path(), {}, "abc\n");
    CHECK(echo.stdout_text == "ABC\n");
}

TEST_CASE("code_interpreter tool goes through the sandbox", "[sandbox]") {
    TempDir workspace;
    auto executor = std::shared_ptr<const CodeExecutor>(&sandbox(), [](const CodeExecutor*) {});
    ToolRegistry registry(executor, {});
    ToolContext context{workspace.path(), nullptr, "programmer", {}};
    auto result = registry.invoke("code_interpreter", {{"source", "print(1+1)"}}, context);
    const auto& exec = std::get<ExecutionResult>(result);
    CHECK(exec.verdict == Verdict::ok);
    CHECK(exec.stdout_text == "2\n");
    CHECK(exec.scratch_dir.parent_path() == workspace.path() / "sandbox");
}

TEST_CASE("runtime errors and memory blow-ups are verdicts", "[sandbox]") {
    TempDir scratch;
    auto crash = run("raise ValueError('boom')", scratch.path());
    CHECK(crash.verdict == Verdict::runtime_error);
    CHECK(crash.exit_status != 0);
    CHECK(crash.stderr_text.find("ValueError: boom") != std::string::npos);

    SandboxPolicy small;
    small.memory_limit = 128ull << 20;
    auto hog = run("x = bytearray(1 << 30)\nprint(len(x))", scratch.path(), small);
    CHECK(hog.verdict == Verdict::memory_exceeded);
}

TEST_CASE("infinite loops time out within the bound", "[sandbox]") {
    TempDir scratch;
    SandboxPolicy policy;
    policy.wall_clock_limit = std::chrono::seconds(1);
    auto start = std::chrono::steady_clock::now();
    auto result = run("while True:\n    pass", scratch.path(), policy);
    auto took = std::chrono::steady_clock::now() - start;
    CHECK(result.verdict == Verdict::timeout);
    CHECK(took < std::chrono::seconds(3));

    // A sleeping child uses no CPU; the wall clock still has to catch it.
    start = std::chrono::steady_clock::now();
    auto sleeper = run("import time\ntime.sleep(30)", scratch.path(), policy);
    CHECK(sleeper.verdict == Verdict::timeout);
    CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(3));
}

TEST_CASE("sandboxed code cannot reach the network", "[sandbox]") {
    int listener = ::socket(AF_INET, SOCK_STREAM, 0);
    REQUIRE(listener >= 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    REQUIRE(::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
    socklen_t len = sizeof addr;
    ::getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &len);
    REQUIRE(::listen(listener, 4) == 0);
    int port = ntohs(addr.sin_port);

    TempDir scratch;
    auto source = "import socket\n"
                  "try:\n"
                  "    s = socket.create_connection(('127.0.0.1', " + std::to_string(port) + "), timeout=1)\n"
                  "    s.sendall(b'leak')\n"
                  "    print('connected')\n"
                  "except OSError as e:\n"
                  "    print('blocked')\n";
    auto result = run(source, scratch.path());
    CHECK(result.stdout_text == "blocked\n");

    // Nothing may be waiting in the accept queue.
    timeval tv{0, 200000};
    fd_set fds;
    FD_ZERO(&fds);
    FD_SET(listener, &fds);
    CHECK(::select(listener + 1, &fds, nullptr, nullptr, &tv) == 0);
    ::close(listener);
}

TEST_CASE("writes stay inside the scratch directory", "[sandbox]") {
    TempDir outside;
    TempDir scratch;
    auto before = tree(outside.path());
    auto target = (outside.path() / "escaped.txt").string();
    auto source = "import os\n"
                  "ok = 0\n"
                  "for p in ['" + target + "', '/tmp/codeedu-escape-probe', '../escaped-relative.txt']:\n"
                  "    try:\n"
                  "        open(p, 'w').write('x')\n"
                  "        print('wrote', p)\n"
                  "    except OSError:\n"
                  "        ok += 1\n"
                  "open('local.txt', 'w').write('fine')\n"
                  "print(ok, open('local.txt').read())\n";
    auto result = run(source, scratch.path());
    CHECK(result.stdout_text == "3 fine\n");
    CHECK(tree(outside.path()) == before);
    CHECK_FALSE(std::filesystem::exists("/tmp/codeedu-escape-probe"));
    CHECK_FALSE(std::filesystem::exists(scratch.path() / "escaped-relative.txt"));
}

TEST_CASE("each invocation gets a fresh scratch directory", "[sandbox]") {
    TempDir scratch;
    auto first = run("open('state.txt', 'w').write('1')\nprint('w')", scratch.path());
    auto second = run("import os\nprint(os.path.exists('state.txt'))", scratch.path());
    CHECK(first.scratch_dir != second.scratch_dir);
    CHECK(second.stdout_text == "False\n");
}

TEST_CASE("an off-by-one solution fails all but the first case", "[sandbox]") {
    TempDir scratch;
    std::vector<TestCase> cases;
    for (int n = 0; n < 10; ++n) cases.push_back({std::to_string(n), std::to_string(n * (n + 1) / 2)});
    auto report = run_unit_tests(sandbox(), "n = int(input())\nprint(sum(range(n)))", cases, {}, scratch.path());
    std::vector<bool> expected(10, false);
    expected[0] = true;
    CHECK(report.case_results == expected);
    CHECK_FALSE(report.all_passed);

    auto fixed = run_unit_tests(sandbox(), "n = int(input())\nprint(sum(range(n + 1)))", cases, {}, scratch.path());
    CHECK(fixed.all_passed);
}

TEST_CASE("verdicts are deterministic across repeats", "[sandbox][property]") {
    TempDir scratch;
    SandboxPolicy policy;
    policy.wall_clock_limit = std::chrono::seconds(1);
    const std::vector<std::string> programs = {
        "print(sum(range(100)))", "raise SystemExit(3)", "import sys\nprint(1/0)", "while True: pass",
        "print(input()[::-1])"};
    for (const auto& source : programs) {
        auto first = run(source, scratch.path(), policy, "abc\n");
        for (int i = 0; i < 3; ++i) {
            auto again = run(source, scratch.path(), policy, "abc\n");
            CHECK(again.verdict == first.verdict);
            if (first.verdict != Verdict::timeout) {
                CHECK(again.stdout_text == first.stdout_text);
                CHECK(again.exit_status == first.exit_status);
            }
        }
    }
}
