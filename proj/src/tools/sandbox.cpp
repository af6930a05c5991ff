#include "codeedu/tools/sandbox.hpp"

#include "codeedu/error.hpp"

#include <fcntl.h>
#include <linux/audit.h>
#include <linux/filter.h>
#include <linux/seccomp.h>
#include <poll.h>
#include <sched.h>
#include <sys/prctl.h>
#include <sys/resource.h>
#include <sys/socket.h>
#include <sys/syscall.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstddef>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

namespace codeedu::tools {

namespace fs = std::filesystem;

namespace {

// Landlock UAPI, declared locally because distro headers lag the kernel.
constexpr std::uint64_t ll_fs_execute = 1ull << 0;
constexpr std::uint64_t ll_fs_write_file = 1ull << 1;
constexpr std::uint64_t ll_fs_remove_dir = 1ull << 4;
constexpr std::uint64_t ll_fs_remove_file = 1ull << 5;
constexpr std::uint64_t ll_fs_make_char = 1ull << 6;
constexpr std::uint64_t ll_fs_make_dir = 1ull << 7;
constexpr std::uint64_t ll_fs_make_reg = 1ull << 8;
constexpr std::uint64_t ll_fs_make_sock = 1ull << 9;
constexpr std::uint64_t ll_fs_make_fifo = 1ull << 10;
constexpr std::uint64_t ll_fs_make_block = 1ull << 11;
constexpr std::uint64_t ll_fs_make_sym = 1ull << 12;
constexpr std::uint64_t ll_fs_refer = 1ull << 13;
constexpr std::uint64_t ll_fs_truncate = 1ull << 14;
constexpr std::uint64_t ll_net_bind_tcp = 1ull << 0;
constexpr std::uint64_t ll_net_connect_tcp = 1ull << 1;
constexpr std::uint64_t ll_scope_abstract_unix = 1ull << 0;
constexpr std::uint64_t ll_scope_signal = 1ull << 1;
constexpr int ll_rule_path_beneath = 1;
constexpr unsigned ll_create_ruleset_version = 1u << 0;

struct LandlockRulesetAttr {
    std::uint64_t handled_access_fs;
    std::uint64_t handled_access_net;
    std::uint64_t scoped;
};

struct __attribute__((packed)) LandlockPathBeneathAttr {
    std::uint64_t allowed_access;
    std::int32_t parent_fd;
};

int landlock_create_ruleset(const LandlockRulesetAttr* attr, std::size_t size, unsigned flags) {
    return static_cast<int>(syscall(SYS_landlock_create_ruleset, attr, size, flags));
}

int landlock_add_rule(int ruleset_fd, int rule_type, const void* attr) {
    return static_cast<int>(syscall(SYS_landlock_add_rule, ruleset_fd, rule_type, attr, 0));
}

class UniqueFd {
public:
    UniqueFd() = default;
    explicit UniqueFd(int fd) : fd_(fd) {}
    UniqueFd(const UniqueFd&) = delete;
    UniqueFd& operator=(const UniqueFd&) = delete;
    UniqueFd(UniqueFd&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
    UniqueFd& operator=(UniqueFd&& other) noexcept {
        reset(std::exchange(other.fd_, -1));
        return *this;
    }
    ~UniqueFd() { reset(); }

    int get() const { return fd_; }
    explicit operator bool() const { return fd_ >= 0; }
    void reset(int fd = -1) {
        if (fd_ >= 0) ::close(fd_);
        fd_ = fd;
    }

private:
    int fd_ = -1;
};

[[noreturn]] void setup_failure(const std::string& what) {
    fail(ErrorKind::sandbox_setup_failure, what + ": " + std::strerror(errno));
}

UniqueFd build_landlock_ruleset(int abi, const fs::path& scratch, bool restrict_network) {
    std::uint64_t fs_rights = ll_fs_write_file | ll_fs_remove_dir | ll_fs_remove_file |
                              ll_fs_make_char | ll_fs_make_dir | ll_fs_make_reg |
                              ll_fs_make_sock | ll_fs_make_fifo | ll_fs_make_block |
                              ll_fs_make_sym;
    if (abi >= 2) fs_rights |= ll_fs_refer;
    if (abi >= 3) fs_rights |= ll_fs_truncate;

    LandlockRulesetAttr attr{fs_rights, 0, 0};
    std::size_t size = offsetof(LandlockRulesetAttr, handled_access_net);
    if (abi >= 4 && restrict_network) {
        attr.handled_access_net = ll_net_bind_tcp | ll_net_connect_tcp;
        size = offsetof(LandlockRulesetAttr, scoped);
    }
    if (abi >= 6) {
        attr.scoped = ll_scope_abstract_unix | ll_scope_signal;
        size = sizeof(LandlockRulesetAttr);
    }

    UniqueFd ruleset(landlock_create_ruleset(&attr, size, 0));
    if (!ruleset) setup_failure("landlock_create_ruleset");

    UniqueFd dir(::open(scratch.c_str(), O_PATH | O_CLOEXEC | O_DIRECTORY));
    if (!dir) setup_failure("open scratch directory");
    LandlockPathBeneathAttr scratch_rule{fs_rights, dir.get()};
    if (landlock_add_rule(ruleset.get(), ll_rule_path_beneath, &scratch_rule) != 0)
        setup_failure("landlock_add_rule(scratch)");

    UniqueFd devnull(::open("/dev/null", O_PATH | O_CLOEXEC));
    if (devnull) {
        std::uint64_t file_rights = ll_fs_write_file | (abi >= 3 ? ll_fs_truncate : 0);
        LandlockPathBeneathAttr null_rule{file_rights, devnull.get()};
        if (landlock_add_rule(ruleset.get(), ll_rule_path_beneath, &null_rule) != 0)
            setup_failure("landlock_add_rule(/dev/null)");
    }
    return ruleset;
}

// Allows AF_UNIX sockets only; every other family fails with EACCES.
std::vector<sock_filter> socket_filter() {
    return {
        BPF_STMT(BPF_LD | BPF_W | BPF_ABS, offsetof(seccomp_data, arch)),
        BPF_JUMP(BPF_JMP | BPF_JEQ | BPF_K, AUDIT_ARCH_X86_64, 1, 0),
        BPF_STMT(BPF_RET | BPF_K, SECCOMP_RET_KILL_PROCESS),
        BPF_STMT(BPF_LD | BPF_W | BPF_ABS, offsetof(seccomp_data, nr)),
        BPF_JUMP(BPF_JMP | BPF_JEQ | BPF_K, __NR_socket, 0, 4),
        BPF_STMT(BPF_LD | BPF_W | BPF_ABS, offsetof(seccomp_data, args[0])),
        BPF_JUMP(BPF_JMP | BPF_JEQ | BPF_K, AF_UNIX, 0, 1),
        BPF_STMT(BPF_RET | BPF_K, SECCOMP_RET_ALLOW),
        BPF_STMT(BPF_RET | BPF_K, SECCOMP_RET_ERRNO | (EACCES & SECCOMP_RET_DATA)),
        BPF_STMT(BPF_RET | BPF_K, SECCOMP_RET_ALLOW),
    };
}

std::string find_on_path(const std::string& program) {
    if (program.find('/') != std::string::npos) return program;
    const char* path = std::getenv("PATH");
    std::stringstream dirs(path ? path : "/usr/local/bin:/usr/bin:/bin");
    std::string dir;
    while (std::getline(dirs, dir, ':')) {
        if (dir.empty()) continue;
        fs::path candidate = fs::path(dir) / program;
        if (::access(candidate.c_str(), X_OK) == 0) return candidate.string();
    }
    return {};
}

std::string read_file_capped(const fs::path& path, std::uint64_t cap) {
    std::ifstream in(path, std::ios::binary);
    std::string data;
    data.resize(static_cast<std::size_t>(cap));
    in.read(data.data(), static_cast<std::streamsize>(cap));
    data.resize(static_cast<std::size_t>(in.gcount()));
    return data;
}

void write_file(const fs::path& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary);
    out << data;
    if (!out) fail(ErrorKind::sandbox_setup_failure, "cannot write " + path.string());
}

fs::path make_scratch(const fs::path& parent) {
    static std::atomic<std::uint64_t> counter{0};
    static const std::uint64_t salt = std::random_device{}();
    std::error_code ec;
    fs::create_directories(parent, ec);
    if (ec) fail(ErrorKind::sandbox_setup_failure, "cannot create " + parent.string() + ": " + ec.message());
    for (int attempt = 0; attempt < 100; ++attempt) {
        std::ostringstream id;
        id << "inv-" << ::getpid() << '-' << std::hex << (salt & 0xffff) << '-' << std::dec
           << counter.fetch_add(1);
        fs::path dir = parent / id.str();
        if (fs::create_directory(dir, ec)) return dir;
    }
    fail(ErrorKind::sandbox_setup_failure, "cannot allocate a scratch directory under " + parent.string());
}

struct ChildPlan {
    const char* path;
    std::vector<char*> argv;
    std::vector<char*> envp;
    int stdin_fd;
    int stdout_fd;
    int stderr_fd;
    const char* workdir;
    rlimit as_limit;
    rlimit cpu_limit;
    rlimit fsize_limit;
    int ruleset_fd;
    bool isolate_network;
    sock_fprog seccomp;
    int error_fd;
};

// Runs in the forked child: async-signal-safe calls only.
[[noreturn]] void exec_child(const ChildPlan& plan) {
    auto die = [&](int stage) {
        int payload[2] = {stage, errno};
        [[maybe_unused]] auto n = ::write(plan.error_fd, payload, sizeof(payload));
        ::_exit(127);
    };
    ::setpgid(0, 0);
    if (::dup2(plan.stdin_fd, 0) < 0 || ::dup2(plan.stdout_fd, 1) < 0 || ::dup2(plan.stderr_fd, 2) < 0)
        die(1);
    if (::chdir(plan.workdir) != 0) die(2);
    if (plan.isolate_network) ::unshare(CLONE_NEWNET);  // best effort; seccomp still applies
    rlimit zero{0, 0};
    rlimit files{64, 64};
    if (::setrlimit(RLIMIT_AS, &plan.as_limit) != 0 || ::setrlimit(RLIMIT_CPU, &plan.cpu_limit) != 0 ||
        ::setrlimit(RLIMIT_FSIZE, &plan.fsize_limit) != 0 || ::setrlimit(RLIMIT_CORE, &zero) != 0 ||
        ::setrlimit(RLIMIT_NOFILE, &files) != 0)
        die(3);
    if (::prctl(PR_SET_NO_NEW_PRIVS, 1, 0, 0, 0) != 0) die(4);
    if (plan.ruleset_fd >= 0 && ::syscall(SYS_landlock_restrict_self, plan.ruleset_fd, 0) != 0) die(5);
    if (plan.isolate_network && ::prctl(PR_SET_SECCOMP, SECCOMP_MODE_FILTER, &plan.seccomp) != 0) die(6);
    ::syscall(SYS_close_range, 3u, ~0u, 4u /* CLOSE_RANGE_CLOEXEC */);
    ::execve(plan.path, plan.argv.data(), plan.envp.data());
    die(7);
    ::_exit(127);
}

const char* stage_name(int stage) {
    switch (stage) {
        case 1: return "redirecting standard streams";
        case 2: return "entering the scratch directory";
        case 3: return "applying resource limits";
        case 4: return "setting no_new_privs";
        case 5: return "applying the landlock ruleset";
        case 6: return "installing the seccomp filter";
        case 7: return "executing the interpreter";
    }
    return "preparing the child";
}

} // namespace

std::string_view to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::ok: return "ok";
        case Verdict::runtime_error: return "runtime_error";
        case Verdict::timeout: return "timeout";
        case Verdict::memory_exceeded: return "memory_exceeded";
    }
    return "runtime_error";
}

void validate(const SandboxPolicy& policy) {
    require(policy.wall_clock_limit.count() > 0, "sandbox wall clock limit must be positive");
    require(policy.memory_limit > 0, "sandbox memory limit must be positive");
    require(policy.output_limit > 0, "sandbox output limit must be positive");
}

int ProcessSandbox::landlock_abi() {
    long abi = syscall(SYS_landlock_create_ruleset, nullptr, 0, ll_create_ruleset_version);
    return abi < 0 ? 0 : static_cast<int>(abi);
}

ProcessSandbox::ProcessSandbox(SandboxConfig config) : config_(std::move(config)) {
    require(config_.max_concurrent > 0, "sandbox concurrency limit must be positive");
    interpreter_path_ = find_on_path(config_.interpreter);
    if (interpreter_path_.empty())
        fail(ErrorKind::sandbox_setup_failure, "interpreter not found: " + config_.interpreter);
    if (!config_.shim_path.empty()) {
        std::ifstream in(config_.shim_path, std::ios::binary);
        if (!in) fail(ErrorKind::sandbox_setup_failure, "runner shim not found: " + config_.shim_path.string());
        std::ostringstream os;
        os << in.rdbuf();
        shim_source_ = os.str();
    }
    slots_ = std::make_unique<std::counting_semaphore<>>(config_.max_concurrent);
}

ExecutionResult ProcessSandbox::execute(const ExecutionRequest& request) const {
    require(!request.source.empty(), "source must be non-empty");
    validate(request.policy);
    const auto& policy = request.policy;

    int abi = landlock_abi();
    if (abi == 0 && config_.require_fs_confinement)
        fail(ErrorKind::sandbox_setup_failure, "kernel lacks landlock; cannot confine filesystem writes");

    slots_->acquire();
    struct Release {
        std::counting_semaphore<>* s;
        ~Release() { s->release(); }
    } release{slots_.get()};

    ExecutionResult result;
    result.scratch_dir = make_scratch(request.scratch_parent);
    const fs::path& scratch = result.scratch_dir;
    write_file(scratch / config_.source_name, request.source);
    write_file(scratch / "stdin.txt", request.stdin_text);
    std::string entry = config_.source_name;
    if (!shim_source_.empty()) {
        write_file(scratch / "runner.py", shim_source_);
        entry = "runner.py";
    }

    UniqueFd in_fd(::open((scratch / "stdin.txt").c_str(), O_RDONLY | O_CLOEXEC));
    UniqueFd out_fd(::open((scratch / "stdout.txt").c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644));
    UniqueFd err_fd(::open((scratch / "stderr.txt").c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644));
    if (!in_fd || !out_fd || !err_fd) setup_failure("opening capture files");

    UniqueFd ruleset;
    if (abi > 0) ruleset = build_landlock_ruleset(abi, scratch, !policy.network_allowed);

    int pipe_fds[2];
    if (::pipe2(pipe_fds, O_CLOEXEC) != 0) setup_failure("pipe2");
    UniqueFd error_read(pipe_fds[0]);
    UniqueFd error_write(pipe_fds[1]);

    std::vector<std::string> args{interpreter_path_};
    args.insert(args.end(), config_.interpreter_flags.begin(), config_.interpreter_flags.end());
    args.push_back(entry);
    if (!shim_source_.empty()) args.push_back(config_.source_name);
    std::vector<std::string> env{"PATH=/usr/local/bin:/usr/bin:/bin",
                                 "HOME=" + scratch.string(),
                                 "TMPDIR=" + scratch.string(),
                                 "LANG=C.UTF-8",
                                 "PYTHONDONTWRITEBYTECODE=1",
                                 "PYTHONIOENCODING=utf-8",
                                 "PYTHONHASHSEED=0"};

    auto filter = socket_filter();
    std::string workdir = scratch.string();
    auto cpu_seconds = static_cast<rlim_t>(policy.wall_clock_limit.count() / 1000 + 1);
    ChildPlan plan{};
    plan.path = interpreter_path_.c_str();
    for (auto& a : args) plan.argv.push_back(a.data());
    plan.argv.push_back(nullptr);
    for (auto& e : env) plan.envp.push_back(e.data());
    plan.envp.push_back(nullptr);
    plan.stdin_fd = in_fd.get();
    plan.stdout_fd = out_fd.get();
    plan.stderr_fd = err_fd.get();
    plan.workdir = workdir.c_str();
    plan.as_limit = {static_cast<rlim_t>(policy.memory_limit), static_cast<rlim_t>(policy.memory_limit)};
    plan.cpu_limit = {cpu_seconds, cpu_seconds};
    plan.fsize_limit = {static_cast<rlim_t>(policy.output_limit), static_cast<rlim_t>(policy.output_limit)};
    plan.ruleset_fd = ruleset ? ruleset.get() : -1;
    plan.isolate_network = !policy.network_allowed;
    plan.seccomp = {static_cast<unsigned short>(filter.size()), filter.data()};
    plan.error_fd = error_write.get();

    auto start = std::chrono::steady_clock::now();
    pid_t pid = ::fork();
    if (pid < 0) setup_failure("fork");
    if (pid == 0) exec_child(plan);
    ::setpgid(pid, pid);
    error_write.reset();

    int report[2] = {0, 0};
    ssize_t n;
    do {
        n = ::read(error_read.get(), report, sizeof(report));
    } while (n < 0 && errno == EINTR);
    if (n > 0) {
        int status = 0;
        ::waitpid(pid, &status, 0);
        errno = report[1];
        setup_failure(std::string("sandbox child failed while ") + stage_name(report[0]));
    }

    auto deadline = start + policy.wall_clock_limit;
    bool timed_out = false;
    int status = 0;
    UniqueFd pidfd(static_cast<int>(syscall(SYS_pidfd_open, pid, 0)));
    for (;;) {
        pid_t done = ::waitpid(pid, &status, WNOHANG);
        if (done == pid) break;
        auto now = std::chrono::steady_clock::now();
        if (now >= deadline) {
            timed_out = true;
            ::kill(-pid, SIGKILL);
            ::kill(pid, SIGKILL);
            ::waitpid(pid, &status, 0);
            break;
        }
        auto wait_ms = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count() + 1;
        if (pidfd) {
            pollfd pfd{pidfd.get(), POLLIN, 0};
            ::poll(&pfd, 1, static_cast<int>(std::min<long long>(wait_ms, 1000)));
        } else {
            ::usleep(2000);
        }
    }
    ::kill(-pid, SIGKILL);  // stray grandchildren
    result.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);

    out_fd.reset();
    err_fd.reset();
    result.stdout_text = read_file_capped(scratch / "stdout.txt", policy.output_limit);
    result.stderr_text = read_file_capped(scratch / "stderr.txt", policy.output_limit);

    if (WIFEXITED(status)) {
        result.exit_status = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
        result.exit_status = 128 + WTERMSIG(status);
    }

    constexpr int shim_memory_exit = 86;
    if (timed_out || (WIFSIGNALED(status) && WTERMSIG(status) == SIGXCPU)) {
        result.verdict = Verdict::timeout;
    } else if ((!shim_source_.empty() && result.exit_status == shim_memory_exit) ||
               (result.exit_status != 0 && result.stderr_text.find("MemoryError") != std::string::npos)) {
        result.verdict = Verdict::memory_exceeded;
    } else if (result.exit_status != 0) {
        result.verdict = Verdict::runtime_error;
    } else {
        result.verdict = Verdict::ok;
    }
    return result;
}

} // namespace codeedu::tools
