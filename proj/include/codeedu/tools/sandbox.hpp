#pragma once

#include "codeedu/tools/types.hpp"

#include <filesystem>
#include <memory>
#include <semaphore>
#include <string>
#include <vector>

namespace codeedu::tools {

struct ExecutionRequest {
    std::string source;
    std::string stdin_text;
    SandboxPolicy policy;
    // Parent of the per-invocation scratch directory, usually
    // <workspace>/sandbox.
    std::filesystem::path scratch_parent;
};

class CodeExecutor {
public:
    virtual ~CodeExecutor() = default;
    // Student-code failures come back as verdicts; only host problems throw
    // (sandbox_setup_failure).
    virtual ExecutionResult execute(const ExecutionRequest& request) const = 0;
};

struct SandboxConfig {
    std::string interpreter = "python3";
    std::vector<std::string> interpreter_flags = {"-I", "-S", "-B"};
    std::string source_name = "main.py";
    // Runner shim placed next to the source; when empty the source runs
    // directly.
    std::filesystem::path shim_path;
    int max_concurrent = 4;
    // Refuse to run when the kernel cannot confine filesystem writes.
    bool require_fs_confinement = true;
};

// Child-process sandbox: fresh scratch directory per invocation, rlimits for
// memory/cpu/file size, Landlock write confinement to the scratch directory,
// seccomp denial of non-unix sockets, and a private network namespace when
// the kernel allows it.
class ProcessSandbox : public CodeExecutor {
public:
    explicit ProcessSandbox(SandboxConfig config = {});

    ExecutionResult execute(const ExecutionRequest& request) const override;

    const SandboxConfig& config() const { return config_; }

    // Landlock ABI version, 0 when unavailable.
    static int landlock_abi();

private:
    SandboxConfig config_;
    std::string interpreter_path_;
    std::string shim_source_;
    mutable std::unique_ptr<std::counting_semaphore<>> slots_;
};

} // namespace codeedu::tools
