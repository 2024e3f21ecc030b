#pragma once

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "neuromut/config.hpp"
#include "neuromut/errors.hpp"
#include "neuromut/fsutil.hpp"

namespace neuromut {

inline constexpr std::size_t kOutputTailBytes = 4096;

struct CommandResult {
    int exit_code = -1;
    bool timed_out = false;
    double seconds = 0.0;
    std::string output_tail;  // last 4 KiB of combined stdout+stderr
};

// Lifecycle record for one mutant. compiled is present iff the mutant was
// translated; tests_passed iff it compiled. tests_passed=false means killed.
struct MutantOutcome {
    std::string mutant_id;
    bool translated = true;
    std::optional<bool> compiled;
    std::optional<bool> tests_passed;
    std::optional<double> compile_seconds;
    std::optional<double> test_seconds;
    std::string command_output_tail;
    std::string reason;  // ok, compile_failed, compile_timeout, test_failed, test_timeout
};

namespace detail {

inline void append_tail(std::string& tail, const char* data, std::size_t len) {
    tail.append(data, len);
    if (tail.size() > kOutputTailBytes) tail.erase(0, tail.size() - kOutputTailBytes);
}

}  // namespace detail

// Runs a shell command with the given working directory, capturing combined
// output and enforcing a wall-clock timeout. The whole process group is
// killed on timeout. Nonzero exits are data, not errors; only a failure to
// spawn the shell throws.
inline CommandResult run_command(const std::string& command, const std::filesystem::path& cwd,
                                 int timeout_seconds) {
    int out_pipe[2];
    int status_pipe[2];
    if (pipe(out_pipe) != 0) throw SpawnError("pipe failed");
    if (pipe(status_pipe) != 0) {
        close(out_pipe[0]);
        close(out_pipe[1]);
        throw SpawnError("pipe failed");
    }
    fcntl(status_pipe[1], F_SETFD, FD_CLOEXEC);

    auto start = std::chrono::steady_clock::now();
    pid_t pid = fork();
    if (pid < 0) {
        for (int fd : {out_pipe[0], out_pipe[1], status_pipe[0], status_pipe[1]}) close(fd);
        throw SpawnError("fork failed");
    }
    if (pid == 0) {
        setpgid(0, 0);
        close(out_pipe[0]);
        close(status_pipe[0]);
        dup2(out_pipe[1], STDOUT_FILENO);
        dup2(out_pipe[1], STDERR_FILENO);
        close(out_pipe[1]);
        int err = 0;
        if (chdir(cwd.c_str()) != 0) {
            err = errno;
            [[maybe_unused]] auto n = write(status_pipe[1], &err, sizeof err);
            _exit(127);
        }
        execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        err = errno;
        [[maybe_unused]] auto n = write(status_pipe[1], &err, sizeof err);
        _exit(127);
    }

    close(out_pipe[1]);
    close(status_pipe[1]);

    int child_errno = 0;
    ssize_t sn = read(status_pipe[0], &child_errno, sizeof child_errno);
    close(status_pipe[0]);
    if (sn > 0) {
        close(out_pipe[0]);
        waitpid(pid, nullptr, 0);
        throw SpawnError(std::string("cannot start command: ") + std::strerror(child_errno));
    }

    CommandResult result;
    auto deadline = start + std::chrono::seconds(timeout_seconds);
    char buf[4096];
    bool open = true;
    while (open) {
        auto now = std::chrono::steady_clock::now();
        if (now >= deadline) {
            result.timed_out = true;
            kill(-pid, SIGKILL);
            kill(pid, SIGKILL);
            break;
        }
        auto remaining =
            std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
        struct pollfd pfd {out_pipe[0], POLLIN, 0};
        int pr = poll(&pfd, 1, static_cast<int>(std::min<long long>(remaining, 1000)));
        if (pr > 0) {
            ssize_t n = read(out_pipe[0], buf, sizeof buf);
            if (n > 0)
                detail::append_tail(result.output_tail, buf, static_cast<std::size_t>(n));
            else
                open = false;  // EOF: every writer closed
        }
    }
    // drain whatever remains after a kill
    if (result.timed_out) {
        ssize_t n;
        while ((n = read(out_pipe[0], buf, sizeof buf)) > 0)
            detail::append_tail(result.output_tail, buf, static_cast<std::size_t>(n));
    }
    close(out_pipe[0]);

    int status = 0;
    waitpid(pid, &status, 0);
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (WIFEXITED(status))
        result.exit_code = WEXITSTATUS(status);
    else
        result.exit_code = -1;
    return result;
}

// Compile gate then tests: the test command only runs when compilation
// succeeded within its time limit.
inline MutantOutcome run_mutant(const std::filesystem::path& copy_path,
                                const PipelineConfig& config) {
    MutantOutcome o;
    o.mutant_id = copy_path.filename().string();
    o.translated = true;

    CommandResult compile =
        run_command(config.compile_command, copy_path, config.command_timeout_seconds);
    o.compile_seconds = compile.seconds;
    o.command_output_tail = compile.output_tail;
    bool compile_ok = !compile.timed_out && compile.exit_code == 0;
    o.compiled = compile_ok;
    if (!compile_ok) {
        o.reason = compile.timed_out ? "compile_timeout" : "compile_failed";
        return o;
    }

    CommandResult test = run_command(config.test_command, copy_path, config.command_timeout_seconds);
    o.test_seconds = test.seconds;
    detail::append_tail(o.command_output_tail, test.output_tail.data(), test.output_tail.size());
    bool tests_ok = !test.timed_out && test.exit_code == 0;
    o.tests_passed = tests_ok;
    o.reason = tests_ok ? "ok" : (test.timed_out ? "test_timeout" : "test_failed");
    return o;
}

// Runs up to worker_count mutants concurrently; the result order always
// matches the input order.
inline std::vector<MutantOutcome> run_all(const std::vector<std::filesystem::path>& copies,
                                          const PipelineConfig& config) {
    std::vector<MutantOutcome> results(copies.size());
    if (copies.empty()) return results;
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= copies.size()) return;
            try {
                results[i] = run_mutant(copies[i], config);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(config.worker_count),
                                                copies.size());
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return results;
}

inline std::string outcome_to_text(const MutantOutcome& o) {
    std::ostringstream out;
    auto opt_bool = [](const std::optional<bool>& b) {
        return !b ? std::string("absent") : (*b ? std::string("true") : std::string("false"));
    };
    out << "translated=" << (o.translated ? "true" : "false") << '\n';
    out << "compiled=" << opt_bool(o.compiled) << '\n';
    out << "tests_passed=" << opt_bool(o.tests_passed) << '\n';
    char buf[64];
    if (o.compile_seconds) {
        std::snprintf(buf, sizeof buf, "%.3f", *o.compile_seconds);
        out << "compile_seconds=" << buf << '\n';
    }
    if (o.test_seconds) {
        std::snprintf(buf, sizeof buf, "%.3f", *o.test_seconds);
        out << "test_seconds=" << buf << '\n';
    }
    out << "reason=" << o.reason << '\n';
    out << "---\n";
    out << o.command_output_tail;
    return out.str();
}

}  // namespace neuromut
