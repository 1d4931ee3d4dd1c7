#include "cogref/verification/verify.hpp"

#include <fcntl.h>
#include <poll.h>
#include <sched.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <semaphore>

#include <json.hpp>

extern char **environ;

namespace cogref::verification {

using nlohmann::json;

std::string_view to_string(TestStyle style) { return style == TestStyle::AssertList ? "assert_list" : "stdin_stdout"; }

std::optional<TestStyle> parse_test_style(std::string_view text) {
    if (text == "assert_list")
        return TestStyle::AssertList;
    if (text == "stdin_stdout")
        return TestStyle::StdinStdout;
    return std::nullopt;
}

void TestSpec::validate() const {
    if (style == TestStyle::AssertList && (assertions.empty() || !io_cases.empty()))
        throw std::invalid_argument("assert_list spec needs assertions and no io cases");
    if (style == TestStyle::StdinStdout && (io_cases.empty() || !assertions.empty()))
        throw std::invalid_argument("stdin_stdout spec needs io cases and no assertions");
}

void SandboxPolicy::validate() const {
    if (!(timeout_s > 0))
        throw std::invalid_argument("sandbox timeout must be positive");
    if (network_allowed)
        throw std::invalid_argument("network access is never enabled for candidates");
}

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "Pass";
        case Verdict::Fail: return "Fail";
        case Verdict::RuntimeError: return "RuntimeError";
        case Verdict::Timeout: return "Timeout";
        case Verdict::SetupError: return "SetupError";
    }
    return "SetupError";
}

std::optional<Verdict> parse_verdict(std::string_view text) {
    for (auto v : {Verdict::Pass, Verdict::Fail, Verdict::RuntimeError, Verdict::Timeout, Verdict::SetupError})
        if (to_string(v) == text)
            return v;
    return std::nullopt;
}

std::string normalize_output(std::string_view text) {
    std::string out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r'))
            line.remove_suffix(1);
        out.append(line);
        out.push_back('\n');
        pos = end + 1;
    }
    while (!out.empty() && out.back() == '\n')
        out.pop_back();
    return out;
}

struct Verifier::Slots {
    explicit Slots(std::size_t n) : sem(static_cast<std::ptrdiff_t>(n)) {}
    std::counting_semaphore<4096> sem;
};

Verifier::Verifier(std::filesystem::path interpreter, std::filesystem::path shim, std::size_t max_children)
    : interpreter_(std::move(interpreter)),
      shim_(std::move(shim)),
      slots_(std::make_unique<Slots>(std::clamp<std::size_t>(max_children, 1, 4096))) {
    // a child that dies early must not take us down while we write its stdin
    ::signal(SIGPIPE, SIG_IGN);
}

Verifier::~Verifier() = default;

std::string Verifier::manifest(const source_ir::SourceUnit &candidate, const TestSpec &spec,
                               const SandboxPolicy &policy) {
    json m;
    m["candidate"] = candidate.text;
    m["style"] = std::string(to_string(spec.style));
    m["assertions"] = spec.assertions;
    json cases = json::array();
    for (const auto &c : spec.io_cases)
        cases.push_back({{"input", c.input}});
    m["io_cases"] = cases;
    m["entry_point"] = spec.entry_point ? json(*spec.entry_point) : json(nullptr);
    m["setup"] = spec.setup;
    m["case_time_budget_s"] = policy.case_time_budget_s;
    return m.dump();
}

namespace {

struct Fd {
    int fd = -1;
    Fd() = default;
    explicit Fd(int f) : fd(f) {}
    Fd(const Fd &) = delete;
    Fd &operator=(const Fd &) = delete;
    ~Fd() { reset(); }
    void reset() {
        if (fd >= 0)
            ::close(fd);
        fd = -1;
    }
};

struct Pipe {
    Fd r, w;
    Pipe() {
        int fds[2];
        if (::pipe2(fds, O_CLOEXEC) != 0)
            throw SetupError(std::string("pipe: ") + std::strerror(errno));
        r.fd = fds[0];
        w.fd = fds[1];
    }
};

class TempDir {
public:
    TempDir() {
        std::string tmpl = (std::filesystem::temp_directory_path() / "cogref-run-XXXXXX").string();
        if (::mkdtemp(tmpl.data()) == nullptr)
            throw SetupError(std::string("mkdtemp: ") + std::strerror(errno));
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path &path() const { return path_; }

private:
    std::filesystem::path path_;
};

struct ChildResult {
    std::string out;
    std::string err;
    bool timed_out = false;
    int status = 0;
    long duration_ms = 0;
};

class SlotGuard {
public:
    explicit SlotGuard(std::counting_semaphore<4096> &s) : s_(s) { s_.acquire(); }
    ~SlotGuard() { s_.release(); }
    SlotGuard(const SlotGuard &) = delete;
    SlotGuard &operator=(const SlotGuard &) = delete;

private:
    std::counting_semaphore<4096> &s_;
};

void append_capped(std::string &buf, const char *data, std::size_t n, std::size_t cap) {
    if (buf.size() < cap)
        buf.append(data, std::min(n, cap - buf.size()));
}

ChildResult run_child(const std::string &interpreter, const std::string &shim, const std::string &input,
                      const SandboxPolicy &policy) {
    TempDir dir;
    Pipe in, out, err, exec_err;

    std::vector<std::string> args{interpreter, "-I", "-B", shim};
    std::vector<char *> argv;
    for (auto &a : args)
        argv.push_back(a.data());
    argv.push_back(nullptr);
    std::vector<std::string> env_store;
    for (char **e = environ; *e != nullptr; ++e) {
        const std::string_view kv(*e);
        if (kv.rfind("PYTHONHASHSEED=", 0) == 0 || kv.rfind("PYTHONIOENCODING=", 0) == 0)
            continue;
        env_store.emplace_back(kv);
    }
    env_store.emplace_back("PYTHONHASHSEED=0");
    env_store.emplace_back("PYTHONIOENCODING=utf-8");
    std::vector<char *> envp;
    for (auto &e : env_store)
        envp.push_back(e.data());
    envp.push_back(nullptr);
    const std::string cwd = dir.path().string();

    const auto start = std::chrono::steady_clock::now();
    const pid_t pid = ::fork();
    if (pid < 0)
        throw SetupError(std::string("fork: ") + std::strerror(errno));
    if (pid == 0) {
        ::setpgid(0, 0);
        ::unshare(CLONE_NEWNET);  // best effort; needs privileges
        ::dup2(in.r.fd, 0);
        ::dup2(out.w.fd, 1);
        ::dup2(err.w.fd, 2);
        ::dup2(exec_err.w.fd, 3);
        ::fcntl(3, F_SETFD, FD_CLOEXEC);
        ::close_range(4, ~0U, 0);
        if (::chdir(cwd.c_str()) == 0)
            ::execve(argv[0], argv.data(), envp.data());
        const int e = errno;
        [[maybe_unused]] auto n = ::write(3, &e, sizeof e);
        ::_exit(127);
    }
    ::setpgid(pid, pid);
    in.r.reset();
    out.w.reset();
    err.w.reset();
    exec_err.w.reset();

    int exec_errno = 0;
    if (::read(exec_err.r.fd, &exec_errno, sizeof exec_errno) == static_cast<ssize_t>(sizeof exec_errno)) {
        ::waitpid(pid, nullptr, 0);
        throw SetupError("cannot execute " + interpreter + ": " + std::strerror(exec_errno));
    }

    ::fcntl(in.w.fd, F_SETFL, O_NONBLOCK);
    ChildResult res;
    std::size_t written = 0;
    if (input.empty())
        in.w.reset();
    const auto deadline = start + std::chrono::duration<double>(policy.timeout_s);
    bool exited = false;
    char buf[65536];
    while (out.r.fd >= 0 || err.r.fd >= 0) {
        const auto now = std::chrono::steady_clock::now();
        if (now >= deadline) {
            res.timed_out = true;
            break;
        }
        pollfd fds[3];
        nfds_t n = 0;
        if (out.r.fd >= 0)
            fds[n++] = {out.r.fd, POLLIN, 0};
        if (err.r.fd >= 0)
            fds[n++] = {err.r.fd, POLLIN, 0};
        if (in.w.fd >= 0)
            fds[n++] = {in.w.fd, POLLOUT, 0};
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
        const int rc = ::poll(fds, n, static_cast<int>(std::min<long long>(left + 1, 100)));
        if (rc < 0 && errno != EINTR)
            break;
        for (nfds_t i = 0; i < n && rc > 0; ++i) {
            if (fds[i].revents == 0)
                continue;
            if (fds[i].fd == in.w.fd) {
                const ssize_t k = ::write(in.w.fd, input.data() + written, input.size() - written);
                if (k > 0)
                    written += static_cast<std::size_t>(k);
                if (k < 0 && errno != EAGAIN)
                    in.w.reset();
                if (written == input.size())
                    in.w.reset();
                continue;
            }
            const bool is_out = fds[i].fd == out.r.fd;
            const ssize_t k = ::read(fds[i].fd, buf, sizeof buf);
            if (k > 0) {
                append_capped(is_out ? res.out : res.err, buf, static_cast<std::size_t>(k), policy.output_cap_bytes);
            } else if (k == 0 || errno != EAGAIN) {
                (is_out ? out.r : err.r).reset();
            }
        }
        // the shim is done; stray descendants must not keep the pipes open
        if (!exited && ::waitpid(pid, &res.status, WNOHANG) == pid) {
            exited = true;
            ::kill(-pid, SIGKILL);
        }
    }
    ::kill(-pid, SIGKILL);
    if (!exited)
        ::waitpid(pid, &res.status, 0);
    res.duration_ms = static_cast<long>(
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count());
    return res;
}

std::string tail(const std::string &s, std::size_t n) { return s.size() <= n ? s : s.substr(s.size() - n); }

std::optional<json> verdict_line(const std::string &out) {
    std::size_t end = out.size();
    while (end > 0 && (out[end - 1] == '\n' || out[end - 1] == '\r'))
        --end;
    if (end == 0)
        return std::nullopt;
    const std::size_t begin = out.rfind('\n', end - 1);
    const std::string line = out.substr(begin == std::string::npos ? 0 : begin + 1, end - (begin == std::string::npos ? 0 : begin + 1));
    json doc = json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("verdict") || !doc["verdict"].is_string())
        return std::nullopt;
    return doc;
}

}  // namespace

TestOutcome Verifier::verify(const source_ir::SourceUnit &candidate, const TestSpec &spec,
                             const SandboxPolicy &policy) const {
    spec.validate();
    policy.validate();
    TestOutcome outcome;
    if (::access(interpreter_.c_str(), X_OK) != 0) {
        outcome.exception = "interpreter not executable: " + interpreter_.string();
        return outcome;
    }
    if (::access(shim_.c_str(), R_OK) != 0) {
        outcome.exception = "shim not readable: " + shim_.string();
        return outcome;
    }

    SlotGuard slot(slots_->sem);
    ChildResult res;
    try {
        res = run_child(interpreter_.string(), std::filesystem::absolute(shim_).string(),
                        manifest(candidate, spec, policy), policy);
    } catch (const SetupError &e) {
        outcome.exception = e.what();
        return outcome;
    }
    outcome.duration_ms = res.duration_ms;
    outcome.stderr_excerpt = tail(res.err, 2000);
    if (res.timed_out) {
        outcome.verdict = Verdict::Timeout;
        outcome.exception = "killed after " + std::to_string(policy.timeout_s) + " s";
        return outcome;
    }

    const auto doc = verdict_line(res.out);
    if (!doc) {
        if (WIFEXITED(res.status) && (WEXITSTATUS(res.status) == kShimFaultExit || WEXITSTATUS(res.status) == 0)) {
            outcome.verdict = Verdict::SetupError;
            outcome.exception = "shim produced no verdict (exit " + std::to_string(WEXITSTATUS(res.status)) + ")";
        } else {
            outcome.verdict = Verdict::RuntimeError;
            outcome.exception = WIFSIGNALED(res.status)
                                    ? "interpreter killed by signal " + std::to_string(WTERMSIG(res.status))
                                    : "interpreter exited with status " + std::to_string(WEXITSTATUS(res.status)) +
                                          " without a verdict";
        }
        return outcome;
    }

    const std::string verdict = (*doc)["verdict"].get<std::string>();
    const std::string exception = doc->contains("exception") && (*doc)["exception"].is_string()
                                      ? (*doc)["exception"].get<std::string>()
                                      : std::string();
    std::optional<std::size_t> index;
    if (doc->contains("failed_case_index") && (*doc)["failed_case_index"].is_number_unsigned())
        index = (*doc)["failed_case_index"].get<std::size_t>();

    if (verdict == "error") {
        outcome.verdict = Verdict::RuntimeError;
        outcome.exception = index ? "case " + std::to_string(*index) + ": " + exception : exception;
        return outcome;
    }
    if (verdict == "fail") {
        outcome.verdict = Verdict::Fail;
        outcome.failed_case_index = index.value_or(0);
        outcome.exception = exception;
        return outcome;
    }
    if (verdict != "pass") {
        outcome.verdict = Verdict::SetupError;
        outcome.exception = "unknown shim verdict '" + verdict + "'";
        return outcome;
    }
    if (spec.style == TestStyle::StdinStdout) {
        const json &outputs = (*doc)["outputs"];
        if (!outputs.is_array() || outputs.size() != spec.io_cases.size()) {
            outcome.verdict = Verdict::SetupError;
            outcome.exception = "shim reported the wrong number of outputs";
            return outcome;
        }
        for (std::size_t i = 0; i < spec.io_cases.size(); ++i) {
            if (normalize_output(outputs[i].get<std::string>()) != normalize_output(spec.io_cases[i].expected)) {
                outcome.verdict = Verdict::Fail;
                outcome.failed_case_index = i;
                outcome.exception = "output mismatch";
                return outcome;
            }
        }
    }
    outcome.verdict = Verdict::Pass;
    return outcome;
}

}  // namespace cogref::verification
