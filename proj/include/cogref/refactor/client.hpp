#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cogref::refactor {

struct Attempt {
    std::int64_t started_ms = 0;  // unix epoch
    std::int64_t finished_ms = 0;
    int status = 0;  // 0 when no HTTP response
    std::string error;
};

/// Base of all completion failures; carries the attempts made so far.
class CompletionError : public std::runtime_error {
public:
    explicit CompletionError(const std::string &what, std::vector<Attempt> attempts = {})
        : std::runtime_error(what), attempts_(std::move(attempts)) {}
    const std::vector<Attempt> &attempts() const noexcept { return attempts_; }

private:
    std::vector<Attempt> attempts_;
};

class AuthError : public CompletionError {
public:
    using CompletionError::CompletionError;
};

class RateLimited : public CompletionError {
public:
    using CompletionError::CompletionError;
};

class TransportError : public CompletionError {
public:
    using CompletionError::CompletionError;
};

class FixtureMiss : public CompletionError {
public:
    using CompletionError::CompletionError;
};

struct ModelConfig {
    std::string endpoint = "https://api.openai.com";
    std::string path = "/v1/chat/completions";
    std::string model = "gpt-5-nano";
    std::string token_env = "OPENAI_API_KEY";
    std::string auth_header = "Authorization";
    std::string auth_prefix = "Bearer ";
    double timeout_s = 120.0;
    int max_retries = 3;
    int backoff_initial_ms = 1000;
    double requests_per_second = 2.0;
    std::map<std::string, std::string> sampling;  // forwarded into the request body

    /// Throws std::invalid_argument.
    void validate() const;
};

struct HttpRequest {
    std::string endpoint;
    std::string path;
    std::vector<std::pair<std::string, std::string>> headers;
    std::string body;
    double timeout_s = 60.0;
};

struct HttpResponse {
    int status = 0;
    std::string body;
    std::optional<double> retry_after_s;
};

/// Throws TransportError when no HTTP response could be obtained.
class Transport {
public:
    virtual ~Transport() = default;
    virtual HttpResponse post(const HttpRequest &request) = 0;
};

/// HTTP(S) transport on cpp-httplib.
std::shared_ptr<Transport> make_http_transport();

/// Token bucket: at most `rate` starts per second on average, bursts up to `burst`.
class RateLimiter {
public:
    explicit RateLimiter(double rate, double burst = 1.0);
    void acquire();

private:
    std::mutex mutex_;
    double rate_;
    double burst_;
    double tokens_;
    std::chrono::steady_clock::time_point last_;
};

struct Completion {
    std::string text;
    std::vector<Attempt> attempts;
};

using SleepFn = std::function<void(std::chrono::milliseconds)>;

/// Builds the chat-completion request body for one user message.
std::string chat_request_body(const std::string &prompt, const ModelConfig &config);
/// First choice's message content. Throws TransportError on malformed bodies.
std::string chat_response_text(const std::string &body);

/// Live completion with retries and exponential backoff. AuthError is raised
/// before any transport use when the token variable is unset or empty.
Completion complete(const std::string &prompt, const ModelConfig &config, Transport &transport, RateLimiter &limiter,
                    const SleepFn &sleep = {});

/// Recorded responses keyed by sha256(prompt '\0' model id).
class FixtureStore {
public:
    struct Entry {
        std::string digest;
        std::string model;
        std::string response;
    };

    static std::string digest(const std::string &prompt, const std::string &model);

    /// Throws std::runtime_error with the line number on malformed lines.
    static FixtureStore load(const std::filesystem::path &path);
    void save(const std::filesystem::path &path) const;

    void add(const std::string &prompt, const std::string &model, std::string response);
    std::optional<std::string> lookup(const std::string &prompt, const std::string &model) const;
    std::size_t size() const noexcept { return entries_.size(); }
    const std::map<std::string, Entry> &entries() const noexcept { return entries_; }

private:
    std::map<std::string, Entry> entries_;  // by digest
};

/// Replay completion; throws FixtureMiss.
Completion complete_replay(const std::string &prompt, const ModelConfig &config, const FixtureStore &fixtures);

std::int64_t now_ms();

}  // namespace cogref::refactor
