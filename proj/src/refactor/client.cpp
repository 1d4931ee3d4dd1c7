#include "cogref/refactor/client.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <json.hpp>

namespace cogref::refactor {

using nlohmann::json;

std::int64_t now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
        .count();
}

void ModelConfig::validate() const {
    if (!(timeout_s > 0))
        throw std::invalid_argument("model timeout must be positive");
    if (max_retries < 0)
        throw std::invalid_argument("max retries must be non-negative");
    if (!(requests_per_second > 0))
        throw std::invalid_argument("request rate must be positive");
    if (model.empty())
        throw std::invalid_argument("model identifier is empty");
}

RateLimiter::RateLimiter(double rate, double burst)
    : rate_(rate), burst_(burst), tokens_(burst), last_(std::chrono::steady_clock::now()) {
    if (!(rate > 0) || !(burst >= 1))
        throw std::invalid_argument("rate limiter needs rate > 0 and burst >= 1");
}

void RateLimiter::acquire() {
    double wait_s = 0;
    {
        std::lock_guard lock(mutex_);
        const auto now = std::chrono::steady_clock::now();
        tokens_ = std::min(burst_, tokens_ + std::chrono::duration<double>(now - last_).count() * rate_);
        last_ = now;
        tokens_ -= 1.0;
        if (tokens_ < 0)
            wait_s = -tokens_ / rate_;
    }
    if (wait_s > 0)
        std::this_thread::sleep_for(std::chrono::duration<double>(wait_s));
}

std::string chat_request_body(const std::string &prompt, const ModelConfig &config) {
    json body;
    body["model"] = config.model;
    body["messages"] = json::array({{{"role", "user"}, {"content", prompt}}});
    for (const auto &[key, value] : config.sampling) {
        // numbers and booleans go over the wire typed
        json parsed = json::parse(value, nullptr, false);
        body[key] = parsed.is_discarded() || parsed.is_object() || parsed.is_array() ? json(value) : parsed;
    }
    return body.dump();
}

std::string chat_response_text(const std::string &body) {
    const json doc = json::parse(body, nullptr, false);
    if (doc.is_discarded())
        throw TransportError("response body is not JSON");
    try {
        return doc.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception &e) {
        throw TransportError(std::string("unexpected response shape: ") + e.what());
    }
}

Completion complete(const std::string &prompt, const ModelConfig &config, Transport &transport, RateLimiter &limiter,
                    const SleepFn &sleep) {
    config.validate();
    const char *token = std::getenv(config.token_env.c_str());
    if (token == nullptr || *token == '\0')
        throw AuthError("environment variable " + config.token_env + " is not set");

    HttpRequest req;
    req.endpoint = config.endpoint;
    req.path = config.path;
    req.headers = {{config.auth_header, config.auth_prefix + token}, {"Content-Type", "application/json"}};
    req.body = chat_request_body(prompt, config);
    req.timeout_s = config.timeout_s;

    const SleepFn pause = sleep ? sleep : [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    Completion out;
    bool rate_limited = false;
    for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
        limiter.acquire();
        Attempt a;
        a.started_ms = now_ms();
        std::optional<HttpResponse> resp;
        try {
            resp = transport.post(req);
        } catch (const TransportError &e) {
            a.error = e.what();
        }
        a.finished_ms = now_ms();
        rate_limited = resp && resp->status == 429;
        if (resp) {
            a.status = resp->status;
            if (resp->status == 200) {
                out.attempts.push_back(std::move(a));
                try {
                    out.text = chat_response_text(resp->body);
                } catch (const TransportError &e) {
                    throw TransportError(e.what(), out.attempts);
                }
                return out;
            }
            a.error = "HTTP " + std::to_string(resp->status);
            if (resp->status == 401 || resp->status == 403) {
                out.attempts.push_back(std::move(a));
                throw AuthError("endpoint rejected the credentials (" + out.attempts.back().error + ")", out.attempts);
            }
            if (resp->status != 429 && resp->status < 500) {
                out.attempts.push_back(std::move(a));
                throw TransportError("request failed with " + out.attempts.back().error, out.attempts);
            }
        }
        out.attempts.push_back(std::move(a));
        if (attempt == config.max_retries)
            break;
        auto delay = std::chrono::milliseconds(
            static_cast<std::int64_t>(config.backoff_initial_ms * std::pow(2.0, attempt)));
        if (resp && resp->retry_after_s)
            delay = std::max(delay, std::chrono::milliseconds(static_cast<std::int64_t>(*resp->retry_after_s * 1000)));
        pause(delay);
    }
    const std::string summary =
        "giving up after " + std::to_string(out.attempts.size()) + " attempts: " + out.attempts.back().error;
    if (rate_limited)
        throw RateLimited(summary, out.attempts);
    throw TransportError(summary, out.attempts);
}

std::string FixtureStore::digest(const std::string &prompt, const std::string &model) {
    std::string input = prompt;
    input.push_back('\0');
    input += model;
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(input.data(), input.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex.push_back(kHex[md[i] >> 4]);
        hex.push_back(kHex[md[i] & 0xf]);
    }
    return hex;
}

FixtureStore FixtureStore::load(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read fixture file " + path.string());
    FixtureStore store;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        const json doc = json::parse(line, nullptr, false);
        if (doc.is_discarded() || !doc.is_object() || !doc.contains("digest") || !doc.contains("model") ||
            !doc.contains("response"))
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": malformed fixture record");
        Entry e{doc["digest"].get<std::string>(), doc["model"].get<std::string>(), doc["response"].get<std::string>()};
        store.entries_[e.digest] = std::move(e);
    }
    return store;
}

void FixtureStore::save(const std::filesystem::path &path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write fixture file " + path.string());
    for (const auto &[digest, e] : entries_)
        out << json{{"digest", e.digest}, {"model", e.model}, {"response", e.response}}.dump() << '\n';
}

void FixtureStore::add(const std::string &prompt, const std::string &model, std::string response) {
    const std::string d = digest(prompt, model);
    entries_[d] = {d, model, std::move(response)};
}

std::optional<std::string> FixtureStore::lookup(const std::string &prompt, const std::string &model) const {
    auto it = entries_.find(digest(prompt, model));
    if (it == entries_.end())
        return std::nullopt;
    return it->second.response;
}

Completion complete_replay(const std::string &prompt, const ModelConfig &config, const FixtureStore &fixtures) {
    Completion out;
    Attempt a;
    a.started_ms = now_ms();
    auto hit = fixtures.lookup(prompt, config.model);
    a.finished_ms = now_ms();
    if (!hit)
        throw FixtureMiss("no recorded response for digest " + FixtureStore::digest(prompt, config.model));
    a.status = 200;
    out.text = std::move(*hit);
    out.attempts.push_back(std::move(a));
    return out;
}

}  // namespace cogref::refactor
