#pragma once

#include "eventflow/domain.hpp"
#include "eventflow/mock_llm.hpp"
#include "eventflow/prompts.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <vector>

namespace eventflow {

enum class GatewayMode { remote, mock };

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds base_backoff{500};
};

struct GatewayConfig {
    std::string endpoint_url = "https://api.openai.com/v1/chat/completions";
    std::string model_name = "gpt-4";
    double temperature = 0.0;
    int max_in_flight = 4;
    RetryPolicy retry;
    GatewayMode mode = GatewayMode::mock;
    /// Environment variable holding the bearer token for remote mode.
    std::string api_key_env = "OPENAI_API_KEY";
    std::chrono::seconds timeout{60};

    void validate() const;
};

/// Delay before attempt k+1 (k = 1 .. max_attempts-1): base * 2^(k-1).
std::vector<std::chrono::milliseconds> backoff_schedule(const RetryPolicy& retry);

struct HttpRequest {
    std::string url;
    std::map<std::string, std::string> headers;
    std::string body;
};

struct HttpResponse {
    int status = 0;  ///< 0 means transport failure
    std::string body;
    std::string transport_error;
};

/// Bounded concurrency with first-come first-served admission.
class FairLimiter {
public:
    explicit FairLimiter(int limit);

    void acquire();
    void release();
    int in_flight() const;

private:
    mutable std::mutex mutex_;
    std::condition_variable cv_;
    int limit_;
    int active_ = 0;
    std::uint64_t next_ticket_ = 0;
    std::uint64_t serving_ = 0;
};

/// Chat-completion client with an offline mock mode. Safe to call from
/// several threads; remote calls are throttled to `max_in_flight`.
class LlmGateway {
public:
    using Transport = std::function<HttpResponse(const HttpRequest&)>;
    using Sleeper = std::function<void(std::chrono::milliseconds)>;

    explicit LlmGateway(GatewayConfig config, MockRuleSet rules = default_mock_rules());

    /// Sends `prompt` as a single user message and returns the first
    /// completion's text. Throws GatewayError once retries are exhausted.
    std::string complete(const std::string& prompt);

    const GatewayConfig& config() const { return config_; }
    const MockRuleSet& mock_rules() const { return rules_; }
    /// Requests issued to the transport, retries included.
    std::uint64_t requests_sent() const { return requests_sent_.load(); }

    /// Test seams: replace the HTTP transport or the backoff sleep.
    void set_transport(Transport transport) { transport_ = std::move(transport); }
    void set_sleeper(Sleeper sleeper) { sleeper_ = std::move(sleeper); }

    /// JSON body for the chat-completion request.
    std::string request_body(const std::string& prompt) const;
    /// Extracts choices[0].message.content; throws GatewayError otherwise.
    static std::string parse_response(const std::string& body);

private:
    std::string complete_remote(const std::string& prompt);

    GatewayConfig config_;
    MockRuleSet rules_;
    Transport transport_;
    Sleeper sleeper_;
    FairLimiter limiter_;
    std::atomic<std::uint64_t> requests_sent_{0};
};

/// Default transport built on cpp-httplib (http and https).
HttpResponse http_post(const HttpRequest& request, std::chrono::seconds timeout);

/// Prompt 4. Returns true for "Yes", false for "No"; any other answer raises
/// UnparseableAnswer.
bool relevance_check(const Event& event, const Post& post, LlmGateway& gateway,
                     std::string_view study_area = "Hong Kong");

/// Strict yes/no reading of a model answer (case-insensitive, trailing
/// punctuation and quotes ignored).
bool parse_yes_no(const std::string& answer);

}  // namespace eventflow
