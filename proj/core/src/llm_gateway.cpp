#include "eventflow/llm_gateway.hpp"

#include "eventflow/error.hpp"
#include "eventflow/text.hpp"

#include <fmt/format.h>
#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <thread>

namespace eventflow {

void GatewayConfig::validate() const {
    if (retry.max_attempts < 1) throw ConfigError("llm_gateway", "retry.max_attempts must be >= 1");
    if (retry.base_backoff.count() < 0) throw ConfigError("llm_gateway", "retry.base_backoff must be >= 0");
    if (!(temperature >= 0.0)) throw ConfigError("llm_gateway", "temperature must be >= 0");
    if (max_in_flight < 1) throw ConfigError("llm_gateway", "max_in_flight must be >= 1");
    if (mode == GatewayMode::remote && endpoint_url.empty()) {
        throw ConfigError("llm_gateway", "endpoint_url is required in remote mode");
    }
}

std::vector<std::chrono::milliseconds> backoff_schedule(const RetryPolicy& retry) {
    std::vector<std::chrono::milliseconds> delays;
    auto delay = retry.base_backoff;
    for (int k = 1; k < retry.max_attempts; ++k) {
        delays.push_back(delay);
        delay *= 2;
    }
    return delays;
}

FairLimiter::FairLimiter(int limit) : limit_(std::max(1, limit)) {}

void FairLimiter::acquire() {
    std::unique_lock lock(mutex_);
    const std::uint64_t ticket = next_ticket_++;
    cv_.wait(lock, [&] { return ticket == serving_ && active_ < limit_; });
    ++active_;
    ++serving_;
    cv_.notify_all();
}

void FairLimiter::release() {
    {
        std::lock_guard lock(mutex_);
        --active_;
    }
    cv_.notify_all();
}

int FairLimiter::in_flight() const {
    std::lock_guard lock(mutex_);
    return active_;
}

LlmGateway::LlmGateway(GatewayConfig config, MockRuleSet rules)
    : config_(std::move(config)), rules_(std::move(rules)), limiter_(config_.max_in_flight) {
    config_.validate();
    rules_.validate();
    const auto timeout = config_.timeout;
    transport_ = [timeout](const HttpRequest& request) { return http_post(request, timeout); };
    sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::string LlmGateway::request_body(const std::string& prompt) const {
    nlohmann::json body = {
        {"model", config_.model_name},
        {"temperature", config_.temperature},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
    };
    return body.dump();
}

std::string LlmGateway::parse_response(const std::string& body) {
    try {
        const auto json = nlohmann::json::parse(body);
        const auto& content = json.at("choices").at(0).at("message").at("content");
        return content.get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw GatewayError(fmt::format("malformed chat-completion response: {}", e.what()), 0, body);
    }
}

std::string LlmGateway::complete(const std::string& prompt) {
    if (config_.mode == GatewayMode::mock) return mock_complete(prompt, rules_);
    limiter_.acquire();
    try {
        auto out = complete_remote(prompt);
        limiter_.release();
        return out;
    } catch (...) {
        limiter_.release();
        throw;
    }
}

std::string LlmGateway::complete_remote(const std::string& prompt) {
    HttpRequest request;
    request.url = config_.endpoint_url;
    request.body = request_body(prompt);
    request.headers["Content-Type"] = "application/json";
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key != nullptr && *key != '\0') {
        request.headers["Authorization"] = fmt::format("Bearer {}", key);
    }

    const auto delays = backoff_schedule(config_.retry);
    std::string last_cause;
    int last_status = 0;
    int attempts = 0;
    for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
        attempts = attempt;
        spdlog::debug("llm request attempt {} to {} (Authorization: Bearer ***): {}", attempt, request.url,
                      request.body);
        ++requests_sent_;
        const HttpResponse response = transport_(request);
        spdlog::debug("llm response status {}: {}", response.status, response.body);
        if (response.status == 200) return parse_response(response.body);

        last_status = response.status;
        last_cause = response.status == 0 ? fmt::format("transport failure: {}", response.transport_error)
                                          : fmt::format("HTTP {}: {}", response.status, response.body);
        const bool retryable = response.status == 0 || response.status == 429 || response.status >= 500;
        if (!retryable) break;
        if (attempt < config_.retry.max_attempts) sleeper_(delays[static_cast<std::size_t>(attempt - 1)]);
    }
    throw GatewayError(fmt::format("chat completion failed after {} request(s): {}", attempts, last_cause),
                       last_status);
}

HttpResponse http_post(const HttpRequest& request, std::chrono::seconds timeout) {
    // split "scheme://host[:port]/path"
    const auto scheme_end = request.url.find("://");
    if (scheme_end == std::string::npos) return {0, {}, fmt::format("invalid endpoint url '{}'", request.url)};
    const auto path_start = request.url.find('/', scheme_end + 3);
    const std::string origin = request.url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : request.url.substr(path_start);

    httplib::Client client(origin);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers headers;
    std::string content_type = "application/json";
    for (const auto& [name, value] : request.headers) {
        if (name == "Content-Type") {
            content_type = value;
        } else {
            headers.emplace(name, value);
        }
    }
    auto result = client.Post(path, headers, request.body, content_type);
    if (!result) return {0, {}, httplib::to_string(result.error())};
    return {result->status, result->body, {}};
}

bool parse_yes_no(const std::string& answer) {
    std::string a = text::fold(answer);
    while (!a.empty() && (a.back() == '.' || a.back() == '!' || a.back() == '"' || a.back() == '\'')) a.pop_back();
    while (!a.empty() && (a.front() == '"' || a.front() == '\'')) a.erase(a.begin());
    a = text::trim(a);
    if (a == "yes") return true;
    if (a == "no") return false;
    throw UnparseableAnswer(fmt::format("expected Yes or No, got '{}'", answer), answer);
}

bool relevance_check(const Event& event, const Post& post, LlmGateway& gateway, std::string_view study_area) {
    if (event.summary.empty()) throw PreconditionError("llm_gateway", "relevance_check needs an event summary");
    if (post.title.empty() && post.content.empty()) {
        throw PreconditionError("llm_gateway", "relevance_check needs a post title or content");
    }
    const Bindings bindings{
        {"post_id", post.post_id},
        {"event_title", event.title},
        {"event_type", std::string(prompt_label(event.event_type))},
        {"summary", event.summary},
        {"post_title", post.title},
        {"post_content", post.content},
        {"post_geotags", fmt::format("{}", fmt::join(post.geotags, ", "))},
        {"post_hashtags", fmt::format("{}", fmt::join(post.hashtags, " "))},
        {"study_area", std::string(study_area)},
    };
    return parse_yes_no(gateway.complete(render(TemplateId::P4_relevance, bindings)));
}

}  // namespace eventflow
