#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>
#include <vector>

namespace tracebench {

// Request parameters shared by every call of a run. Temperature defaults to
// 0 and everything is recorded: reproducibility is the harness's purpose.
struct ModelParams {
    std::string model_id{"claude-instant-v1"};
    double temperature{0.0};
    int max_output_tokens{1024};
};

struct CompletionRequest {
    std::string prompt;
    std::string model_id;
    double temperature{0.0};
    int max_output_tokens{1024};

    bool operator==(const CompletionRequest&) const = default;
};

CompletionRequest make_request(std::string prompt, const ModelParams& params);

// Canonical serialization: JSON object with sorted keys, independent of any
// config-file field ordering. Equal requests produce equal digests.
std::string canonical_request_json(const CompletionRequest& request);
std::string request_digest(const CompletionRequest& request);

struct CompletionRecord {
    std::string digest;  // request_digest(request)
    CompletionRequest request;
    std::string response_text;
    std::string provider;
    std::uint64_t elapsed_ms{0};
};

struct BackendResult {
    std::string response_text;
    std::string provider;
    std::uint64_t elapsed_ms{0};
};

class CompletionBackend {
public:
    virtual ~CompletionBackend() = default;
    virtual BackendResult complete(const CompletionRequest& request) = 0;
    virtual std::string label() const = 0;
};

// Test / scripting backend answering from a plain function.
class FunctionBackend final : public CompletionBackend {
public:
    using Fn = std::function<std::string(const CompletionRequest&)>;
    explicit FunctionBackend(Fn fn, std::string provider = "function");

    BackendResult complete(const CompletionRequest& request) override;
    std::string label() const override { return "function:" + provider_; }

private:
    Fn fn_;
    std::string provider_;
};

struct HttpOptions {
    int timeout_ms{60000};
    int transport_retries{1};  // retries on transport failure only, never on HTTP errors
};

// Minimal completion adapter: POST {model, prompt, temperature, max_tokens}
// to the configured endpoint, expect {"completion": "..."} back. The payload
// shape is private to this backend.
class HttpBackend final : public CompletionBackend {
public:
    HttpBackend(std::string endpoint_url, std::string api_key, HttpOptions options = {});

    // Reads TRACEBENCH_API_URL (required) and TRACEBENCH_API_KEY (optional).
    static std::shared_ptr<HttpBackend> from_env(HttpOptions options = {});

    BackendResult complete(const CompletionRequest& request) override;
    std::string label() const override { return "live"; }

private:
    std::string endpoint_url_;
    std::string api_key_;
    HttpOptions options_;
};

// Answers only requests present in a recorded archive; anything else is a
// hard replay-miss error, never a silent fallback.
class ReplayBackend final : public CompletionBackend {
public:
    explicit ReplayBackend(std::vector<CompletionRecord> records);
    static std::shared_ptr<ReplayBackend> from_archive(const std::filesystem::path& path);

    BackendResult complete(const CompletionRequest& request) override;
    std::string label() const override { return "replay"; }

private:
    std::map<std::string, CompletionRecord> records_;
};

// Newline-delimited records, one JSON object per line with fields
// {digest, elapsed_ms, provider, request, response_text}, sorted by digest.
void write_archive(const std::vector<CompletionRecord>& records,
                   const std::filesystem::path& path);
std::vector<CompletionRecord> load_archive(const std::filesystem::path& path);

struct GatewayOptions {
    int max_in_flight{4};
    bool cache{true};
};

// Shareable front door to a backend: content-addressed response cache plus a
// concurrency cap. Cache writes are serialized internally.
class Gateway {
public:
    explicit Gateway(std::shared_ptr<CompletionBackend> backend, GatewayOptions options = {});

    // Serves from cache on digest hit; otherwise calls the backend.
    std::string complete(const CompletionRequest& request);

    // Skips the cache lookup (bounded re-ask support); the new record
    // replaces any cached one.
    std::string complete_fresh(const CompletionRequest& request);

    void preload(const std::vector<CompletionRecord>& records);

    // One record per distinct digest, in digest order.
    std::vector<CompletionRecord> session_records() const;
    void write_session_archive(const std::filesystem::path& path) const;

    std::string backend_label() const { return backend_->label(); }
    int max_in_flight() const { return options_.max_in_flight; }

private:
    std::string run_backend(const CompletionRequest& request, const std::string& digest);

    std::shared_ptr<CompletionBackend> backend_;
    GatewayOptions options_;
    mutable std::mutex mutex_;
    std::map<std::string, CompletionRecord> cache_;
    std::counting_semaphore<> slots_;
};

}  // namespace tracebench
