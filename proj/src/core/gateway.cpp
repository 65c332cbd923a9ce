#include "core/gateway.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "core/digest.hpp"
#include "core/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace tracebench {

namespace {

json request_to_json(const CompletionRequest& request) {
    json j;
    j["max_output_tokens"] = request.max_output_tokens;
    j["model_id"] = request.model_id;
    j["prompt"] = request.prompt;
    j["temperature"] = request.temperature;
    return j;
}

CompletionRequest request_from_json(const json& j) {
    CompletionRequest request;
    request.prompt = j.at("prompt").get<std::string>();
    request.model_id = j.at("model_id").get<std::string>();
    request.temperature = j.at("temperature").get<double>();
    request.max_output_tokens = j.at("max_output_tokens").get<int>();
    return request;
}

}  // namespace

CompletionRequest make_request(std::string prompt, const ModelParams& params) {
    if (prompt.empty()) {
        fail(ErrorCode::validation, "empty prompt");
    }
    CompletionRequest request;
    request.prompt = std::move(prompt);
    request.model_id = params.model_id;
    request.temperature = params.temperature;
    request.max_output_tokens = params.max_output_tokens;
    return request;
}

std::string canonical_request_json(const CompletionRequest& request) {
    return request_to_json(request).dump();
}

std::string request_digest(const CompletionRequest& request) {
    return sha256_hex(canonical_request_json(request));
}

FunctionBackend::FunctionBackend(Fn fn, std::string provider)
    : fn_(std::move(fn)), provider_(std::move(provider)) {}

BackendResult FunctionBackend::complete(const CompletionRequest& request) {
    return {fn_(request), provider_, 0};
}

HttpBackend::HttpBackend(std::string endpoint_url, std::string api_key, HttpOptions options)
    : endpoint_url_(std::move(endpoint_url)), api_key_(std::move(api_key)), options_(options) {}

std::shared_ptr<HttpBackend> HttpBackend::from_env(HttpOptions options) {
    const char* url = std::getenv("TRACEBENCH_API_URL");
    if (url == nullptr || *url == '\0') {
        fail(ErrorCode::config, "live backend requires TRACEBENCH_API_URL");
    }
    const char* key = std::getenv("TRACEBENCH_API_KEY");
    return std::make_shared<HttpBackend>(url, key != nullptr ? key : "", options);
}

BackendResult HttpBackend::complete(const CompletionRequest& request) {
    // endpoint_url_ = scheme://host[:port][/path]
    const auto scheme_end = endpoint_url_.find("://");
    if (scheme_end == std::string::npos) {
        fail(ErrorCode::config, "malformed endpoint url: " + endpoint_url_);
    }
    const auto path_start = endpoint_url_.find('/', scheme_end + 3);
    const std::string base = path_start == std::string::npos
                                 ? endpoint_url_
                                 : endpoint_url_.substr(0, path_start);
    const std::string path = path_start == std::string::npos
                                 ? std::string("/")
                                 : endpoint_url_.substr(path_start);

    json payload;
    payload["model"] = request.model_id;
    payload["prompt"] = request.prompt;
    payload["temperature"] = request.temperature;
    payload["max_tokens"] = request.max_output_tokens;
    const std::string body = payload.dump();

    httplib::Headers headers;
    if (!api_key_.empty()) {
        headers.emplace("Authorization", "Bearer " + api_key_);
    }

    const auto start = std::chrono::steady_clock::now();
    httplib::Result result;
    std::string transport_error;
    for (int attempt = 0; attempt <= options_.transport_retries; ++attempt) {
        httplib::Client client(base);
        client.set_connection_timeout(0, options_.timeout_ms * 1000LL);
        client.set_read_timeout(0, options_.timeout_ms * 1000LL);
        client.set_write_timeout(0, options_.timeout_ms * 1000LL);
        result = client.Post(path, headers, body, "application/json");
        if (result) {
            break;
        }
        transport_error = httplib::to_string(result.error());
    }
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();

    if (!result) {
        if (result.error() == httplib::Error::ConnectionTimeout ||
            result.error() == httplib::Error::Read || result.error() == httplib::Error::Write) {
            fail(ErrorCode::provider, "timeout: " + transport_error);
        }
        fail(ErrorCode::provider, "transport failure: " + transport_error);
    }
    if (result->status / 100 != 2) {
        std::string snippet = result->body.substr(0, 200);
        fail(ErrorCode::provider,
             "provider error: status " + std::to_string(result->status) + ": " + snippet);
    }

    json response;
    try {
        response = json::parse(result->body);
    } catch (const json::exception& e) {
        fail(ErrorCode::provider, std::string("malformed provider response: ") + e.what());
    }
    if (!response.contains("completion") || !response["completion"].is_string()) {
        fail(ErrorCode::provider, "malformed provider response: missing 'completion'");
    }
    return {response["completion"].get<std::string>(), "http",
            static_cast<std::uint64_t>(elapsed)};
}

ReplayBackend::ReplayBackend(std::vector<CompletionRecord> records) {
    for (auto& record : records) {
        records_.emplace(record.digest, std::move(record));
    }
}

std::shared_ptr<ReplayBackend> ReplayBackend::from_archive(const fs::path& path) {
    return std::make_shared<ReplayBackend>(load_archive(path));
}

BackendResult ReplayBackend::complete(const CompletionRequest& request) {
    const std::string digest = request_digest(request);
    auto it = records_.find(digest);
    if (it == records_.end()) {
        fail(ErrorCode::provider, "replay miss: " + digest);
    }
    return {it->second.response_text, it->second.provider, it->second.elapsed_ms};
}

void write_archive(const std::vector<CompletionRecord>& records, const fs::path& path) {
    std::map<std::string, const CompletionRecord*> by_digest;
    for (const auto& record : records) {
        by_digest[record.digest] = &record;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        fail(ErrorCode::io, "cannot write archive: " + path.string());
    }
    for (const auto& [digest, record] : by_digest) {
        json line;
        line["digest"] = digest;
        line["elapsed_ms"] = record->elapsed_ms;
        line["provider"] = record->provider;
        line["request"] = request_to_json(record->request);
        line["response_text"] = record->response_text;
        out << line.dump() << "\n";
    }
    if (!out) {
        fail(ErrorCode::io, "write failed: " + path.string());
    }
}

std::vector<CompletionRecord> load_archive(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::io, "cannot read archive: " + path.string());
    }
    std::vector<CompletionRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            fail(ErrorCode::validation, "malformed archive line " + std::to_string(line_no) +
                                            " in " + path.string() + ": " + e.what());
        }
        CompletionRecord record;
        record.digest = j.at("digest").get<std::string>();
        record.request = request_from_json(j.at("request"));
        record.response_text = j.at("response_text").get<std::string>();
        record.provider = j.at("provider").get<std::string>();
        record.elapsed_ms = j.at("elapsed_ms").get<std::uint64_t>();
        if (record.digest != request_digest(record.request)) {
            fail(ErrorCode::validation, "archive digest mismatch at line " +
                                            std::to_string(line_no) + " in " + path.string());
        }
        records.push_back(std::move(record));
    }
    return records;
}

Gateway::Gateway(std::shared_ptr<CompletionBackend> backend, GatewayOptions options)
    : backend_(std::move(backend)),
      options_(options),
      slots_(std::max(1, options.max_in_flight)) {}

std::string Gateway::complete(const CompletionRequest& request) {
    const std::string digest = request_digest(request);
    if (options_.cache) {
        std::lock_guard lock(mutex_);
        auto it = cache_.find(digest);
        if (it != cache_.end()) {
            return it->second.response_text;
        }
    }
    return run_backend(request, digest);
}

std::string Gateway::complete_fresh(const CompletionRequest& request) {
    return run_backend(request, request_digest(request));
}

std::string Gateway::run_backend(const CompletionRequest& request, const std::string& digest) {
    slots_.acquire();
    BackendResult result;
    try {
        result = backend_->complete(request);
    } catch (...) {
        slots_.release();
        throw;
    }
    slots_.release();

    CompletionRecord record{digest, request, result.response_text, result.provider,
                            result.elapsed_ms};
    std::lock_guard lock(mutex_);
    cache_[digest] = record;  // last response wins for repeated fresh calls
    return record.response_text;
}

void Gateway::preload(const std::vector<CompletionRecord>& records) {
    std::lock_guard lock(mutex_);
    for (const auto& record : records) {
        cache_[record.digest] = record;
    }
}

std::vector<CompletionRecord> Gateway::session_records() const {
    std::lock_guard lock(mutex_);
    std::vector<CompletionRecord> records;
    records.reserve(cache_.size());
    for (const auto& [digest, record] : cache_) {
        records.push_back(record);
    }
    return records;
}

void Gateway::write_session_archive(const fs::path& path) const {
    write_archive(session_records(), path);
}

}  // namespace tracebench
