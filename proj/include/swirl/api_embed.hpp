#pragma once

// Client for a remote text-embedding endpoint with a persistent per-model
// cache. Cache files use the text vector format of embedstore.hpp.

#include <httplib.h>
// <resolv.h>, pulled in by httplib, defines `_res`, which collides with
// parameter names inside Eigen.
#ifdef _res
#undef _res
#endif
#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "swirl/embedstore.hpp"
#include "swirl/error.hpp"
#include "swirl/io.hpp"

namespace swirl {

inline constexpr const char* kApiKeyEnv = "OPENAI_API_KEY";

struct EmbedRequest {
    std::vector<std::string> words;
    std::string model_name;
    std::size_t batch_size = 1000;
};

/// Declared output width of the known models, or nullopt.
inline std::optional<std::size_t> expected_dimension(std::string_view model) {
    if (model == "text-embedding-3-small") return 1536;
    if (model == "text-embedding-3-large") return 3072;
    return std::nullopt;
}

inline EmbeddingSource api_source(std::string_view model) {
    return model == "text-embedding-3-large" ? EmbeddingSource::api_large : EmbeddingSource::api_small;
}

class EmbedCache {
public:
    explicit EmbedCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

    const std::filesystem::path& dir() const noexcept { return dir_; }

    std::filesystem::path file_for(std::string_view model) const {
        return dir_ / (std::string(model) + ".vec");
    }

    /// Cached vectors for `model`; nullopt when nothing is cached yet.
    std::optional<EmbeddingStore> load(std::string_view model) const {
        auto path = file_for(model);
        if (!std::filesystem::exists(path)) return std::nullopt;
        auto store = load_vectors_text(path, api_source(model));
        if (auto d = expected_dimension(model); d && store.dim() != *d)
            throw DataError("cache file '" + path.string() + "' has dimension " + std::to_string(store.dim()) +
                            ", model declares " + std::to_string(*d));
        return store;
    }

    void save(std::string_view model, const EmbeddingStore& store) const {
        io::write_file_atomic(file_for(model), to_vectors_text(store));
    }

private:
    std::filesystem::path dir_;
};

struct HttpResponse {
    int status = 0;
    std::string body;
};

/// Sends one JSON request body; throws on connection failure.
using EmbedTransport = std::function<HttpResponse(const std::string& body)>;

/// HTTPS (or plain HTTP) POST to `base_url` + `path` with a bearer token.
inline EmbedTransport make_http_transport(std::string base_url, std::string api_key,
                                          std::string path = "/v1/embeddings") {
    return [base_url = std::move(base_url), api_key = std::move(api_key),
            path = std::move(path)](const std::string& body) {
        httplib::Client client(base_url);
        client.set_connection_timeout(30);
        client.set_read_timeout(120);
        httplib::Headers headers{{"Authorization", "Bearer " + api_key}};
        auto res = client.Post(path, headers, body, "application/json");
        if (!res) throw TransportError("embedding request failed: " + httplib::to_string(res.error()));
        return HttpResponse{res->status, res->body};
    };
}

struct RetryPolicy {
    int max_attempts = 3;
    /// Delay before attempt i+1 after attempt i failed.
    std::vector<std::chrono::milliseconds> backoff{std::chrono::seconds(1), std::chrono::seconds(4),
                                                   std::chrono::seconds(16)};
    std::function<void(std::chrono::milliseconds)> sleep = [](std::chrono::milliseconds d) {
        std::this_thread::sleep_for(d);
    };
};

namespace detail {

inline std::vector<std::vector<float>> parse_embedding_response(const std::string& body, std::size_t expected_count) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("embedding response is not JSON: ") + e.what());
    }
    if (!j.contains("data") || !j["data"].is_array()) throw DataError("embedding response lacks a data array");
    std::vector<std::vector<float>> out(expected_count);
    std::vector<bool> filled(expected_count, false);
    std::size_t pos = 0;
    for (const auto& item : j["data"]) {
        std::size_t idx = item.contains("index") ? item["index"].get<std::size_t>() : pos;
        ++pos;
        if (idx >= expected_count || filled[idx]) throw DataError("embedding response has a bad index");
        out[idx] = item.at("embedding").get<std::vector<float>>();
        filled[idx] = true;
    }
    if (pos != expected_count)
        throw DataError("embedding response has " + std::to_string(pos) + " items, expected " +
                        std::to_string(expected_count));
    return out;
}

}  // namespace detail

/// Vectors for every requested word. Cached words are served locally; misses
/// are fetched in batches of `req.batch_size`, and the cache file is rewritten
/// after each batch. `transport` is only invoked for misses.
inline EmbeddingStore embed_words(const EmbedRequest& req, const EmbedCache& cache,
                                  const std::optional<std::string>& credentials, EmbedTransport transport = {},
                                  const RetryPolicy& retry = {}) {
    if (req.words.empty()) throw ParameterError("embed_words: no words requested");
    if (req.batch_size == 0 || req.batch_size > 2048)
        throw ParameterError("embed_words: batch_size must be in [1, 2048]");

    const auto declared = expected_dimension(req.model_name);
    EmbeddingStore cached = cache.load(req.model_name).value_or(EmbeddingStore{});

    std::vector<std::string> misses;
    std::unordered_set<std::string> seen;
    for (const auto& w : req.words)
        if (seen.insert(w).second && (cached.dim() == 0 || !cached.contains(w))) misses.push_back(w);

    if (!misses.empty()) {
        if (!credentials || credentials->empty())
            throw ConfigError(std::to_string(misses.size()) + " words are not cached for " + req.model_name +
                              " and no API key is set (" + kApiKeyEnv + ")");
        if (!transport) throw ConfigError("embed_words: no transport configured");
    }

    for (std::size_t start = 0; start < misses.size(); start += req.batch_size) {
        const std::size_t end = std::min(misses.size(), start + req.batch_size);
        std::vector<std::string> batch(misses.begin() + static_cast<std::ptrdiff_t>(start),
                                       misses.begin() + static_cast<std::ptrdiff_t>(end));
        const std::string body =
            nlohmann::json{{"model", req.model_name}, {"input", batch}, {"encoding_format", "float"}}.dump();

        std::optional<HttpResponse> ok;
        std::string last_error;
        for (int attempt = 0; attempt < retry.max_attempts; ++attempt) {
            if (attempt > 0 && retry.sleep) {
                auto i = static_cast<std::size_t>(attempt - 1);
                retry.sleep(i < retry.backoff.size() ? retry.backoff[i] : retry.backoff.back());
            }
            try {
                HttpResponse res = transport(body);
                if (res.status >= 200 && res.status < 300) {
                    ok = std::move(res);
                    break;
                }
                last_error = "HTTP " + std::to_string(res.status);
                // Client errors other than rate limiting will not succeed on retry.
                if (res.status >= 400 && res.status < 500 && res.status != 429 && res.status != 408) break;
            } catch (const TransportError& e) {
                last_error = e.what();
            }
        }
        if (!ok) throw TransportError("embedding batch failed for " + req.model_name + ": " + last_error);

        auto vectors = detail::parse_embedding_response(ok->body, batch.size());
        const std::size_t dim = vectors.front().size();
        if (declared && dim != *declared)
            throw DataError("model " + req.model_name + " returned dimension " + std::to_string(dim) +
                            ", expected " + std::to_string(*declared));
        if (cached.dim() == 0) cached = EmbeddingStore(dim, api_source(req.model_name));
        for (std::size_t i = 0; i < batch.size(); ++i) {
            if (vectors[i].size() != cached.dim())
                throw DataError("inconsistent dimension in response for '" + batch[i] + "'");
            cached.add(batch[i], vectors[i]);
        }
        cache.save(req.model_name, cached);
    }

    return restrict_store(cached, req.words);
}

}  // namespace swirl
