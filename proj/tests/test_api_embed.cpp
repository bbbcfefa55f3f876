#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include "support.hpp"
#include "swirl/api_embed.hpp"

using namespace swirl;
using nlohmann::json;

namespace {

/// Deterministic fake vectors: component j of word w is len(w) + j / 10.
std::vector<float> fake_vector(const std::string& w, std::size_t dim) {
    std::vector<float> v(dim);
    for (std::size_t j = 0; j < dim; ++j) v[j] = static_cast<float>(w.size()) + static_cast<float>(j) / 10.0f;
    return v;
}

std::string fake_response(const std::string& body, std::size_t dim) {
    json req = json::parse(body);
    json data = json::array();
    std::size_t i = 0;
    for (const auto& w : req["input"]) data.push_back({{"index", i++}, {"embedding", fake_vector(w.get<std::string>(), dim)}});
    return json{{"data", data}}.dump();
}

RetryPolicy no_sleep() {
    RetryPolicy r;
    r.sleep = [](std::chrono::milliseconds) {};
    return r;
}

}  // namespace

TEST(ApiEmbed, ColdCacheWithoutKeyIsConfigError) {
    EmbedCache cache(testing_support::scratch_dir("api_nokey"));
    EmbedRequest req{{"hot", "cold"}, "text-embedding-3-small", 1000};
    EXPECT_THROW(embed_words(req, cache, std::nullopt), ConfigError);
    EXPECT_THROW(embed_words(req, cache, std::string()), ConfigError);
}

TEST(ApiEmbed, BatchesMissesAndFillsCache) {
    EmbedCache cache(testing_support::scratch_dir("api_batches"));
    std::vector<std::size_t> batch_sizes;
    EmbedTransport t = [&](const std::string& body) {
        json j = json::parse(body);
        EXPECT_EQ(j["model"], "text-embedding-3-small");
        EXPECT_EQ(j["encoding_format"], "float");
        batch_sizes.push_back(j["input"].size());
        return HttpResponse{200, fake_response(body, 1536)};
    };
    std::vector<std::string> words;
    for (int i = 0; i < 7; ++i) words.push_back("w" + std::string(static_cast<std::size_t>(i + 1), 'x'));
    EmbedRequest req{words, "text-embedding-3-small", 3};
    EmbeddingStore s = embed_words(req, cache, std::string("key"), t, no_sleep());
    EXPECT_EQ(batch_sizes, (std::vector<std::size_t>{3, 3, 1}));
    EXPECT_EQ(s.size(), 7u);
    EXPECT_EQ(s.dim(), 1536u);
    EXPECT_FLOAT_EQ(s.lookup(words[2])[1], static_cast<float>(words[2].size()) + 0.1f);

    // Warm cache: no key and no transport needed.
    EmbeddingStore again = embed_words(req, cache, std::nullopt);
    EXPECT_EQ(again.words(), s.words());
}

TEST(ApiEmbed, OnlyMissesAreRequested) {
    EmbedCache cache(testing_support::scratch_dir("api_partial"));
    std::vector<std::string> requested;
    EmbedTransport t = [&](const std::string& body) {
        const json req = json::parse(body);
        for (const auto& w : req["input"]) requested.push_back(w.get<std::string>());
        return HttpResponse{200, fake_response(body, 1536)};
    };
    embed_words({std::vector<std::string>{"a", "b"}, "text-embedding-3-small", 100}, cache, std::string("k"), t, no_sleep());
    requested.clear();
    EmbeddingStore s = embed_words({std::vector<std::string>{"b", "c", "a"}, "text-embedding-3-small", 100}, cache, std::string("k"), t, no_sleep());
    EXPECT_EQ(requested, std::vector<std::string>{"c"});
    EXPECT_EQ(s.words(), (std::vector<std::string>{"b", "c", "a"}));
}

TEST(ApiEmbed, RetriesServerErrorsWithBackoff) {
    EmbedCache cache(testing_support::scratch_dir("api_retry"));
    int calls = 0;
    std::vector<long> sleeps;
    RetryPolicy r;
    r.sleep = [&](std::chrono::milliseconds d) { sleeps.push_back(static_cast<long>(d.count())); };
    EmbedTransport t = [&](const std::string& body) {
        ++calls;
        if (calls == 1) return HttpResponse{503, "busy"};
        if (calls == 2) throw TransportError("reset");
        return HttpResponse{200, fake_response(body, 1536)};
    };
    EmbeddingStore s = embed_words({{"a"}, "text-embedding-3-small", 10}, cache, std::string("k"), t, r);
    EXPECT_EQ(calls, 3);
    EXPECT_EQ(sleeps, (std::vector<long>{1000, 4000}));
    EXPECT_EQ(s.size(), 1u);
}

TEST(ApiEmbed, GivesUpAfterThreeAttempts) {
    EmbedCache cache(testing_support::scratch_dir("api_giveup"));
    int calls = 0;
    EmbedTransport t = [&](const std::string&) {
        ++calls;
        return HttpResponse{500, ""};
    };
    EXPECT_THROW(embed_words({{"a"}, "text-embedding-3-small", 10}, cache, std::string("k"), t, no_sleep()), TransportError);
    EXPECT_EQ(calls, 3);
}

TEST(ApiEmbed, ClientErrorsAreNotRetried) {
    EmbedCache cache(testing_support::scratch_dir("api_4xx"));
    int calls = 0;
    EmbedTransport t = [&](const std::string&) {
        ++calls;
        return HttpResponse{401, "{\"error\":\"bad key\"}"};
    };
    EXPECT_THROW(embed_words({{"a"}, "text-embedding-3-small", 10}, cache, std::string("k"), t, no_sleep()), TransportError);
    EXPECT_EQ(calls, 1);
}

TEST(ApiEmbed, WrongDimensionIsDataError) {
    EmbedCache cache(testing_support::scratch_dir("api_dim"));
    EmbedTransport t = [&](const std::string& body) { return HttpResponse{200, fake_response(body, 10)}; };
    EXPECT_THROW(embed_words({{"a"}, "text-embedding-3-large", 10}, cache, std::string("k"), t, no_sleep()), DataError);
}

TEST(ApiEmbed, MalformedResponsesAreDataErrors) {
    EmbedCache cache(testing_support::scratch_dir("api_bad"));
    for (std::string body : {"not json", "{}", "{\"data\":[]}", "{\"data\":[{\"index\":5,\"embedding\":[1]}]}"}) {
        EmbedTransport t = [&](const std::string&) { return HttpResponse{200, body}; };
        EXPECT_THROW(embed_words({{"a"}, "text-embedding-3-small", 10}, cache, std::string("k"), t, no_sleep()), DataError)
            << body;
    }
}

TEST(ApiEmbed, CacheDimensionMismatchIsDataError) {
    auto dir = testing_support::scratch_dir("api_cache_dim");
    io::write_file_atomic(dir / "text-embedding-3-small.vec", "a 1 2 3\n");
    EmbedCache cache(dir);
    EXPECT_THROW(cache.load("text-embedding-3-small"), DataError);
}

TEST(ApiEmbed, BatchSizeBounds) {
    EmbedCache cache(testing_support::scratch_dir("api_bounds"));
    EXPECT_THROW(embed_words({{"a"}, "text-embedding-3-small", 0}, cache, std::string("k")), ParameterError);
    EXPECT_THROW(embed_words({{"a"}, "text-embedding-3-small", 4096}, cache, std::string("k")), ParameterError);
    EXPECT_THROW(embed_words({{}, "text-embedding-3-small", 10}, cache, std::string("k")), ParameterError);
}

TEST(ApiEmbed, HttpTransportAgainstLocalServer) {
    httplib::Server server;
    std::atomic<int> hits{0};
    std::string seen_auth;
    server.Post("/v1/embeddings", [&](const httplib::Request& req, httplib::Response& res) {
        ++hits;
        seen_auth = req.get_header_value("Authorization");
        if (hits == 1) {
            res.status = 500;
            return;
        }
        res.set_content(fake_response(req.body, 1536), "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port, 0);
    std::thread th([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    EmbedCache cache(testing_support::scratch_dir("api_http"));
    auto transport = make_http_transport("http://127.0.0.1:" + std::to_string(port), "secret");
    EmbeddingStore s = embed_words({std::vector<std::string>{"alpha", "beta"}, "text-embedding-3-small", 10}, cache, std::string("secret"),
                                   transport, no_sleep());
    server.stop();
    th.join();
    EXPECT_EQ(hits.load(), 2);
    EXPECT_EQ(seen_auth, "Bearer secret");
    EXPECT_EQ(s.size(), 2u);
    EXPECT_FLOAT_EQ(s.lookup("alpha")[0], 5.0f);
}

TEST(ApiEmbed, UnreachableServerIsTransportError) {
    EmbedCache cache(testing_support::scratch_dir("api_down"));
    // Port 9 (discard) on loopback: nothing listens in the test environment.
    auto transport = make_http_transport("http://127.0.0.1:9", "k");
    EXPECT_THROW(embed_words({{"a"}, "text-embedding-3-small", 10}, cache, std::string("k"), transport, no_sleep()),
                 TransportError);
}
