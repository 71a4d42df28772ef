#include "w2i/error.hpp"
#include "w2i/json_extract.hpp"
#include "w2i/live_backend.hpp"
#include "w2i/mock_backend.hpp"

#include <httplib.h>
#include <gtest/gtest.h>

#include <atomic>
#include <thread>

namespace w2i {
namespace {

HttpOptions fast() {
    HttpOptions o;
    o.retry.initial_backoff = std::chrono::milliseconds(1);
    o.timeout = std::chrono::seconds(5);
    return o;
}

// Local HTTP server running on a background thread for the lifetime of the
// fixture.
class LocalServer : public ::testing::Test {
protected:
    void SetUp() override {
        port = server.bind_to_any_port("127.0.0.1");
        ASSERT_GT(port, 0);
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    void TearDown() override {
        server.stop();
        if (thread.joinable()) thread.join();
    }
    std::string base() const { return "http://127.0.0.1:" + std::to_string(port); }

    httplib::Server server;
    std::thread thread;
    int port = 0;
    std::atomic<int> hits{0};
};

TEST(SplitUrl, OriginAndPrefix) {
    EXPECT_EQ(split_url("https://api.example.com/v1/"), (std::pair<std::string, std::string>{"https://api.example.com", "/v1"}));
    EXPECT_EQ(split_url("http://h:8080"), (std::pair<std::string, std::string>{"http://h:8080", ""}));
    EXPECT_THROW(split_url("ftp://h/x"), ConfigError);
    EXPECT_THROW(split_url("nope"), ConfigError);
}

TEST(HttpLlmTest, MissingKeyFailsBeforeNetwork) {
    // Port 9 on localhost is never contacted: the key check comes first.
    HttpLlm llm("http://127.0.0.1:9", "", "m", fast());
    EXPECT_THROW(llm.complete(LlmRequest::make(LlmRole::grader, "x")), AuthError);
}

TEST_F(LocalServer, LlmSendsChatCompletionWithImages) {
    Json seen;
    std::string auth;
    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        seen = Json::parse(req.body);
        auth = req.get_header_value("Authorization");
        res.set_content(R"({"choices":[{"message":{"content":"hello"}}]})", "application/json");
    });
    HttpLlm llm(base() + "/v1", "secret", "model-x", fast());
    const auto img = ImageArtifact::generated(MockGenerator::synthesize("a"), 0);
    const auto r = llm.complete(LlmRequest::make(LlmRole::grader, "judge this", {img}));
    EXPECT_EQ(r.text, "hello");
    EXPECT_EQ(r.attempts, 1);
    EXPECT_EQ(auth, "Bearer secret");
    EXPECT_EQ(seen["model"], "model-x");
    const auto& content = seen["messages"][0]["content"];
    ASSERT_EQ(content.size(), 2u);
    EXPECT_EQ(content[0]["text"], "judge this");
    EXPECT_EQ(content[1]["image_url"]["url"].get<std::string>().rfind("data:image/png;base64,", 0), 0u);
}

TEST_F(LocalServer, LlmRetriesServerErrors) {
    server.Post("/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        if (++hits < 3) {
            res.status = 503;
            return;
        }
        res.set_content(R"({"choices":[{"message":{"content":"ok"}}]})", "application/json");
    });
    HttpLlm llm(base(), "k", "m", fast());
    const auto r = llm.complete(LlmRequest::make(LlmRole::grader, "x"));
    EXPECT_EQ(r.text, "ok");
    EXPECT_EQ(r.attempts, 3);
}

TEST_F(LocalServer, LlmGivesUpAfterThreeAttempts) {
    server.Post("/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 500;
    });
    HttpLlm llm(base(), "k", "m", fast());
    EXPECT_THROW(llm.complete(LlmRequest::make(LlmRole::grader, "x")), TransportError);
    EXPECT_EQ(hits, 3);
}

TEST_F(LocalServer, LlmRateLimitedAfterRetries) {
    server.Post("/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 429;
    });
    HttpLlm llm(base(), "k", "m", fast());
    EXPECT_THROW(llm.complete(LlmRequest::make(LlmRole::grader, "x")), RateLimited);
    EXPECT_EQ(hits, 3);
}

TEST_F(LocalServer, AuthFailureIsNotRetried) {
    server.Post("/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 401;
    });
    HttpLlm llm(base(), "k", "m", fast());
    EXPECT_THROW(llm.complete(LlmRequest::make(LlmRole::grader, "x")), AuthError);
    EXPECT_EQ(hits, 1);
}

TEST_F(LocalServer, SearchParsesPlainList) {
    std::string q;
    server.Get("/search", [&](const httplib::Request& req, httplib::Response& res) {
        q = req.get_param_value("q");
        res.set_content(R"([{"image_url":"http://x/1.png","thumbnail_url":"http://x/1t.png","position":1},
                            {"image_url":"http://x/2.png","thumbnail_url":"http://x/2t.png","position":2}])",
                        "application/json");
    });
    HttpSearch search(base(), "k", fast());
    const auto r = search.search("gi-hun", 8);
    EXPECT_EQ(q, "gi-hun");
    ASSERT_EQ(r.hits.size(), 2u);
    EXPECT_EQ(r.hits[1].thumbnail_url, "http://x/2t.png");
}

TEST_F(LocalServer, SearchParsesSerpBodyAndNoResults) {
    server.Get("/search", [&](const httplib::Request& req, httplib::Response& res) {
        if (req.get_param_value("q") == "none") {
            res.set_content(R"({"error":"Google hasn't returned any results for this query."})", "application/json");
            return;
        }
        res.set_content(R"({"images_results":[{"original":"http://x/1.png","thumbnail":"http://x/t.png","position":1}]})",
                        "application/json");
    });
    HttpSearch search(base(), "k", fast());
    EXPECT_EQ(search.search("wooper", 8).hits.size(), 1u);
    EXPECT_TRUE(search.search("none", 8).hits.empty());
}

TEST_F(LocalServer, Search429IsQuotaExceeded) {
    server.Get("/search", [&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 429;
    });
    HttpSearch search(base(), "k", fast());
    EXPECT_THROW(search.search("x", 4), QuotaExceeded);
    EXPECT_EQ(hits, 1);
}

TEST_F(LocalServer, FetchReturnsBody) {
    const auto png = MockGenerator::synthesize("fetch");
    server.Get("/img.png", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content(std::string(png.begin(), png.end()), "image/png");
    });
    HttpSearch search(base(), "k", fast());
    EXPECT_EQ(search.fetch(base() + "/img.png").bytes, png);
}

TEST_F(LocalServer, GeneratorAcceptsRawBytes) {
    const auto png = MockGenerator::synthesize("gen");
    Json seen;
    server.Post("/generate", [&](const httplib::Request& req, httplib::Response& res) {
        seen = Json::parse(req.body);
        res.set_content(std::string(png.begin(), png.end()), "image/png");
    });
    HttpGenerator gen(base(), fast());
    GeneratorRequest r;
    r.mode = TaskType::image_editing_with_prompt;
    r.prompt = "p";
    r.negative_prompt = "n";
    r.seed = 42;
    r.positional_images = {ImageArtifact::generated(MockGenerator::synthesize("cur"), 0)};
    EXPECT_EQ(gen.generate(r).bytes, png);
    EXPECT_EQ(seen["mode"], "image_editing_with_prompt");
    EXPECT_EQ(seen["seed"], 42);
    EXPECT_EQ(seen["images"].size(), 1u);
}

TEST_F(LocalServer, GeneratorAcceptsJsonImage) {
    const auto png = MockGenerator::synthesize("json");
    server.Post("/generate", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content(Json{{"image", base64_encode(png)}}.dump(), "application/json");
    });
    HttpGenerator gen(base(), fast());
    GeneratorRequest r;
    r.prompt = "p";
    EXPECT_EQ(gen.generate(r).bytes, png);
}

TEST_F(LocalServer, GeneratorFailureIsGenerationError) {
    server.Post("/generate", [&](const httplib::Request&, httplib::Response& res) { res.status = 500; });
    HttpGenerator gen(base(), fast());
    GeneratorRequest r;
    r.prompt = "p";
    EXPECT_THROW(gen.generate(r), GenerationError);
}

TEST(HttpGeneratorTest, ModeCheckedBeforeNetwork) {
    HttpGenerator gen("http://127.0.0.1:9", fast());
    GeneratorRequest r;
    r.prompt = "p";
    r.positional_images = {ImageArtifact::generated(MockGenerator::synthesize("x"), 0)};
    EXPECT_THROW(gen.generate(r), ModeError);
}

}  // namespace
}  // namespace w2i
