#include "w2i/backend.hpp"
#include "w2i/error.hpp"
#include "w2i/json_extract.hpp"
#include "w2i/mock_backend.hpp"
#include "w2i/text.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include <unistd.h>

namespace w2i {
namespace {

namespace fs = std::filesystem;

GeneratorRequest request(TaskType mode, std::vector<ImageArtifact> images = {}) {
    GeneratorRequest r;
    r.mode = mode;
    r.prompt = "wooper by a pond";
    r.negative_prompt = "blurry";
    r.positional_images = std::move(images);
    r.seed = 7;
    return r;
}

ImageArtifact img(const std::string& tag) { return ImageArtifact::retrieved(MockGenerator::synthesize(tag)); }

void write_file(const fs::path& p, std::string_view body) {
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << body;
}

fs::path temp_dir(const std::string& name) {
    auto d = fs::temp_directory_path() / ("w2i_backends_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

TEST(MockLlm, ReturnsScriptedRepliesByCallIndex) {
    MockLlm llm;
    llm.script(LlmRole::grader, {"first", "second"});
    const auto req = LlmRequest::make(LlmRole::grader, "same text");
    EXPECT_EQ(llm.complete(req).text, "first");
    EXPECT_EQ(llm.complete(req).text, "second");
    EXPECT_EQ(llm.complete(req).text, "second");
    EXPECT_EQ(llm.call_count(LlmRole::grader), 3);
}

TEST(MockLlm, RolesAreIndependent) {
    MockLlm llm;
    llm.script(LlmRole::grader, {"g"});
    llm.script(LlmRole::orchestrator, {"o"});
    EXPECT_EQ(llm.complete(LlmRequest::make(LlmRole::orchestrator, "x")).text, "o");
    EXPECT_EQ(llm.complete(LlmRequest::make(LlmRole::grader, "x")).text, "g");
}

TEST(MockLlm, UnscriptedRoleIsTransportError) {
    MockLlm llm;
    EXPECT_THROW(llm.complete(LlmRequest::make(LlmRole::grader, "x")), TransportError);
}

TEST(Temperatures, JudgesAreZeroAgentsWarm) {
    EXPECT_EQ(default_temperature(LlmRole::grader), 0.0);
    EXPECT_EQ(default_temperature(LlmRole::keyword_grader), 0.0);
    EXPECT_EQ(default_temperature(LlmRole::orchestrator), 0.7);
    EXPECT_EQ(default_temperature(LlmRole::prompt_optimizer), 0.7);
}

TEST(MockGenerator, IdenticalRequestsGiveIdenticalImages) {
    MockGenerator a, b;
    const auto r = request(TaskType::text_image_to_image, {img("e1")});
    EXPECT_EQ(a.generate(r).bytes, b.generate(r).bytes);
}

TEST(MockGenerator, ExemplarChangeChangesImage) {
    MockGenerator g;
    const auto x = ImageArtifact::generated(g.generate(request(TaskType::text_image_to_image, {img("e1")})).bytes, 1);
    const auto y = ImageArtifact::generated(g.generate(request(TaskType::text_image_to_image, {img("e2")})).bytes, 1);
    EXPECT_NE(x.id(), y.id());
}

TEST(MockGenerator, OutputIsPng) {
    MockGenerator g;
    const auto bytes = g.generate(request(TaskType::text_to_image)).bytes;
    EXPECT_EQ(sniff_image_extension(bytes), "png");
}

TEST(MockGenerator, ScriptedFailure) {
    MockGenerator g;
    g.fail_on_call(1);
    EXPECT_NO_THROW(g.generate(request(TaskType::text_to_image)));
    EXPECT_THROW(g.generate(request(TaskType::text_to_image)), GenerationError);
}

TEST(ModeInvariants, PositionalImageCounts) {
    EXPECT_THROW(request(TaskType::text_to_image, {img("a")}).validate(), ModeError);
    EXPECT_THROW(request(TaskType::text_image_to_image).validate(), ModeError);
    EXPECT_THROW(request(TaskType::text_image_to_image, {img("a"), img("b"), img("c")}).validate(), ModeError);
    EXPECT_THROW(request(TaskType::image_editing_with_prompt, {}).validate(), ModeError);
    EXPECT_THROW(request(TaskType::image_editing_with_prompt_and_reference, {img("a")}).validate(), ModeError);
    EXPECT_NO_THROW(request(TaskType::image_editing_with_prompt_and_reference, {img("a"), img("b")}).validate());
}

TEST(ModeInvariants, CheckedBeforeReachingGenerator) {
    MockBundle mocks;
    auto backends = mocks.bundle();
    Transcript t;
    CallContext ctx(backends, t, 0);
    EXPECT_THROW(ctx.generate(request(TaskType::text_to_image, {img("a")})), ModeError);
    EXPECT_EQ(mocks.generator->call_count(), 0);
}

TEST(MockSearch, FixtureMapping) {
    MockBundle mocks;
    std::vector<SearchHit> hits;
    for (int i = 0; i < 3; ++i) {
        const auto url = mocks.search->add_image(MockGenerator::synthesize("g" + std::to_string(i)));
        hits.push_back({url, url, i + 1});
    }
    mocks.search->add_results("gi-hun", hits);
    auto backends = mocks.bundle();
    Transcript t;
    CallContext ctx(backends, t, 0);
    const auto c = ctx.search("gi-hun", 8);
    ASSERT_EQ(c.size(), 3u);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(c[i].rank, i);
    EXPECT_TRUE(ctx.search("unknown", 8).empty());
    EXPECT_THROW(ctx.search("gi-hun", 0), ContractViolation);
    EXPECT_EQ(ctx.search("gi-hun", 2).size(), 2u);
}

TEST(MockSearch, SlugFallbackAndFetch) {
    MockSearch s;
    const auto url = s.add_image(MockGenerator::synthesize("x"));
    s.add_slug_results("squid-game-poster", {{url, url, 1}});
    EXPECT_EQ(s.search("Squid Game Poster", 4).hits.size(), 1u);
    EXPECT_EQ(s.fetch(url).bytes, MockGenerator::synthesize("x"));
    EXPECT_FALSE(s.fetch("https://example.com/a.png").bytes.empty());
    s.set_fetch_failure(url);
    EXPECT_THROW(s.fetch(url), TransportError);
}

TEST(Transcript, EveryCallLoggedOnce) {
    MockBundle mocks;
    mocks.llm->script(LlmRole::grader, {"r"});
    auto backends = mocks.bundle();
    Transcript t;
    CallContext ctx(backends, t, 0);
    ctx.llm(LlmRequest::make(LlmRole::grader, "x"));
    ctx.generate(request(TaskType::text_to_image));
    ctx.search("nothing", 3);
    ASSERT_EQ(t.size(), 3u);
    EXPECT_EQ(t[0].role, "grader");
    EXPECT_EQ(t[1].role, "generator");
    EXPECT_EQ(t[2].role, "search");
    for (const auto& e : t) {
        EXPECT_EQ(e.attempts, 1);
        EXPECT_EQ(e.request_digest.size(), 64u);
    }
}

TEST(Transcript, FailedCallIsRecorded) {
    MockBundle mocks;
    auto backends = mocks.bundle();
    Transcript t;
    CallContext ctx(backends, t, 0);
    EXPECT_THROW(ctx.llm(LlmRequest::make(LlmRole::grader, "x")), TransportError);
    ASSERT_EQ(t.size(), 1u);
    EXPECT_FALSE(t[0].ok);
}

TEST(Digest, AttachmentOrderMatters) {
    auto a = LlmRequest::make(LlmRole::grader, "x", {img("1"), img("2")});
    auto b = LlmRequest::make(LlmRole::grader, "x", {img("2"), img("1")});
    EXPECT_NE(a.digest(), b.digest());
}

TEST(FixtureBundle, LoadsResponsesSearchAndImages) {
    const auto dir = temp_dir("load");
    const auto png = MockGenerator::synthesize("fixture");
    const auto sha = sha256_hex(png);
    write_file(dir / "responses/grader/0.txt", "zero");
    write_file(dir / "responses/grader/1.txt", "one");
    write_file(dir / "images" / (sha + ".png"), std::string(png.begin(), png.end()));
    write_file(dir / "search/wooper.json",
               Json::array({{{"image_url", "fixture:" + sha}, {"thumbnail_url", "fixture:" + sha}, {"position", 1}}}).dump());
    EXPECT_TRUE(validate_fixture_bundle(dir).empty());
    auto b = load_fixture_bundle(dir);
    EXPECT_EQ(b.llm->complete(LlmRequest::make(LlmRole::grader, "x")).text, "zero");
    EXPECT_EQ(b.llm->complete(LlmRequest::make(LlmRole::grader, "x")).text, "one");
    const auto hits = b.search->search("Wooper", 3).hits;
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_EQ(b.search->fetch(hits[0].image_url).bytes, png);
    fs::remove_all(dir);
}

TEST(FixtureBundle, ReportsProblems) {
    const auto dir = temp_dir("bad");
    write_file(dir / "responses/painter/0.txt", "x");
    write_file(dir / "responses/grader/0.txt", "x");
    write_file(dir / "responses/grader/2.txt", "x");
    write_file(dir / "images/deadbeef.png", "not the digest");
    write_file(dir / "search/Bad Name.json", "[]");
    write_file(dir / "search/ok.json", "{broken");
    write_file(dir / "search/missing.json", R"([{"image_url":"fixture:abc","thumbnail_url":"fixture:abc","position":1}])");
    const auto problems = validate_fixture_bundle(dir);
    EXPECT_GE(problems.size(), 6u);
    EXPECT_THROW(load_fixture_bundle(dir), ConfigError);
    fs::remove_all(dir);
}

TEST(FixtureBundle, MissingDirectoryIsConfigError) {
    EXPECT_THROW(load_fixture_bundle("/nonexistent/w2i/fixtures"), ConfigError);
}

TEST(FixtureBundle, CheckedInFixturesAreValid) {
    const fs::path root = fs::path(W2I_TEST_DIR) / "fixtures";
    int bundles = 0;
    for (const auto& e : fs::directory_iterator(root)) {
        if (!e.is_directory()) continue;
        ++bundles;
        const auto problems = validate_fixture_bundle(e.path());
        EXPECT_TRUE(problems.empty()) << e.path() << ": " << (problems.empty() ? "" : problems[0]);
    }
    EXPECT_GE(bundles, 1);
}

}  // namespace
}  // namespace w2i
