#include "w2i/error.hpp"
#include "w2i/mock_backend.hpp"
#include "w2i/types.hpp"

#include <gtest/gtest.h>

namespace w2i {
namespace {

Exemplar exemplar(const std::string& seed, double score = 0.8) {
    return Exemplar{ImageArtifact::retrieved(MockGenerator::synthesize(seed)), "fixture:" + seed, seed, score, ""};
}

TEST(ImageArtifact, IdIsContentHash) {
    const auto bytes = MockGenerator::synthesize("x");
    auto a = ImageArtifact::generated(bytes, 0);
    auto b = ImageArtifact::retrieved(bytes);
    EXPECT_EQ(a.id(), sha256_hex(bytes));
    EXPECT_EQ(a.id().size(), 64u);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.extension(), "png");
    EXPECT_EQ(a.created_at_iteration(), 0);
    EXPECT_EQ(b.created_at_iteration(), std::nullopt);
    EXPECT_EQ(b.origin(), ImageOrigin::retrieved);
    EXPECT_NE(a, ImageArtifact::generated(MockGenerator::synthesize("y"), 0));
}

TEST(ImageArtifact, GeneratedNeedsIteration) {
    EXPECT_THROW(ImageArtifact::generated({1, 2, 3}, -1), ContractViolation);
}

TEST(ImageArtifact, DefaultIsEmpty) { EXPECT_TRUE(ImageArtifact().empty()); }

TEST(ExemplarSet, RespectsCapAndOrder) {
    ExemplarSet set(2);
    EXPECT_TRUE(set.push(exemplar("a")));
    EXPECT_TRUE(set.push(exemplar("b")));
    EXPECT_FALSE(set.push(exemplar("c")));
    ASSERT_EQ(set.size(), 2u);
    EXPECT_EQ(set.items()[0].query, "a");
    EXPECT_EQ(set.items()[1].query, "b");
    EXPECT_EQ(set.ids()[0], set.items()[0].image.id());
}

TEST(ExemplarSet, RejectsScoreOutsideUnitInterval) {
    ExemplarSet set(2);
    EXPECT_THROW(set.push(exemplar("a", 1.5)), ContractViolation);
    EXPECT_THROW(set.push(exemplar("a", -0.1)), ContractViolation);
}

TEST(TaskType, SpellingsRoundTrip) {
    EXPECT_EQ(to_string(TaskType::image_editing_with_prompt_and_reference),
              "image_editing_with_prompt_and_reference");
    for (auto t : kAllTaskTypes) EXPECT_EQ(parse_task_type(to_string(t)), t);
    EXPECT_EQ(parse_task_type("Text_To_Image"), std::nullopt);
}

TEST(RunConfig, DefaultsAreValid) {
    RunConfig c;
    EXPECT_NO_THROW(c.validate());
    EXPECT_EQ(c.t_max, 2);
    EXPECT_DOUBLE_EQ(c.threshold_tau, 0.85);
    EXPECT_EQ(c.weights, (Weights{0.5, 0.3, 0.2}));
    EXPECT_EQ(c.exemplar_cap, 2);
    EXPECT_EQ(c.search_result_count, 8);
    EXPECT_EQ(c.query_rewrite_attempts, 2);
    EXPECT_EQ(c.json_parse_retries, 2);
}

TEST(RunConfig, ErrorsNameFields) {
    RunConfig c;
    c.t_max = 0;
    c.weights.beta = -0.1;
    try {
        c.validate();
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("t_max"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("weights.beta"), std::string::npos);
    }
}

TEST(RunConfig, UnnormalizedWeightsNeedOverride) {
    RunConfig c;
    c.weights = {1, 1, 1};
    EXPECT_THROW(c.validate(), ConfigError);
    c.allow_unnormalized_weights = true;
    EXPECT_NO_THROW(c.validate());
}

TEST(RunConfig, ExemplarCapOnlyMattersWithRetrieval) {
    RunConfig c;
    c.exemplar_cap = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c.retrieval_enabled = false;
    EXPECT_NO_THROW(c.validate());
}

TEST(OptimizationState, FromRecords) {
    std::vector<IterationRecord> recs(3);
    for (int i = 0; i < 3; ++i) {
        recs[i].t = i;
        recs[i].prompt_after = "p" + std::to_string(i);
        recs[i].visual_analysis = "va" + std::to_string(i);
    }
    auto s = OptimizationState::from_records("orig", recs);
    EXPECT_EQ(s.original_prompt, "orig");
    EXPECT_EQ(s.current_prompt, "p2");
    EXPECT_EQ(s.visual_analysis, "va2");
    EXPECT_EQ(s.current_record, &recs[2]);
    ASSERT_EQ(s.history.size(), 2u);
    EXPECT_EQ(s.history[0], &recs[0]);

    auto empty = OptimizationState::from_records("orig", {});
    EXPECT_EQ(empty.current_prompt, "orig");
    EXPECT_EQ(empty.current_record, nullptr);
}

TEST(OptimizedPrompt, JoinsNegatives) {
    OptimizedPrompt p{"x", {"blurry", "lowres"}};
    EXPECT_EQ(p.joined_negatives(), "blurry, lowres");
}

}  // namespace
}  // namespace w2i
