#include <gtest/gtest.h>

#include "natlog/promptgen.hpp"
#include "test_support.hpp"

using namespace natlog;
using testing_support::corpus;

namespace {

const std::string question_prompt = "If you would ask me how are transformers used in GPT I would say that";

std::shared_ptr<Completer> recorded() {
    return std::make_shared<RecordedCompleter>(RecordedCompleter::load(corpus("transcript.tsv")));
}

} // namespace

TEST(Mock, IsDeterministic) {
    MockCompleter m;
    EXPECT_EQ(m.complete("abc"), "MOCK[abc]");
    EXPECT_EQ(m.paint("abc"), m.paint("abc"));
    EXPECT_EQ(m.paint("abc"), "mock://image/" + stable_hash_hex("abc"));
    EXPECT_NE(m.paint("abc"), m.paint("abd"));
}

TEST(StableHash, Fnv1a) {
    EXPECT_EQ(stable_hash_hex(""), "cbf29ce484222325");
    EXPECT_EQ(stable_hash_hex("a"), "af63dc4c8601ec8c");
}

TEST(Recorded, ParsesTranscripts) {
    auto rc = RecordedCompleter::from_text("# comment\n\nhello\tworld\r\nx y\tz\n");
    EXPECT_EQ(rc.size(), 2u);
    EXPECT_EQ(rc.complete("hello"), "world");
    EXPECT_EQ(rc.complete("x y"), "z");
    EXPECT_THROW(rc.complete("missing"), Error);
    EXPECT_THROW(RecordedCompleter::from_text("no tab here\n"), Error);
}

TEST(Callback, DelegatesAndLacksPaintByDefault) {
    CallbackCompleter cb([](std::string_view p) { return "<" + std::string(p) + ">"; });
    EXPECT_EQ(cb.complete("q"), "<q>");
    EXPECT_THROW(cb.paint("q"), Error);
}

TEST(BuildPrompt, Question) {
    PromptGenerator pg(nullptr);
    EXPECT_EQ(pg.build_prompt("question", "how are transformers used in GPT"), question_prompt);
}

TEST(BuildPrompt, Relation) {
    PromptGenerator pg(nullptr);
    EXPECT_EQ(pg.build_prompt("relation", "the quick brown fox jumps over the lazy dog"),
              "If you would ask me what are the subject and the verb and the object in the quick brown fox jumps "
              "over the lazy dog I would say subject is");
}

TEST(BuildPrompt, Errors) {
    PromptGenerator pg(nullptr);
    EXPECT_THROW(pg.build_prompt("question", ""), Error);
    try {
        pg.build_prompt("poem", "x");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("known kinds: question, relation"), std::string::npos);
    }
    EXPECT_EQ(pg.known_kinds(), (std::vector<std::string>{"question", "relation"}));
}

TEST(BuildPrompt, IsPure) {
    PromptGenerator pg(nullptr);
    EXPECT_EQ(pg.build_prompt("question", "why"), pg.build_prompt("question", "why"));
}

TEST(Query, MockAndRecorded) {
    PromptGenerator mock(nullptr);
    EXPECT_EQ(mock.query("question", "how are transformers used in GPT"), "MOCK[" + question_prompt + "]");
    EXPECT_THROW(mock.query("nosuch", "x"), Error);

    PromptGenerator rec(recorded());
    EXPECT_EQ(rec.query("question", "how are transformers used in GPT").substr(0, 64),
              "transformers are used in GPT (Generative Pre-trained Transformer");
}

TEST(Analogy, Template) {
    EXPECT_EQ(analogy_prompt("car", "wheel", "bird"),
              "given that car relates to wheel by analogy I would briefly say that bird relates to");
    PromptGenerator mock(nullptr);
    EXPECT_EQ(mock.analogy("car", "wheel", "bird"),
              "MOCK[given that car relates to wheel by analogy I would briefly say that bird relates to]");
    EXPECT_EQ(mock.analogy("", "wheel", "bird"),
              "MOCK[given that  relates to wheel by analogy I would briefly say that bird relates to]");
    PromptGenerator rec(recorded());
    EXPECT_EQ(rec.analogy("car", "wheel", "bird").substr(0, 17), "wing by analogy. ");
}

TEST(Paint, MockUrls) {
    PromptGenerator pg(nullptr);
    std::string p = "photorealistic rendering of shiny robot walking on planet Mars with high hills and a blue purse";
    EXPECT_EQ(pg.paint(p), "mock://image/" + stable_hash_hex(p));
    EXPECT_EQ(pg.paint(p), pg.paint(p));
    EXPECT_THROW(pg.paint(""), Error);
}

TEST(Paint, FromPrograms) {
    testing_support::Captured c;
    c.session.consult_text(prompt_grammar_source());
    std::string out = c.query("paint 'a cat'?");
    EXPECT_EQ(out, "mock://image/" + stable_hash_hex("a cat") + "\nANSWER: {}\n");
    EXPECT_EQ(c.err.str(), "browse: mock://image/" + stable_hash_hex("a cat") + "\n");
}

TEST(CompleterFailure, CarriesPrompt) {
    auto failing = std::make_shared<CallbackCompleter>([](std::string_view) -> std::string { throw Error("offline"); });
    PromptGenerator pg(failing);
    try {
        pg.query("question", "why");
        FAIL();
    } catch (const Error& e) {
        std::string msg = e.what();
        EXPECT_NE(msg.find("offline"), std::string::npos);
        EXPECT_NE(msg.find("If you would ask me why I would say that"), std::string::npos);
    }
}
