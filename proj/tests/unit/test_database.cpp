#include <gtest/gtest.h>

#include "natlog/database.hpp"
#include "natlog/dcg.hpp"
#include "test_support.hpp"

using namespace natlog;
using testing_support::corpus;
using testing_support::read_text;

namespace {

std::size_t count_candidates(const Db& db, const std::string& query) {
    ParsedQuery q = parse_query(query);
    Store s;
    s.fresh_block(q.nvars());
    return db.candidates(q.goals[0].term, s).size();
}

} // namespace

TEST(Consult, FamilyListingHasSixRules) {
    const char* listing = "sibling of X S: parent of X P, parent of S P, distinct S X.\n"
                          "grand parent of X GP: parent of X P, parent of P GP.\n"
                          "ancestor of X A : parent of X  P, parent or ancestor P A.\n"
                          "parent or ancestor P P.\n"
                          "parent or ancestor P A : ancestor of P A.\n";
    Db db;
    db.consult_text(listing);
    EXPECT_EQ(db.size(), 5u);
    db.consult_text("parent of a b.");
    EXPECT_EQ(db.size(), 6u);
}

TEST(Consult, EmptyProgram) {
    Db db;
    db.consult_text("");
    EXPECT_EQ(db.size(), 0u);
}

TEST(Consult, ImageGrammarHasThreeStyleRules) {
    Db db;
    auto items = parse_program(read_text(corpus("image.nat")));
    std::vector<SourceItem> rules;
    for (auto& it : items)
        if (it.kind != ItemKind::query)
            rules.push_back(it);
    db.consult(rules);
    EXPECT_EQ(count_candidates(db, "style S0 S1?"), 3u);
}

TEST(Consult, RejectsQueries) {
    Db db;
    EXPECT_THROW(db.consult_text("a.\n?- a."), Error);
    EXPECT_EQ(db.size(), 0u);
}

TEST(Candidates, ArityAndLeadFilter) {
    Db db;
    db.consult_text(read_text(corpus("xor.nat")));
    db.consult_text(read_text(corpus("family.nat")));
    EXPECT_EQ(count_candidates(db, "xor 0 1 X?"), 4u);
    EXPECT_EQ(count_candidates(db, "nosuch a?"), 0u);
    EXPECT_EQ(count_candidates(db, "parent or ancestor P A?"), 2u);
}

TEST(Candidates, NonConstantHeadsMatchEveryLead) {
    Db db;
    db.consult_text("a 1.\nX 2.\nb 3.\na 4.\n");
    EXPECT_EQ(count_candidates(db, "a N?"), 3u);
    EXPECT_EQ(count_candidates(db, "b N?"), 2u);
    EXPECT_EQ(count_candidates(db, "zzz N?"), 1u);
    EXPECT_EQ(count_candidates(db, "Q N?"), 4u);
}

TEST(Candidates, SourceOrder) {
    Db db;
    db.consult_text("p 1.\nX 2.\np 3.\n");
    ParsedQuery q = parse_query("p N?");
    Store s;
    s.fresh_block(q.nvars());
    auto c = db.candidates(q.goals[0].term, s);
    ASSERT_EQ(c.size(), 3u);
    EXPECT_EQ(c[0]->head[1], Term::integer(1));
    EXPECT_EQ(c[1]->head[1], Term::integer(2));
    EXPECT_EQ(c[2]->head[1], Term::integer(3));
}

TEST(Library, IsEmbeddedAndParses) {
    Db db;
    db.consult_text(library_source());
    EXPECT_GT(db.size(), 10u);
    Db prompts;
    prompts.consult_text(prompt_grammar_source());
    EXPECT_GT(prompts.size(), 5u);
}

TEST(Dcg, SingleTerminal) {
    auto items = parse_program("noun => @robot.");
    Clause c = translate_rule(items[0]);
    std::vector<std::string> names{"S0", "S1"};
    EXPECT_EQ(render_goal(Goal{Marker::plain, c.head}, names), "noun S0 S1");
    ASSERT_EQ(c.body.size(), 1u);
    EXPECT_EQ(render_goal(Goal{Marker::plain, c.body[0].term}, names), "eq S0 (robot S1)");
}

TEST(Dcg, ThreadsNonterminals) {
    auto items = parse_program("image => style, subject, verb, object.");
    Clause c = translate_rule(items[0]);
    std::vector<std::string> names{"S0", "S1", "S2", "S3", "S4"};
    EXPECT_EQ(render_goal(Goal{Marker::plain, c.head}, names), "image S0 S4");
    ASSERT_EQ(c.body.size(), 4u);
    EXPECT_EQ(render_goal(Goal{Marker::plain, c.body[0].term}, names), "style S0 S1");
    EXPECT_EQ(render_goal(Goal{Marker::plain, c.body[3].term}, names), "object S3 S4");
}

TEST(Dcg, KeepsHeadArguments) {
    auto items = parse_program("prompt Kind Q => prefix Kind, sent Q, suffix Kind.");
    Clause c = translate_rule(items[0]);
    std::vector<std::string> names{"Kind", "Q", "S0", "S1", "S2", "S3"};
    EXPECT_EQ(render_goal(Goal{Marker::plain, c.head}, names), "prompt Kind Q S0 S3");
    EXPECT_EQ(render_goal(Goal{Marker::plain, c.body[1].term}, names), "sent Q S1 S2");
}

TEST(Dcg, Epsilon) {
    auto items = parse_program("e => .");
    Clause c = translate_rule(items[0]);
    EXPECT_TRUE(c.body.empty());
    EXPECT_EQ(c.head[1], c.head[2]);
}

TEST(Dcg, MultiWordRun) {
    auto items = parse_program("location => @on planet 'Mars'.");
    Clause c = translate_rule(items[0]);
    std::vector<std::string> names{"S0", "S1"};
    EXPECT_EQ(render_goal(Goal{Marker::plain, c.body[0].term}, names), "eq S0 (on (planet ('Mars' S1)))");
}

TEST(Dcg, TerminalWithVariableIsRejected) {
    auto items = parse_program("trigger X => @given that X relates.");
    EXPECT_THROW(translate_rule(items[0]), Error);
}
