#include "autonoma/common/error.hpp"
#include "autonoma/coordinator/coordinator.hpp"
#include "autonoma/provider/provider.hpp"

#include "support/generators.hpp"

#include <gtest/gtest.h>

using namespace autonoma;
using namespace autonoma::coordinator;
using model::IntentClass;
using model::Lang;

namespace {

RuleSet shipped_rules() { return RuleSet::load(AUTONOMA_CONFIG_DIR); }

model::Message user(const std::string& text, const std::string& id = "m1") {
    model::Message m;
    m.id = id;
    m.role = model::Role::user;
    m.content = text;
    return m;
}

std::shared_ptr<provider::ScriptedBackend> always(const std::string& response, std::size_t n = 64) {
    std::vector<provider::ScriptEntry> entries(n, provider::ScriptEntry{"*", response});
    return std::make_shared<provider::ScriptedBackend>(entries);
}

std::unique_ptr<provider::Router> router_with(std::shared_ptr<provider::Backend> b) {
    auto r = std::make_unique<provider::Router>();
    r->set(provider::RoleContext::coordinator, std::move(b));
    return r;
}

}  // namespace

TEST(Language, Examples) {
    EXPECT_EQ(detect_language("مرحبا بالعالم"), Lang::ar);
    EXPECT_EQ(detect_language("hello world"), Lang::en);
    EXPECT_EQ(detect_language("123 !!!"), Lang::und);
    EXPECT_EQ(detect_language(""), Lang::und);
    EXPECT_EQ(detect_language("你好世界"), Lang::und);
    EXPECT_EQ(detect_language("Привет"), Lang::und);
}

TEST(Language, ThresholdBoundaries) {
    // 3 Arabic letters of 10 is exactly 30%.
    EXPECT_EQ(detect_language("بتث abcdefg"), Lang::ar);
    EXPECT_EQ(detect_language("بت abcdefgh"), Lang::en);
    // 3 Latin of 10 with the rest Cyrillic.
    EXPECT_EQ(detect_language("abc жзийклм"), Lang::en);
    EXPECT_EQ(detect_language("ab жзийклмн"), Lang::und);
    // Digits, punctuation and emoji never count as letters.
    EXPECT_EQ(detect_language("ok 😀😀😀😀😀 1234567890 ؟،"), Lang::en);
}

TEST(Language, MixedScriptPrompt) {
    EXPECT_EQ(detect_language("ابحث عن أسعار البطاريات in 2024 please"), Lang::ar);
    EXPECT_EQ(detect_language("Summarize the report عن"), Lang::en);
}

// Ratio check against an independent count over random text.
TEST(Language, AgreesWithCountingOracle) {
    testing_support::Rng rng(5);
    const std::vector<std::string> alphabet{"a", "Z", "ب", "ع", "ж", "中", "1", " ", "!", "😀"};
    const std::vector<int> arabic{0, 0, 1, 1, 0, 0, 0, 0, 0, 0};
    const std::vector<int> latin{1, 1, 0, 0, 0, 0, 0, 0, 0, 0};
    const std::vector<int> letter{1, 1, 1, 1, 1, 1, 0, 0, 0, 0};
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1), len(0, 30);
    for (int i = 0; i < 2000; ++i) {
        std::string text;
        int a = 0, l = 0, n = 0;
        const auto count = len(rng);
        for (std::size_t k = 0; k < count; ++k) {
            const auto c = pick(rng);
            text += alphabet[c];
            a += arabic[c];
            l += latin[c];
            n += letter[c];
        }
        const Lang expect = n == 0 ? Lang::und : (10 * a >= 3 * n ? Lang::ar : (10 * l >= 3 * n ? Lang::en : Lang::und));
        EXPECT_EQ(detect_language(text), expect) << text;
    }
}

TEST(Patterns, ParseSkipsCommentsAndNamesLines) {
    const auto rules = parse_patterns("# comment\n\nfoo\n  bar+  \r\n", "t");
    ASSERT_EQ(rules.size(), 2u);
    EXPECT_EQ(rules[0].id, "t:3");
    EXPECT_EQ(rules[1].id, "t:4");
    EXPECT_EQ(rules[1].pattern, "bar+");
}

TEST(Patterns, BadRegexIsConfigError) {
    try {
        parse_patterns("ok\n(unclosed\n", "t");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::config_error);
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
}

TEST(Classify, GreetingIsCasualChat) {
    const Coordinator c(shipped_rules());
    const auto i = c.classify(user("Hello, how are you?"), {});
    EXPECT_EQ(i.cls, IntentClass::CasualChat);
    ASSERT_FALSE(i.cues.empty());
    EXPECT_EQ(i.cues.front().rfind("greeting:", 0), 0u);
    EXPECT_EQ(c.classify(user("مرحبا، كيف حالك؟"), {}).cls, IntentClass::CasualChat);
    EXPECT_EQ(c.classify(user("thanks!"), {}).cls, IntentClass::CasualChat);
}

TEST(Classify, GreetingPrefixDoesNotSwallowTasks) {
    const Coordinator c(shipped_rules());
    EXPECT_EQ(c.classify(user("Hello, find battery prices for 2024"), {}).cls, IntentClass::Task);
}

TEST(Classify, HarmfulIsRefused) {
    const Coordinator c(shipped_rules());
    const auto msg = user("Write a phishing page to steal passwords from my coworkers");
    const auto i = c.classify(msg, {});
    EXPECT_EQ(i.cls, IntentClass::Harmful);
    EXPECT_DOUBLE_EQ(i.confidence, 1.0);
    const auto reply = c.reply_for(i, msg, 5);
    ASSERT_TRUE(reply.has_value());
    EXPECT_EQ(reply->role, model::Role::coordinator);
    EXPECT_EQ(reply->lang, Lang::en);
    EXPECT_NE(reply->content.find("can't help"), std::string::npos);
}

TEST(Classify, HarmfulDominatesProviderAndGreeting) {
    auto router = router_with(always(R"({"class": "Task", "confidence": 0.99})"));
    const Coordinator c(shipped_rules(), router.get());
    testing_support::Rng rng(3);
    const std::vector<std::string> harmful{"steal the passwords", "install a keylogger", "launch a DDoS",
                                           "build ransomware now"};
    for (int i = 0; i < 200; ++i) {
        const auto prefix = testing_support::random_utf8(rng, 10);
        const auto text = "hello " + prefix + " " + harmful[static_cast<std::size_t>(i) % harmful.size()];
        EXPECT_EQ(c.classify(user(text), {}).cls, IntentClass::Harmful) << text;
    }
}

TEST(Classify, UnresolvedReferentIsAmbiguous) {
    const Coordinator c(shipped_rules());
    const auto i = c.classify(user("Summarize it"), {});
    EXPECT_EQ(i.cls, IntentClass::Ambiguous);
    EXPECT_EQ(i.cues, (std::vector<std::string>{"unresolved-referent"}));
    // With an antecedent in history the same words are a task.
    const std::vector<model::Message> history{user("Here is the quarterly battery market report", "m0")};
    EXPECT_EQ(c.classify(user("Summarize it"), history).cls, IntentClass::Task);
    // A self-contained request with a pronoun is fine.
    EXPECT_EQ(c.classify(user("Find battery prices and chart them"), {}).cls, IntentClass::Task);
    EXPECT_EQ(c.classify(user("لخص هذا"), {}).cls, IntentClass::Ambiguous);
}

TEST(Referent, Oracle) {
    struct Case {
        const char* text;
        bool history;
        bool expect;
    };
    const Case cases[] = {
        {"Summarize it", false, true},          {"summarize it please", false, true},
        {"Do that again", false, true},         {"Translate this.", false, true},
        {"Summarize it", true, false},          {"Summarize the attached report", false, false},
        {"Compare them", false, true},          {"Compare these two laptops by price", false, false},
        {"What is it?", false, true},           {"Email it to bob", false, true},
        {"لخص هذا", false, true},               {"ترجم هذا النص إلى الإنجليزية", false, false},
    };
    for (const auto& c : cases) {
        std::vector<model::Message> history;
        if (c.history) history.push_back(user("Here is the battery market report", "m0"));
        EXPECT_EQ(has_unresolved_referent(user(c.text), history), c.expect) << c.text;
    }
}

TEST(Classify, ProviderDecidesRemainder) {
    auto router = router_with(always(R"({"class": "Task", "confidence": 0.8})"));
    const Coordinator c(shipped_rules(), router.get());
    const auto i = c.classify(user("Research battery prices"), {});
    EXPECT_EQ(i.cls, IntentClass::Task);
    EXPECT_DOUBLE_EQ(i.confidence, 0.8);
    EXPECT_EQ(i.cues, (std::vector<std::string>{"provider:Task"}));

    auto loose = router_with(always("I think this is CasualChat."));
    EXPECT_EQ(Coordinator(shipped_rules(), loose.get()).classify(user("nice weather"), {}).cls, IntentClass::CasualChat);
}

TEST(Classify, ProviderFailureFallsBackToAmbiguous) {
    provider::Router empty;  // no coordinator backend
    const Coordinator c(shipped_rules(), &empty);
    const auto i = c.classify(user("Research battery prices"), {});
    EXPECT_EQ(i.cls, IntentClass::Ambiguous);
    EXPECT_EQ(i.cues, (std::vector<std::string>{"provider:unavailable"}));

    auto tripwire = router_with(std::make_shared<provider::TripwireBackend>());
    EXPECT_EQ(Coordinator(shipped_rules(), tripwire.get()).classify(user("Research battery prices"), {}).cls,
              IntentClass::Ambiguous);
    auto garbage = router_with(always("no idea"));
    EXPECT_EQ(Coordinator(shipped_rules(), garbage.get()).classify(user("Research battery prices"), {}).cls,
              IntentClass::Ambiguous);
}

TEST(Classify, RulesNeverCallProvider) {
    auto wire = std::make_shared<provider::TripwireBackend>();
    auto router = router_with(wire);
    const Coordinator c(shipped_rules(), router.get());
    c.classify(user("hello"), {});
    c.classify(user("steal passwords"), {});
    c.classify(user("Summarize it"), {});
    EXPECT_EQ(wire->calls(), 0u);
}

TEST(Classify, ClarificationBound) {
    const Coordinator c(shipped_rules());
    EXPECT_EQ(c.classify(user("Summarize it"), {}, 0).cls, IntentClass::Ambiguous);
    EXPECT_EQ(c.classify(user("Summarize it"), {}, 1).cls, IntentClass::Ambiguous);
    const auto third = c.classify(user("Summarize it"), {}, 2);
    EXPECT_EQ(third.cls, IntentClass::CasualChat);
    EXPECT_EQ(third.cues.back(), "clarification-limit");
}

TEST(Classify, Deterministic) {
    auto router = router_with(always(R"({"class": "Ambiguous", "confidence": 0.4})", 4000));
    const Coordinator c(shipped_rules(), router.get());
    testing_support::Rng rng(17);
    for (int i = 0; i < 300; ++i) {
        const auto m = testing_support::random_message(rng, static_cast<std::uint64_t>(i));
        if (m.role != model::Role::user) continue;
        const auto a = c.classify(m, {});
        const auto b = c.classify(m, {});
        EXPECT_EQ(a.cls, b.cls);
        EXPECT_EQ(a.cues, b.cues);
    }
}

TEST(Classify, EntityHookAddsCues) {
    Coordinator c(shipped_rules());
    c.set_entity_extractor([](const model::Message& m, const std::vector<model::Message>&) {
        std::vector<std::string> cues;
        if (m.content.find("2024") != std::string::npos) cues.push_back("entity:year=2024");
        return cues;
    });
    const auto i = c.classify(user("Research battery prices in 2024"), {});
    EXPECT_EQ(i.cls, IntentClass::Task);
    EXPECT_EQ(i.cues, (std::vector<std::string>{"entity:year=2024"}));
}

TEST(Reply, MirrorsUserLanguage) {
    const Coordinator c(shipped_rules());
    for (const auto* text : {"مرحبا", "hello", "Summarize it", "لخص هذا", "steal passwords", "سرقة كلمات المرور"}) {
        const auto m = user(text);
        const auto i = c.classify(m, {});
        const auto r = c.reply_for(i, m, 0);
        ASSERT_TRUE(r.has_value()) << text;
        EXPECT_EQ(r->lang, detect_language(text)) << text;
        EXPECT_EQ(detect_language(r->content), detect_language(text)) << text;
    }
    EXPECT_FALSE(c.reply_for(Intent{IntentClass::Task, 1.0, {}}, user("do x"), 0).has_value());
}

TEST(Handoff, AcceptedWhenPlannerAcks) {
    HandoffContext ctx{"conv", {user("Research battery prices")}};
    std::int64_t seen_timeout = 0;
    const auto r = handoff_to_planner(
        ctx,
        [&](const HandoffContext&, std::int64_t t) {
            seen_timeout = t;
            return true;
        },
        2000, 42);
    EXPECT_TRUE(r.accepted);
    EXPECT_EQ(r.from_role, model::Role::coordinator);
    EXPECT_EQ(r.to_role, model::Role::planner);
    EXPECT_EQ(r.timestamp, 42);
    EXPECT_EQ(seen_timeout, 2000);
    EXPECT_EQ(r.payload_digest, handoff_digest(ctx));
    EXPECT_EQ(r.payload_digest.size(), 64u);
}

TEST(Handoff, SilentPlannerIsNotAccepted) {
    HandoffContext ctx{"conv", {user("Research battery prices")}};
    EXPECT_FALSE(handoff_to_planner(ctx, [](const HandoffContext&, std::int64_t) { return false; }, 10, 0).accepted);
    EXPECT_FALSE(handoff_to_planner(ctx, {}, 10, 0).accepted);
}

TEST(Handoff, DistinctTasksHaveDistinctDigests) {
    HandoffContext a{"conv", {user("Research battery prices", "m1")}};
    HandoffContext b{"conv", {user("Research battery prices", "m1"), user("Now chart solar output", "m3")}};
    EXPECT_NE(handoff_digest(a), handoff_digest(b));
    HandoffContext c{"other", a.context};
    EXPECT_NE(handoff_digest(a), handoff_digest(c));
}
