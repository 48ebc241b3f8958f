#include "autonoma/common/error.hpp"
#include "autonoma/provider/provider.hpp"
#include "support/generators.hpp"

#include <gtest/gtest.h>
#include <httplib.h>

#include <filesystem>
#include <set>
#include <thread>

using namespace autonoma;
using namespace autonoma::provider;

namespace {

CompletionRequest req_of(std::vector<ChatMessage> msgs, RoleContext role = RoleContext::planner) {
    CompletionRequest r;
    r.role_context = role;
    r.messages = std::move(msgs);
    return r;
}

}  // namespace

TEST(Fingerprint, StableAndOrderSensitive) {
    std::vector<ChatMessage> a{{"system", "be brief"}, {"user", "hello"}};
    std::vector<ChatMessage> b{{"user", "hello"}, {"system", "be brief"}};
    EXPECT_EQ(fingerprint(a), fingerprint(a));
    EXPECT_NE(fingerprint(a), fingerprint(b));
    EXPECT_EQ(fingerprint({{"user", "a\r\nb"}}), fingerprint({{"user", "a\nb"}}));
    EXPECT_EQ(fingerprint(a).size(), 64u);
}

// Spot-check: 10^4 single-codepoint mutations of one message all change the
// token.
TEST(Fingerprint, SingleCodepointMutationsNeverCollide) {
    testing_support::Rng rng(99);
    const std::string base = "Summarize the quarterly battery price report for the board";
    const auto base_fp = fingerprint({{"user", base}});
    std::set<std::string> seen{base_fp};
    std::set<std::string> texts{base};
    for (int i = 0; i < 10000; ++i) {
        std::string text = base;
        const auto pos = rng() % text.size();
        const char c = static_cast<char>('!' + rng() % 94);
        if (c == text[pos]) continue;
        text[pos] = c;
        if (!texts.insert(text).second) continue;
        EXPECT_TRUE(seen.insert(fingerprint({{"user", text}})).second) << text;
    }
    EXPECT_GT(seen.size(), 4000u);
}

TEST(ScriptedBackend, MatchesExhaustsAndReplays) {
    std::vector<ChatMessage> msgs{{"user", "plan this"}};
    std::vector<ScriptEntry> script{{fingerprint(msgs), "first"}, {"*", "second"}};
    for (int run = 0; run < 2; ++run) {
        ScriptedBackend b(script);
        EXPECT_EQ(b.complete(req_of(msgs)).text, "first");
        EXPECT_EQ(b.complete(req_of({{"user", "anything"}})).text, "second");
        try {
            b.complete(req_of(msgs));
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), Errc::script_exhausted);
        }
    }
}

TEST(ScriptedBackend, StrictRejectsMismatchLenientDoesNot) {
    std::vector<ScriptEntry> script{{fingerprint({{"user", "x"}}), "r"}};
    ScriptedBackend strict(script);
    try {
        strict.complete(req_of({{"user", "y"}}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::fingerprint_mismatch);
    }
    ScriptedBackend lenient(script, ScriptedBackend::Mode::lenient);
    EXPECT_EQ(lenient.complete(req_of({{"user", "y"}})).text, "r");
}

TEST(RecordingBackend, TraceReplaysStrictly) {
    auto inner = std::make_shared<ScriptedBackend>(std::vector<ScriptEntry>{{"*", "one"}, {"*", "two"}});
    RecordingBackend rec(inner);
    rec.complete(req_of({{"user", "a"}}));
    rec.complete(req_of({{"user", "b"}}));
    const auto file = std::filesystem::temp_directory_path() / ("trace-" + random_uuid() + ".json");
    rec.write_trace(file);
    ScriptedBackend replay(load_script(file));
    EXPECT_EQ(replay.complete(req_of({{"user", "a"}})).text, "one");
    EXPECT_EQ(replay.complete(req_of({{"user", "b"}})).text, "two");
    std::filesystem::remove(file);
}

TEST(Router, RoutesPerRoleAndTripwires) {
    Router r;
    auto tw = std::make_shared<TripwireBackend>();
    r.set_all(tw);
    r.set(RoleContext::planner, std::make_shared<ScriptedBackend>(std::vector<ScriptEntry>{{"*", "plan"}}));
    EXPECT_EQ(r.complete(req_of({{"user", "x"}}, RoleContext::planner)).text, "plan");
    EXPECT_THROW(r.complete(req_of({{"user", "x"}}, RoleContext::coordinator)), Error);
    EXPECT_EQ(tw->calls(), 1u);
    Router empty;
    try {
        empty.complete(req_of({{"user", "x"}}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::provider_unavailable);
    }
}

TEST(HttpBackend, TalksOpenAiShape) {
    httplib::Server srv;
    Json seen;
    srv.Post("/v1/chat/completions", [&](const httplib::Request& rq, httplib::Response& rs) {
        seen = Json::parse(rq.body);
        rs.set_content(R"({"choices":[{"message":{"role":"assistant","content":"pong"}}],)"
                       R"("usage":{"prompt_tokens":3,"completion_tokens":1}})",
                       "application/json");
    });
    const int port = srv.bind_to_any_port("127.0.0.1");
    std::thread t([&] { srv.listen_after_bind(); });
    srv.wait_until_ready();

    HttpBackendConfig cfg;
    cfg.port = port;
    cfg.model = "local-model";
    HttpBackend b(cfg);
    const auto c = b.complete(req_of({{"user", "ping"}}));
    EXPECT_EQ(c.text, "pong");
    EXPECT_EQ(c.usage.completion_tokens, 1u);
    EXPECT_EQ(seen["model"], "local-model");
    EXPECT_EQ(seen["temperature"], 0.0);
    srv.stop();
    t.join();
}

TEST(HttpBackend, UnreachableIsProviderUnavailable) {
    httplib::Server probe;
    const int port = probe.bind_to_any_port("127.0.0.1");
    probe.stop();
    HttpBackendConfig cfg;
    cfg.port = port;
    cfg.timeout_ms = 200;
    HttpBackend b(cfg);
    try {
        b.complete(req_of({{"user", "ping"}}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::provider_unavailable);
    }
}
