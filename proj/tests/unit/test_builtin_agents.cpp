#include "autonoma/agents/approvals.hpp"
#include "autonoma/agents/direct_context.hpp"
#include "autonoma/agents/invoke.hpp"
#include "autonoma/builtin/coder.hpp"
#include "autonoma/builtin/file_manager.hpp"
#include "autonoma/builtin/reporter.hpp"
#include "autonoma/builtin/researcher.hpp"
#include "autonoma/builtin/stubs.hpp"
#include "autonoma/common/error.hpp"
#include "autonoma/model/serialization.hpp"

#include "support/generators.hpp"
#include "support/jail_corpus.hpp"
#include "support/temp_dir.hpp"

#include <gtest/gtest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>

namespace fs = std::filesystem;
using namespace autonoma;
using namespace autonoma::builtin;
using agents::AgentFailure;
using agents::AgentOutput;
using agents::ApprovalNeeded;
using agents::DirectContext;
using agents::RegisteredAgent;

namespace {

Errc error_code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no autonoma::Error thrown";
    return Errc::io_error;
}

std::string read_all(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class FailingTool final : public SearchTool {
public:
    std::string name() const override { return "down"; }
    std::vector<SearchHit> search(const std::string&, std::size_t, const agents::PrivilegeGrants&) override {
        ++calls;
        throw std::runtime_error("service unavailable");
    }
    int calls = 0;
};

std::shared_ptr<FixtureSearchTool> corpus() {
    return std::make_shared<FixtureSearchTool>(fs::path(AUTONOMA_FIXTURE_DIR) / "corpus");
}

agents::TaskPayload task(const std::string& description, Json args = Json::object()) {
    agents::TaskPayload p;
    p.conversation_id = "conv-1";
    p.step_id = "s1";
    p.description = description;
    p.args = std::move(args);
    return p;
}

model::TaskResult ok(const std::string& id, const std::string& summary, Json data = Json::object()) {
    return {id, model::StepSucceeded{{}, summary, std::move(data)}, 10, "researcher"};
}

model::TaskResult failed(const std::string& id, const std::string& cause, std::uint32_t attempts) {
    return {id, model::StepFailed{cause, attempts}, 10, "coder"};
}

model::TaskResult skipped(const std::string& id, const std::string& ancestor) {
    return {id, model::StepSkipped{ancestor}, 0, ""};
}

model::Plan two_step_plan() {
    model::Plan p;
    p.thought = "battery price summary";
    p.steps = {{"s1", "Research battery prices", "web_search", std::nullopt, {}},
               {"s2", "Chart the prices", "code_exec", std::nullopt, {"s1"}}};
    return p;
}

}  // namespace

// ---- researcher ----

TEST(Researcher, CorpusQueryYieldsSourcedFindings) {
    const auto f = research("battery prices", {corpus()}, 3, {}, 1000);
    ASSERT_EQ(f.items.size(), 2u);
    std::set<std::string> sources;
    for (const auto& i : f.items) {
        EXPECT_FALSE(i.claim.empty());
        EXPECT_EQ(i.retrieved_at, 1000);
        sources.insert(i.source_id);
    }
    EXPECT_EQ(sources, (std::set<std::string>{"doc-battery-2024", "doc-battery-outlook"}));
    EXPECT_EQ(findings_to_json(f)["items"].size(), 2u);
}

TEST(Researcher, ExhaustedBudgetOfFailuresIsAllToolsFailed) {
    auto down = std::make_shared<FailingTool>();
    EXPECT_EQ(error_code_of([&] { research("battery prices", {down, corpus()}, 1, {}, 0); }), Errc::all_tools_failed);
    EXPECT_EQ(down->calls, 1);
}

TEST(Researcher, FailingToolIsToleratedWhenAnotherSucceeds) {
    auto down = std::make_shared<FailingTool>();
    const auto f = research("battery prices", {down, corpus()}, 3, {}, 0);
    EXPECT_EQ(f.items.size(), 2u);
}

TEST(Researcher, EmptyQueryIsInvalid) {
    EXPECT_EQ(error_code_of([&] { research("", {corpus()}, 3, {}, 0); }), Errc::invalid_query);
    EXPECT_EQ(error_code_of([&] { research("   ", {corpus()}, 3, {}, 0); }), Errc::invalid_query);
}

TEST(Researcher, NoMatchesIsEmptyNotFailure) {
    const auto f = research("quantum gravity", {corpus()}, 3, {}, 0);
    EXPECT_TRUE(f.items.empty());
}

TEST(Researcher, HttpToolRespectsNetworkGrants) {
    HttpSearchTool tool("search.example.org", 80, "/search");
    EXPECT_EQ(error_code_of([&] { tool.search("x", 3, {}); }), Errc::privilege_violation);
    agents::PrivilegeGrants g;
    g.allow_network = true;
    g.network_allowlist = {"other.example.org"};
    EXPECT_EQ(error_code_of([&] { tool.search("x", 3, g); }), Errc::privilege_violation);
}

TEST(Researcher, AgentThroughKit) {
    RegisteredAgent a{researcher_manifest(), std::make_shared<ResearcherAgent>(
                                                 std::vector<std::shared_ptr<SearchTool>>{corpus()})};
    DirectContext ctx;
    const auto out = agents::invoke(a, task("battery prices"), ctx);
    ASSERT_TRUE(std::holds_alternative<AgentOutput>(out));
    EXPECT_EQ(std::get<AgentOutput>(out).data["items"].size(), 2u);
    EXPECT_FALSE(ctx.heartbeats().empty());
}

// ---- coder ----

class CoderTest : public ::testing::Test {
protected:
    void SetUp() override {
        grants_.allow_exec = true;
        grants_.fs_jail_root = tmp_.path();
        grants_.max_runtime_ms = 10000;
    }
    testing_support::TempDir tmp_;
    agents::PrivilegeGrants grants_;
};

TEST_F(CoderTest, PrintsFortyTwo) {
    const auto r = run_script("print(42)", ScriptLang::python, grants_);
    EXPECT_EQ(r.stdout_text, "42\n");
    EXPECT_EQ(r.exit_code, 0);
}

TEST_F(CoderTest, ShellScript) {
    const auto r = run_script("echo hi; pwd", ScriptLang::shell, grants_);
    EXPECT_EQ(r.stdout_text.substr(0, 3), "hi\n");
    EXPECT_NE(r.stdout_text.find("work"), std::string::npos);
}

TEST_F(CoderTest, InfiniteLoopTimesOut) {
    grants_.max_runtime_ms = 1000;
    const auto t0 = std::chrono::steady_clock::now();
    EXPECT_EQ(error_code_of([&] { run_script("while True:\n    pass\n", ScriptLang::python, grants_); }), Errc::timeout);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
    EXPECT_GE(ms, 1000);
    EXPECT_LT(ms, 5000);
}

TEST_F(CoderTest, ExecDeniedWithoutGrant) {
    grants_.allow_exec = false;
    EXPECT_EQ(error_code_of([&] { run_script("print(1)", ScriptLang::python, grants_); }), Errc::exec_denied);
    grants_.allow_exec = true;
    grants_.fs_jail_root.reset();
    EXPECT_EQ(error_code_of([&] { run_script("print(1)", ScriptLang::python, grants_); }), Errc::exec_denied);
}

TEST_F(CoderTest, NetworkCutOffWithoutGrant) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    ASSERT_GE(fd, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    ASSERT_EQ(::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr), 0);
    ASSERT_EQ(::listen(fd, 4), 0);
    socklen_t len = sizeof addr;
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
    const auto port = std::to_string(ntohs(addr.sin_port));
    const auto probe =
        "import socket\n"
        "try:\n"
        "    socket.create_connection(('127.0.0.1', " + port + "), timeout=1)\n"
        "    print('connected')\n"
        "except OSError:\n"
        "    print('blocked')\n";
    EXPECT_EQ(run_script(probe, ScriptLang::python, grants_).stdout_text, "blocked\n");
    grants_.allow_network = true;
    grants_.network_allowlist = {"127.0.0.1"};
    EXPECT_EQ(run_script(probe, ScriptLang::python, grants_).stdout_text, "connected\n");
    ::close(fd);
}

TEST_F(CoderTest, AgentMapsOutcomes) {
    RegisteredAgent a{coder_manifest(tmp_.path()), std::make_shared<CoderAgent>()};
    DirectContext ctx;
    auto out = agents::invoke(a, task("compute", {{"source", "print(6*7)"}, {"language", "python"}}), ctx);
    ASSERT_TRUE(std::holds_alternative<AgentOutput>(out));
    EXPECT_EQ(std::get<AgentOutput>(out).summary, "42\n");
    out = agents::invoke(a, task("compute", {{"source", "import sys; sys.exit(3)"}}), ctx);
    ASSERT_TRUE(std::holds_alternative<AgentFailure>(out));
    EXPECT_EQ(std::get<AgentFailure>(out).cause, "ScriptFailed");
    EXPECT_FALSE(std::get<AgentFailure>(out).retryable);
}

// ---- file manager ----

class FileManagerTest : public ::testing::Test {
protected:
    void SetUp() override { testing_support::build_jail_fixture(tmp_.path()); }
    agents::Jail jail() const { return agents::Jail(tmp_.path() / "jail"); }
    fs::path jail_path(const std::string& rel) const { return tmp_.path() / "jail" / rel; }
    testing_support::TempDir tmp_;
};

TEST_F(FileManagerTest, ListIsLexicographic) {
    const auto r = execute_fileop({FileOpKind::list, {"reports"}, ""}, jail());
    EXPECT_EQ(r.entries, (std::vector<std::string>{"keep.txt", "old.txt"}));
    const auto root = execute_fileop({FileOpKind::list, {"."}, ""}, jail());
    EXPECT_EQ(root.entries.front(), "dangling_out");
    EXPECT_NE(std::find(root.entries.begin(), root.entries.end(), "docs/"), root.entries.end());
}

TEST_F(FileManagerTest, SearchAndRead) {
    const auto s = execute_fileop({FileOpKind::search, {"reports"}, "old"}, jail());
    EXPECT_EQ(s.entries, (std::vector<std::string>{"reports/old.txt"}));
    const auto r = execute_fileop({FileOpKind::read, {"docs/file.txt"}, ""}, jail());
    EXPECT_EQ(r.content, "inside");
    EXPECT_EQ(error_code_of([&] { execute_fileop({FileOpKind::read, {"docs/missing.txt"}, ""}, jail()); }),
              Errc::not_found);
}

TEST_F(FileManagerTest, DeleteIsPendingWithoutApproval) {
    const auto before = testing_support::snapshot_tree(tmp_.path());
    const FileOp op{FileOpKind::remove, {"reports/old.txt"}, ""};
    const auto r = execute_fileop(op, jail());
    EXPECT_EQ(r.status, FileOpResult::Status::pending_approval);
    EXPECT_EQ(r.digest, action_digest(op));
    EXPECT_EQ(testing_support::snapshot_tree(tmp_.path()), before);
    const auto denied = execute_fileop(op, jail(), [](const std::string&) { return false; });
    EXPECT_EQ(denied.status, FileOpResult::Status::pending_approval);
    EXPECT_EQ(testing_support::snapshot_tree(tmp_.path()), before);
}

TEST_F(FileManagerTest, ApprovedDeleteRuns) {
    const FileOp op{FileOpKind::remove, {"reports/old.txt"}, ""};
    std::string seen;
    const auto r = execute_fileop(op, jail(), [&](const std::string& d) {
        seen = d;
        return true;
    });
    EXPECT_EQ(r.status, FileOpResult::Status::done);
    EXPECT_EQ(seen, action_digest(op));
    EXPECT_FALSE(fs::exists(jail_path("reports/old.txt")));
    EXPECT_TRUE(fs::exists(jail_path("reports/keep.txt")));
}

TEST_F(FileManagerTest, DestructiveClassification) {
    const auto j = jail();
    EXPECT_TRUE(is_destructive({FileOpKind::remove, {"reports/old.txt"}, ""}, j));
    EXPECT_TRUE(is_destructive({FileOpKind::move, {"reports/old.txt", "reports/new.txt"}, ""}, j));
    EXPECT_TRUE(is_destructive({FileOpKind::write, {"reports/old.txt"}, "x"}, j));
    EXPECT_FALSE(is_destructive({FileOpKind::write, {"reports/fresh.txt"}, "x"}, j));
    EXPECT_TRUE(is_destructive({FileOpKind::copy, {"docs/file.txt", "reports/keep.txt"}, ""}, j));
    EXPECT_FALSE(is_destructive({FileOpKind::copy, {"docs/file.txt", "reports/copy.txt"}, ""}, j));
    EXPECT_FALSE(is_destructive({FileOpKind::list, {"."}, ""}, j));
    EXPECT_FALSE(is_destructive({FileOpKind::read, {"docs/file.txt"}, ""}, j));
}

TEST_F(FileManagerTest, NonDestructiveWriteAndCopyRunImmediately) {
    EXPECT_EQ(execute_fileop({FileOpKind::write, {"reports/new.txt"}, "fresh"}, jail()).status,
              FileOpResult::Status::done);
    EXPECT_EQ(read_all(jail_path("reports/new.txt")), "fresh");
    EXPECT_EQ(execute_fileop({FileOpKind::copy, {"docs/file.txt", "reports/copy.txt"}, ""}, jail()).status,
              FileOpResult::Status::done);
    EXPECT_EQ(read_all(jail_path("reports/copy.txt")), "inside");
}

TEST_F(FileManagerTest, DigestBindsContent) {
    const FileOp a{FileOpKind::write, {"reports/old.txt"}, "one"};
    const FileOp b{FileOpKind::write, {"reports/old.txt"}, "two"};
    const FileOp c{FileOpKind::write, {"reports/keep.txt"}, "one"};
    EXPECT_NE(action_digest(a), action_digest(b));
    EXPECT_NE(action_digest(a), action_digest(c));
    EXPECT_EQ(action_digest(a), action_digest(FileOp{a}));
    // Approval for one digest does not authorise another.
    const auto r = execute_fileop(b, jail(), [&](const std::string& d) { return d == action_digest(a); });
    EXPECT_EQ(r.status, FileOpResult::Status::pending_approval);
    EXPECT_EQ(read_all(jail_path("reports/old.txt")), "old report");
}

TEST_F(FileManagerTest, EscapesRejectedWithoutEffect) {
    const auto before = testing_support::snapshot_tree(tmp_.path());
    EXPECT_EQ(error_code_of([&] { execute_fileop({FileOpKind::read, {"../../etc/passwd"}, ""}, jail()); }),
              Errc::jail_escape);
    const auto approve_all = [](const std::string&) { return true; };
    for (const auto& p : testing_support::adversarial_paths()) {
        for (auto kind : {FileOpKind::write, FileOpKind::remove, FileOpKind::read, FileOpKind::list}) {
            try {
                execute_fileop({kind, {p}, "pwned"}, jail(), approve_all);
            } catch (const Error&) {
            }
        }
        try {
            execute_fileop({FileOpKind::copy, {"docs/file.txt", p}, ""}, jail(), approve_all);
        } catch (const Error&) {
        }
        try {
            execute_fileop({FileOpKind::move, {p, "moved"}, ""}, jail(), approve_all);
        } catch (const Error&) {
        }
    }
    const auto after = testing_support::snapshot_tree(tmp_.path());
    for (const auto& [path, digest] : before) {
        if (path.rfind("outside", 0) == 0) {
            ASSERT_TRUE(after.count(path)) << path;
            EXPECT_EQ(after.at(path), digest) << path;
        }
    }
    for (const auto& [path, digest] : after) {
        if (path.rfind("outside", 0) == 0) EXPECT_TRUE(before.count(path)) << "created outside: " << path;
    }
    EXPECT_FALSE(fs::exists(tmp_.path() / "outside" / "created-through-link.txt"));
    EXPECT_EQ(read_all("/etc/hostname").empty(), read_all("/etc/hostname").empty());
}

TEST_F(FileManagerTest, AgentApprovalFlow) {
    agents::ApprovalAuthority authority;
    agents::MemoryArtifactSink sink;
    RegisteredAgent a{file_manager_manifest(tmp_.path() / "jail"), std::make_shared<FileManagerAgent>()};
    const auto payload = task("delete old report", {{"op", "delete"}, {"path", "reports/old.txt"}});

    DirectContext first(0, &sink, &authority, "conv-1");
    auto out = agents::invoke(a, payload, first);
    ASSERT_TRUE(std::holds_alternative<ApprovalNeeded>(out));
    const auto digest = std::get<ApprovalNeeded>(out).action_digest;
    EXPECT_TRUE(fs::exists(jail_path("reports/old.txt")));

    // Approval bound to another conversation does not count.
    authority.issue("conv-2", digest, 0);
    DirectContext wrong(0, &sink, &authority, "conv-1");
    EXPECT_TRUE(std::holds_alternative<ApprovalNeeded>(agents::invoke(a, payload, wrong)));

    authority.issue("conv-1", digest, 0);
    DirectContext second(0, &sink, &authority, "conv-1");
    out = agents::invoke(a, payload, second);
    ASSERT_TRUE(std::holds_alternative<AgentOutput>(out));
    EXPECT_FALSE(fs::exists(jail_path("reports/old.txt")));
}

TEST_F(FileManagerTest, AgentEscapeIsPrivilegeViolation) {
    RegisteredAgent a{file_manager_manifest(tmp_.path() / "jail"), std::make_shared<FileManagerAgent>()};
    DirectContext ctx;
    const auto out = agents::invoke(a, task("read", {{"op", "read"}, {"path", "../../etc/passwd"}}), ctx);
    ASSERT_TRUE(std::holds_alternative<AgentFailure>(out));
    EXPECT_EQ(std::get<AgentFailure>(out).cause, "PrivilegeViolation");
    EXPECT_FALSE(std::get<AgentFailure>(out).retryable);
}

// ---- reporter ----

TEST(Reporter, AllSucceeded) {
    Json data{{"items", Json::array({{{"source_id", "doc-battery-2024"}}, {{"source_id", "doc-battery-outlook"}}})}};
    const auto rep = compile_report(two_step_plan(), {ok("s2", "chart.png written"), ok("s1", "Prices fell.", data)},
                                    model::Lang::en);
    EXPECT_EQ(rep.executive_summary, "Completed 2 of 2 step(s) for: battery price summary");
    ASSERT_EQ(rep.key_findings.size(), 2u);
    EXPECT_EQ(rep.key_findings[0], "Research battery prices: Prices fell.");  // plan order
    EXPECT_EQ(rep.sources, (std::vector<std::string>{"doc-battery-2024", "doc-battery-outlook"}));
    EXPECT_TRUE(rep.failure_log.empty());
}

TEST(Reporter, FailureAndSkipAreLoggedWithAdvice) {
    const auto rep = compile_report(two_step_plan(), {failed("s1", "Timeout", 3), skipped("s2", "s1")}, model::Lang::en);
    ASSERT_EQ(rep.failure_log.size(), 2u);
    EXPECT_EQ(rep.failure_log[0].cause, "Timeout");
    EXPECT_EQ(rep.failure_log[0].recommendation, recommendation_for("Timeout", model::Lang::en));
    EXPECT_EQ(rep.failure_log[1].cause, "Skipped: s1 failed");
    EXPECT_NE(rep.executive_summary.find("2 step(s) did not complete"), std::string::npos);
}

TEST(Reporter, ArabicOutput) {
    const auto rep = compile_report(two_step_plan(), {ok("s1", "ok"), failed("s2", "ExecDenied", 1)}, model::Lang::ar);
    EXPECT_EQ(rep.lang, model::Lang::ar);
    EXPECT_EQ(rep.executive_summary.rfind("تم إنجاز 1 من 2", 0), 0u);
    EXPECT_NE(recommendation_for("ExecDenied", model::Lang::ar), recommendation_for("ExecDenied", model::Lang::en));
    const auto md = render_markdown(rep);
    EXPECT_NE(md.find("# الملخص التنفيذي"), std::string::npos);
}

TEST(Reporter, EmptyResultsIsNothingToReport) {
    EXPECT_EQ(error_code_of([] { compile_report(two_step_plan(), {}, model::Lang::en); }), Errc::nothing_to_report);
}

TEST(Reporter, EveryCauseHasAdvice) {
    for (const auto* cause : {"AckTimeout", "Timeout", "Stalled", "PrivilegeViolation", "JailEscape", "PlanParseError",
                              "SchemaViolation", "ApprovalDenied", "NoCapableAgent", "AllToolsFailed", "InvalidQuery",
                              "ExecDenied", "ScriptFailed", "NotFound", "AgentPanic", "Cancelled", "Skipped: s1 failed",
                              "SomethingNew"}) {
        for (auto lang : {model::Lang::en, model::Lang::ar}) EXPECT_FALSE(recommendation_for(cause, lang).empty());
    }
}

// Every non-empty result set yields a report whose failure log covers exactly
// the failed and skipped steps, in plan order.
TEST(Reporter, TotalOverRandomResults) {
    testing_support::Rng rng(11);
    for (int iter = 0; iter < 300; ++iter) {
        const auto plan = testing_support::random_plan(rng, 8);
        std::vector<model::TaskResult> results;
        std::vector<std::string> expected_failures;
        std::uniform_int_distribution<int> pick(0, 3);
        for (const auto& s : plan.steps) {
            switch (pick(rng)) {
                case 0: results.push_back(ok(s.id, testing_support::random_utf8(rng, 40))); break;
                case 1:
                    results.push_back(failed(s.id, "Timeout", 2));
                    expected_failures.push_back(s.id);
                    break;
                case 2:
                    results.push_back(skipped(s.id, plan.steps.front().id));
                    expected_failures.push_back(s.id);
                    break;
                default: break;
            }
        }
        if (results.empty()) continue;
        std::shuffle(results.begin(), results.end(), rng);
        for (auto lang : {model::Lang::en, model::Lang::ar}) {
            const auto rep = compile_report(plan, results, lang);
            std::vector<std::string> logged;
            for (const auto& f : rep.failure_log) {
                EXPECT_FALSE(f.recommendation.empty());
                logged.push_back(f.step_id);
            }
            EXPECT_EQ(logged, expected_failures);
            EXPECT_FALSE(rep.executive_summary.empty());
            EXPECT_EQ(report_from_json(report_to_json(rep)), rep);
            EXPECT_FALSE(render_markdown(rep).empty());
        }
    }
}

TEST(Reporter, AgentWritesArtifacts) {
    agents::MemoryArtifactSink sink;
    RegisteredAgent a{reporter_manifest(), std::make_shared<ReporterAgent>()};
    Json results = Json::array();
    for (const auto& r : {ok("s1", "Prices fell."), failed("s2", "Timeout", 3)}) results.push_back(r);
    auto p = task("report");
    p.context = Json{{"plan", two_step_plan()}, {"results", results}};
    DirectContext ctx(0, &sink);
    const auto out = agents::invoke(a, p, ctx);
    ASSERT_TRUE(std::holds_alternative<AgentOutput>(out)) << std::get<AgentFailure>(out).detail;
    ASSERT_TRUE(sink.files.count("artifacts/report.md"));
    ASSERT_TRUE(sink.files.count("artifacts/failures.log"));
    const auto& log = sink.files["artifacts/failures.log"];
    EXPECT_EQ(std::count(log.begin(), log.end(), '\n'), 1);
    EXPECT_EQ(Json::parse(log.substr(0, log.find('\n')))["step_id"], "s2");
}

// ---- automation stubs ----

TEST(Stubs, SplitsActions) {
    EXPECT_EQ(split_actions("open the site, log in and download the invoice then close it"),
              (std::vector<std::string>{"open the site", "log in", "download the invoice", "close it"}));
    EXPECT_EQ(split_actions("  single  "), (std::vector<std::string>{"single"}));
    EXPECT_TRUE(split_actions(" , ").empty());
    EXPECT_EQ(split_actions("sand and candy"), (std::vector<std::string>{"sand", "candy"}));
}

TEST(Stubs, ScreenshotsOnlyWhenAppropriate) {
    agents::MemoryArtifactSink sink;
    const RecordingStubAgent browser(RecordingStubAgent::Kind::browser);
    const RecordingStubAgent computer(RecordingStubAgent::Kind::computer);
    EXPECT_FALSE(browser.perform("open example.org", &sink).screenshot.has_value());
    const auto shot = browser.perform("open example.org and take a Screenshot", &sink);
    ASSERT_TRUE(shot.screenshot.has_value());
    EXPECT_EQ(sink.files[*shot.screenshot], std::string(placeholder_png()));
    EXPECT_TRUE(computer.perform("click ok", &sink).screenshot.has_value());
    EXPECT_FALSE(computer.perform("   ", &sink).screenshot.has_value());
    EXPECT_EQ(placeholder_png().substr(1, 3), "PNG");
}

TEST(Stubs, ManifestsPassLint) {
    for (const auto& m : {browser_manifest(), computer_manifest(), reporter_manifest(), researcher_manifest(),
                          coder_manifest("/tmp/jail"), file_manager_manifest("/tmp/jail")}) {
        EXPECT_TRUE(agents::lint_manifest(m).empty()) << m.id;
    }
}
