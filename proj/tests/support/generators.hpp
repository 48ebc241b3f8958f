#pragma once

// Hand-rolled seeded generators for property tests.

#include "autonoma/common/digest.hpp"
#include "autonoma/common/error.hpp"
#include "autonoma/model/events.hpp"
#include "autonoma/model/plan.hpp"
#include "autonoma/model/state_machine.hpp"
#include "autonoma/store/store.hpp"

#include <random>
#include <string>
#include <vector>

namespace testing_support {

using Rng = std::mt19937_64;

inline std::string random_utf8(Rng& rng, std::size_t max_codepoints) {
    static const char32_t pools[][2] = {
        {0x20, 0x7e}, {0x00, 0x1f}, {0x600, 0x6ff}, {0x4e00, 0x4e80}, {0x1f600, 0x1f64f}, {0xe9, 0xff},
    };
    std::string out;
    const std::size_t n = rng() % (max_codepoints + 1);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& pool = pools[rng() % (sizeof(pools) / sizeof(pools[0]))];
        char32_t cp = pool[0] + static_cast<char32_t>(rng() % (pool[1] - pool[0] + 1));
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
        } else {
            out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
        }
    }
    return out;
}

inline autonoma::model::Message random_message(Rng& rng, std::size_t index) {
    using namespace autonoma::model;
    Message m;
    m.id = "m" + std::to_string(index);
    m.role = static_cast<Role>(rng() % 6);
    m.content = random_utf8(rng, 40);
    m.lang = static_cast<Lang>(rng() % 3);
    for (std::size_t i = rng() % 3; i > 0; --i) m.attachments.push_back("artifacts/a" + std::to_string(rng() % 100));
    m.timestamp = static_cast<autonoma::TimestampMs>(rng() % 2000000000000ULL);
    if (rng() % 3 == 0) m.metadata["urgency"] = random_utf8(rng, 5);
    return m;
}

inline autonoma::model::Plan random_plan(Rng& rng, std::size_t max_steps) {
    using namespace autonoma::model;
    Plan p{random_utf8(rng, 20), {}, "gen"};
    const std::size_t n = 1 + rng() % max_steps;
    for (std::size_t i = 0; i < n; ++i) {
        PlanStep s{"s" + std::to_string(i), random_utf8(rng, 15), "web_search", std::nullopt, {}};
        if (rng() % 4 == 0) s.agent_hint = "researcher";
        for (std::size_t j = 0; j < i; ++j) {
            if (rng() % 3 == 0) s.depends_on.push_back("s" + std::to_string(j));
        }
        p.steps.push_back(std::move(s));
    }
    return p;
}

// Random event log accepted by transition: candidate events are proposed at
// random and kept only when the table accepts them.
inline std::vector<autonoma::model::WorkflowEvent> random_legal_events(Rng& rng, std::size_t proposals) {
    using namespace autonoma::model;
    namespace pl = autonoma::model::payload;
    auto vplan = validate_plan(random_plan(rng, 5), {"web_search"});
    const auto retry_limit = static_cast<std::uint32_t>(rng() % 3);
    std::vector<WorkflowEvent> log;
    WorkflowState s;
    auto offer = [&](EventKind k, autonoma::Json payload) {
        WorkflowEvent e{s.last_seq + 1, k, std::move(payload), static_cast<autonoma::TimestampMs>(1000 + s.last_seq)};
        try {
            s = transition(s, e);
            log.push_back(std::move(e));
        } catch (const autonoma::Error&) {
        }
    };
    const auto n = vplan.plan().steps.size();
    for (std::size_t i = 0; i < proposals; ++i) {
        const auto& sid = vplan.plan().steps[rng() % n].id;
        const auto attempts = s.task_states.count(sid) ? s.task_states.at(sid).attempts : 0u;
        switch (rng() % 12) {
            case 0: offer(EventKind::PromptReceived, pl::prompt_received(random_message(rng, i))); break;
            case 1:
                offer(EventKind::IntentClassified,
                      pl::intent_classified(static_cast<IntentClass>(rng() % 4), double(rng() % 100) / 100.0,
                                            {"rule/" + std::to_string(rng() % 5)}, Lang::en, std::nullopt));
                break;
            case 2:
                offer(EventKind::HandoffToPlanner,
                      pl::handoff_to_planner({Role::coordinator, Role::planner, autonoma::sha256_hex(sid), true, 5}));
                break;
            case 3: offer(EventKind::PlanProposed, pl::plan_proposed(vplan, retry_limit)); break;
            case 4: offer(EventKind::TaskDispatched, pl::task_dispatched(sid, "researcher", attempts + 1, "d")); break;
            case 5: offer(EventKind::Heartbeat, pl::heartbeat(sid, attempts, random_utf8(rng, 4))); break;
            case 6: offer(EventKind::TaskRetried, pl::task_retried(sid, attempts, "Timeout", 250)); break;
            case 7:
                offer(EventKind::TaskSucceeded,
                      pl::task_succeeded(sid, "researcher", attempts, random_utf8(rng, 10), {"artifacts/x"}, 12));
                break;
            case 8: offer(EventKind::TaskFailed, pl::task_failed(sid, "researcher", attempts, "AgentPanic", 3)); break;
            case 9:
                offer(EventKind::HandoffRecorded,
                      pl::handoff_recorded({Role::supervisor, Role::agent, "ab", rng() % 2 == 0, 7}));
                break;
            case 10: offer(EventKind::ReportReady, pl::report_ready({{"executive_summary", random_utf8(rng, 8)}})); break;
            default: offer(EventKind::WorkflowClosed, pl::workflow_closed("completed", "")); break;
        }
    }
    return log;
}

inline autonoma::store::Conversation random_conversation(Rng& rng) {
    autonoma::store::Conversation c;
    c.record.id = autonoma::random_uuid();
    c.record.title = random_utf8(rng, 12);
    c.record.created_at = static_cast<autonoma::TimestampMs>(rng() % 2000000000000ULL);
    for (std::size_t i = rng() % 6; i > 0; --i) c.messages.push_back(random_message(rng, c.messages.size()));
    c.events = random_legal_events(rng, rng() % 120);
    c.record.state = autonoma::model::replay(c.events);
    return c;
}

}  // namespace testing_support
