#pragma once

#include "autonoma/common/clock.hpp"
#include "autonoma/model/types.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

namespace autonoma::provider {
class Router;
}

namespace autonoma::coordinator {

struct Intent {
    model::IntentClass cls = model::IntentClass::Task;
    double confidence = 0.0;
    std::vector<std::string> cues;  // ids of the rules that fired
};

struct PatternRule {
    std::string id;  // "<set>:<line>"
    std::string pattern;
    std::regex re;
};

// One case-insensitive ECMAScript regex per line; blank lines and `#`
// comments skipped. Throws ConfigError naming the offending line.
std::vector<PatternRule> parse_patterns(std::string_view text, const std::string& set_name);
std::vector<PatternRule> load_patterns(const std::filesystem::path& file, const std::string& set_name);

struct RuleSet {
    std::vector<PatternRule> harmful;    // searched anywhere in the message
    std::vector<PatternRule> greetings;  // must match the whole trimmed message

    // Loads harmful_patterns.txt and greeting_patterns.txt from `dir`.
    static RuleSet load(const std::filesystem::path& dir);
};

// Extra routing cues derived from the message and history. Returned strings
// are appended to Intent::cues; they never change the class.
using EntityExtractor =
    std::function<std::vector<std::string>(const model::Message&, const std::vector<model::Message>&)>;

struct CoordinatorOptions {
    std::uint32_t max_clarifications = 2;
};

// ar when at least 30% of letters are Arabic, en when at least 30% are
// Basic-Latin letters and not ar, und otherwise.
model::Lang detect_language(std::string_view text);

// True when the message leans on a pronoun with nothing in the message or
// history to resolve it.
bool has_unresolved_referent(const model::Message& message, const std::vector<model::Message>& history);

class Coordinator {
public:
    Coordinator(RuleSet rules, const provider::Router* provider = nullptr, CoordinatorOptions options = {});

    // Cascade: harmful patterns, greetings, referent check, provider. A
    // provider failure yields Ambiguous. `prior_clarifications` counts the
    // clarification turns already spent on this prompt; past the bound an
    // ambiguous turn becomes CasualChat.
    Intent classify(const model::Message& message, const std::vector<model::Message>& history,
                    std::uint32_t prior_clarifications = 0) const;

    // Coordinator reply for a non-Task intent, in the user's language.
    std::optional<model::Message> reply_for(const Intent& intent, const model::Message& message,
                                            TimestampMs now) const;

    void set_entity_extractor(EntityExtractor fn) { extractor_ = std::move(fn); }

private:
    std::optional<Intent> provider_intent(const model::Message& message,
                                          const std::vector<model::Message>& history) const;

    RuleSet rules_;
    const provider::Router* provider_;
    CoordinatorOptions options_;
    EntityExtractor extractor_;
};

struct HandoffContext {
    std::string conversation_id;
    std::vector<model::Message> context;
};

// The planner side of a handoff: returns true when it acknowledged within
// the timeout.
using PlannerAck = std::function<bool(const HandoffContext&, std::int64_t ack_timeout_ms)>;

// Digest over the conversation id and the context handed over.
std::string handoff_digest(const HandoffContext& ctx);

// Offers the context to the planner. accepted=false means the planner did
// not acknowledge in time (AckTimeout); the caller records the event.
model::HandoffRecord handoff_to_planner(const HandoffContext& ctx, const PlannerAck& planner_ack,
                                        std::int64_t ack_timeout_ms, TimestampMs now);

}  // namespace autonoma::coordinator
