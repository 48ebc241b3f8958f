#include "autonoma/coordinator/coordinator.hpp"

#include "autonoma/common/digest.hpp"
#include "autonoma/common/error.hpp"
#include "autonoma/common/utf8.hpp"
#include "autonoma/model/serialization.hpp"
#include "autonoma/provider/provider.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace autonoma::coordinator {

namespace {

using model::IntentClass;
using model::Lang;

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    return std::string(s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1));
}

bool is_arabic(char32_t c) {
    return (c >= 0x0600 && c <= 0x06ff) || (c >= 0x0750 && c <= 0x077f) || (c >= 0x08a0 && c <= 0x08ff) ||
           (c >= 0xfb50 && c <= 0xfdff) || (c >= 0xfe70 && c <= 0xfeff);
}

bool is_arabic_non_letter(char32_t c) {
    return c == 0x060c || c == 0x061b || c == 0x061f || c == 0x0640 || (c >= 0x0660 && c <= 0x066d) ||
           (c >= 0x06f0 && c <= 0x06f9) || c == 0x06d4;
}

bool is_basic_latin_letter(char32_t c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

// Rough alphabetic test: ASCII letters plus non-ASCII outside the common
// punctuation, digit, symbol and emoji ranges.
bool is_letter(char32_t c) {
    if (c < 0x80) return is_basic_latin_letter(c);
    if (c == 0xfffd) return false;
    if (c >= 0x00a0 && c <= 0x00bf) return false;
    if (c == 0x00d7 || c == 0x00f7) return false;
    if (is_arabic(c)) return !is_arabic_non_letter(c);
    if (c >= 0x2000 && c <= 0x2bff) return false;  // punctuation, arrows, symbols
    if (c >= 0x3000 && c <= 0x303f) return false;  // CJK punctuation
    if (c >= 0xfe00 && c <= 0xfe0f) return false;  // variation selectors
    if (c >= 0xff00 && c <= 0xff20) return false;  // fullwidth punctuation and digits
    if (c >= 0x1f000) return false;                // emoji and pictographs
    return true;
}

const std::set<std::string>& pronouns() {
    static const std::set<std::string> s{"it",    "this",  "that",  "these", "those", "them", "they",
                                         "its",   "their", "هذا",   "هذه",   "ذلك",   "تلك",  "هو",
                                         "هي",    "هم",    "هؤلاء"};
    return s;
}

const std::set<std::string>& filler() {
    static const std::set<std::string> s{
        "a",    "an",    "the",   "to",   "of",    "for",  "and",   "or",   "in",    "on",   "at",
        "me",   "my",    "i",     "you",  "your",  "we",   "us",    "can",  "could", "would", "will",
        "please", "pls", "now",   "again", "just",  "do",   "up",    "is",   "are",   "be",   "with",
        "hi",   "hello", "hey",   "how",  "what",  "ok",   "okay",  "thanks", "من",   "في",   "على",
        "إلى",  "عن",    "لو",    "من فضلك", "رجاء", "أرجو", "لي"};
    return s;
}

// Drops the Arabic comma, semicolon and question mark that tokenize()
// leaves attached (U+060C, U+061B, U+061F).
std::string strip_arabic_punct(const std::string& token) {
    std::string out;
    for (std::size_t i = 0; i < token.size(); ++i) {
        if (token[i] == '\xd8' && i + 1 < token.size() &&
            (token[i + 1] == '\x8c' || token[i + 1] == '\x9b' || token[i + 1] == '\x9f')) {
            ++i;
            continue;
        }
        out.push_back(token[i]);
    }
    return out;
}

std::vector<std::string> tokens_of(std::string_view text) {
    std::vector<std::string> out;
    for (auto& t : utf8::tokenize(text)) {
        auto s = strip_arabic_punct(t);
        if (!s.empty()) out.push_back(std::move(s));
    }
    return out;
}

std::size_t content_tokens(const std::vector<std::string>& tokens) {
    return static_cast<std::size_t>(std::count_if(tokens.begin(), tokens.end(), [](const std::string& t) {
        return !pronouns().count(t) && !filler().count(t);
    }));
}

std::optional<IntentClass> class_in_text(std::string_view text) {
    const auto lower = utf8::to_lower_ascii(text);
    std::optional<IntentClass> best;
    std::size_t best_pos = std::string::npos;
    for (auto c : {IntentClass::CasualChat, IntentClass::Harmful, IntentClass::Ambiguous, IntentClass::Task}) {
        const auto pos = lower.find(utf8::to_lower_ascii(model::to_string(c)));
        if (pos < best_pos) {
            best_pos = pos;
            best = c;
        }
    }
    return best;
}

std::string provider_role(model::Role r) { return r == model::Role::user ? "user" : "assistant"; }

constexpr const char* kClassifierPrompt =
    "Classify the user's latest message for a task automation assistant. Answer with a JSON object "
    "{\"class\": \"CasualChat\" | \"Harmful\" | \"Ambiguous\" | \"Task\", \"confidence\": number between 0 and 1}. "
    "Task means an actionable request; Ambiguous means it cannot be acted on without clarification; Harmful "
    "means it must be refused; CasualChat is small talk.";

}  // namespace

std::vector<PatternRule> parse_patterns(std::string_view text, const std::string& set_name) {
    std::vector<PatternRule> rules;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        try {
            rules.push_back({set_name + ":" + std::to_string(lineno), t,
                             std::regex(t, std::regex::ECMAScript | std::regex::icase | std::regex::optimize)});
        } catch (const std::regex_error& e) {
            throw Error(Errc::config_error,
                        set_name + " pattern on line " + std::to_string(lineno) + " is invalid: " + e.what());
        }
    }
    return rules;
}

std::vector<PatternRule> load_patterns(const std::filesystem::path& file, const std::string& set_name) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error(Errc::config_error, "cannot read pattern file " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_patterns(ss.str(), set_name);
}

RuleSet RuleSet::load(const std::filesystem::path& dir) {
    RuleSet r;
    r.harmful = load_patterns(dir / "harmful_patterns.txt", "harmful");
    r.greetings = load_patterns(dir / "greeting_patterns.txt", "greeting");
    return r;
}

model::Lang detect_language(std::string_view text) {
    std::size_t letters = 0, arabic = 0, latin = 0;
    for (const auto c : utf8::decode(text)) {
        if (!is_letter(c)) continue;
        ++letters;
        if (is_arabic(c)) ++arabic;
        if (is_basic_latin_letter(c)) ++latin;
    }
    if (letters == 0) return Lang::und;
    if (arabic * 10 >= letters * 3) return Lang::ar;
    if (latin * 10 >= letters * 3) return Lang::en;
    return Lang::und;
}

bool has_unresolved_referent(const model::Message& message, const std::vector<model::Message>& history) {
    const auto tokens = tokens_of(message.content);
    const bool leans_on_pronoun =
        std::any_of(tokens.begin(), tokens.end(), [](const std::string& t) { return pronouns().count(t) > 0; });
    if (!leans_on_pronoun || content_tokens(tokens) >= 3) return false;
    // Any earlier message with substance can serve as the antecedent.
    for (const auto& h : history) {
        if (h.id == message.id) continue;
        if (content_tokens(tokens_of(h.content)) > 0) return false;
    }
    return true;
}

Coordinator::Coordinator(RuleSet rules, const provider::Router* provider, CoordinatorOptions options)
    : rules_(std::move(rules)), provider_(provider), options_(options) {}

std::optional<Intent> Coordinator::provider_intent(const model::Message& message,
                                                   const std::vector<model::Message>& history) const {
    provider::CompletionRequest req;
    req.role_context = provider::RoleContext::coordinator;
    req.messages.push_back({"system", kClassifierPrompt});
    for (const auto& h : history) {
        if (h.id != message.id) req.messages.push_back({provider_role(h.role), h.content});
    }
    req.messages.push_back({"user", message.content});
    const auto text = provider_->complete(req).text;

    const auto doc = Json::parse(text, nullptr, false);
    if (doc.is_object() && doc.contains("class") && doc["class"].is_string()) {
        try {
            Intent i;
            i.cls = model::intent_class_from_string(doc["class"].get<std::string>());
            const auto conf = doc.value("confidence", 0.5);
            i.confidence = std::clamp(conf, 0.0, 1.0);
            i.cues.push_back("provider:" + std::string(model::to_string(i.cls)));
            return i;
        } catch (const std::exception&) {
        }
    }
    if (auto cls = class_in_text(text)) {
        return Intent{*cls, 0.5, {"provider:" + std::string(model::to_string(*cls))}};
    }
    return std::nullopt;
}

Intent Coordinator::classify(const model::Message& message, const std::vector<model::Message>& history,
                             std::uint32_t prior_clarifications) const {
    Intent intent;
    bool decided = false;
    const auto text = trim(message.content);

    for (const auto& r : rules_.harmful) {
        if (std::regex_search(text, r.re)) {
            if (!decided) intent = Intent{IntentClass::Harmful, 1.0, {}};
            decided = true;
            intent.cues.push_back(r.id);
        }
    }
    if (!decided) {
        for (const auto& r : rules_.greetings) {
            if (std::regex_match(text, r.re)) {
                intent = Intent{IntentClass::CasualChat, 1.0, {r.id}};
                decided = true;
                break;
            }
        }
    }
    if (!decided && (text.empty() || has_unresolved_referent(message, history))) {
        intent = Intent{IntentClass::Ambiguous, 1.0, {text.empty() ? "empty-message" : "unresolved-referent"}};
        decided = true;
    }
    if (!decided) {
        if (provider_ == nullptr) {
            // Rules-only deployment: anything that survives the rules is a task.
            intent = Intent{IntentClass::Task, 0.5, {}};
        } else {
            try {
                auto p = provider_intent(message, history);
                intent = p ? *p : Intent{IntentClass::Ambiguous, 0.0, {"provider:unparseable"}};
            } catch (const std::exception&) {
                intent = Intent{IntentClass::Ambiguous, 0.0, {"provider:unavailable"}};
            }
        }
    }
    if (intent.cls == IntentClass::Ambiguous && prior_clarifications >= options_.max_clarifications) {
        intent.cls = IntentClass::CasualChat;
        intent.cues.push_back("clarification-limit");
    }
    if (extractor_) {
        for (auto& cue : extractor_(message, history)) intent.cues.push_back(std::move(cue));
    }
    return intent;
}

std::optional<model::Message> Coordinator::reply_for(const Intent& intent, const model::Message& message,
                                                     TimestampMs now) const {
    if (intent.cls == IntentClass::Task) return std::nullopt;
    auto lang = detect_language(message.content);
    if (lang == Lang::und) lang = Lang::en;
    const bool ar = lang == Lang::ar;
    const bool gave_up =
        std::find(intent.cues.begin(), intent.cues.end(), "clarification-limit") != intent.cues.end();

    std::string text;
    switch (intent.cls) {
        case IntentClass::Harmful:
            text = ar ? "عذرًا، لا يمكنني المساعدة في هذا الطلب." : "Sorry, I can't help with that request.";
            break;
        case IntentClass::Ambiguous:
            text = ar ? "هل يمكنك توضيح ما تريد مني القيام به بمزيد من التفاصيل؟"
                      : "Could you tell me a bit more about what you would like me to do?";
            break;
        case IntentClass::CasualChat:
            if (gave_up) {
                text = ar ? "لم أتمكن من تحديد المهمة بعد. يمكنك وصفها مجددًا بتفاصيل أكثر متى شئت."
                          : "I still couldn't work out the task. Describe it again with more detail whenever "
                            "you're ready.";
            } else {
                text = ar ? "أهلًا! يمكنني البحث وتشغيل الشيفرات وإدارة الملفات وكتابة التقارير. بماذا أساعدك؟"
                          : "Hello! I can research topics, run code, manage files and write reports. What would "
                            "you like me to do?";
            }
            break;
        case IntentClass::Task: break;
    }
    model::Message reply;
    reply.id = message.id + ":reply";
    reply.role = model::Role::coordinator;
    reply.content = std::move(text);
    reply.lang = lang;
    reply.timestamp = now;
    return reply;
}

std::string handoff_digest(const HandoffContext& ctx) {
    Json j{{"conversation_id", ctx.conversation_id}, {"context", ctx.context}};
    return sha256_hex(canonical_dump(j));
}

model::HandoffRecord handoff_to_planner(const HandoffContext& ctx, const PlannerAck& planner_ack,
                                        std::int64_t ack_timeout_ms, TimestampMs now) {
    model::HandoffRecord r;
    r.from_role = model::Role::coordinator;
    r.to_role = model::Role::planner;
    r.payload_digest = handoff_digest(ctx);
    r.accepted = planner_ack && planner_ack(ctx, ack_timeout_ms);
    r.timestamp = now;
    return r;
}

}  // namespace autonoma::coordinator
