#include "autonoma/model/serialization.hpp"

#include "autonoma/common/error.hpp"

namespace autonoma::model {
namespace {

const Json& req(const Json& j, const char* key) {
    if (!j.is_object()) throw Error(Errc::corrupt, "expected object");
    auto it = j.find(key);
    if (it == j.end()) throw Error(Errc::corrupt, std::string("missing field '") + key + "'");
    return *it;
}

std::string req_str(const Json& j, const char* key) {
    const auto& v = req(j, key);
    if (!v.is_string()) throw Error(Errc::corrupt, std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

std::int64_t req_int(const Json& j, const char* key) {
    const auto& v = req(j, key);
    if (!v.is_number_integer()) {
        throw Error(Errc::corrupt, std::string("field '") + key + "' must be an integer");
    }
    return v.get<std::int64_t>();
}

bool req_bool(const Json& j, const char* key) {
    const auto& v = req(j, key);
    if (!v.is_boolean()) throw Error(Errc::corrupt, std::string("field '") + key + "' must be a boolean");
    return v.get<bool>();
}

std::vector<std::string> req_str_list(const Json& j, const char* key) {
    const auto& v = req(j, key);
    if (!v.is_array()) throw Error(Errc::corrupt, std::string("field '") + key + "' must be an array");
    std::vector<std::string> out;
    for (const auto& x : v) {
        if (!x.is_string()) throw Error(Errc::corrupt, std::string("field '") + key + "' must hold strings");
        out.push_back(x.get<std::string>());
    }
    return out;
}

}  // namespace

void to_json(Json& j, const Message& m) {
    j = Json{{"id", m.id},
             {"role", to_string(m.role)},
             {"content", m.content},
             {"lang", to_string(m.lang)},
             {"attachments", m.attachments},
             {"timestamp", m.timestamp},
             {"metadata", m.metadata}};
}

void from_json(const Json& j, Message& m) {
    m.id = req_str(j, "id");
    m.role = role_from_string(req_str(j, "role"));
    m.content = req_str(j, "content");
    m.lang = lang_from_string(req_str(j, "lang"));
    m.attachments = req_str_list(j, "attachments");
    m.timestamp = req_int(j, "timestamp");
    m.metadata.clear();
    const auto& md = req(j, "metadata");
    if (!md.is_object()) throw Error(Errc::corrupt, "metadata must be an object");
    for (const auto& [k, v] : md.items()) {
        if (!v.is_string()) throw Error(Errc::corrupt, "metadata values must be strings");
        m.metadata[k] = v.get<std::string>();
    }
}

void to_json(Json& j, const PlanStep& s) {
    j = Json{{"id", s.id},
             {"description", s.description},
             {"required_capability", s.required_capability},
             {"depends_on", s.depends_on}};
    if (s.agent_hint) j["agent_hint"] = *s.agent_hint;
}

void from_json(const Json& j, PlanStep& s) {
    s.id = req_str(j, "id");
    s.description = req_str(j, "description");
    s.required_capability = req_str(j, "required_capability");
    s.depends_on = req_str_list(j, "depends_on");
    s.agent_hint.reset();
    if (auto it = j.find("agent_hint"); it != j.end() && !it->is_null()) {
        if (!it->is_string()) throw Error(Errc::corrupt, "agent_hint must be a string");
        s.agent_hint = it->get<std::string>();
    }
}

void to_json(Json& j, const Plan& p) {
    j = Json{{"thought", p.thought}, {"steps", p.steps}, {"created_by", p.created_by}};
}

void from_json(const Json& j, Plan& p) {
    p.thought = req_str(j, "thought");
    p.created_by = req_str(j, "created_by");
    const auto& steps = req(j, "steps");
    if (!steps.is_array()) throw Error(Errc::corrupt, "steps must be an array");
    p.steps.clear();
    for (const auto& s : steps) p.steps.push_back(s.get<PlanStep>());
}

void to_json(Json& j, const TaskStatus& t) {
    j = Json{{"phase", to_string(t.phase)}, {"attempts", t.attempts}};
    if (t.last_heartbeat) j["last_heartbeat"] = *t.last_heartbeat;
}

void from_json(const Json& j, TaskStatus& t) {
    t.phase = task_phase_from_string(req_str(j, "phase"));
    t.attempts = static_cast<std::uint32_t>(req_int(j, "attempts"));
    t.last_heartbeat.reset();
    if (j.contains("last_heartbeat")) t.last_heartbeat = req_int(j, "last_heartbeat");
}

void to_json(Json& j, const HandoffRecord& h) {
    j = Json{{"from_role", to_string(h.from_role)},
             {"to_role", to_string(h.to_role)},
             {"payload_digest", h.payload_digest},
             {"accepted", h.accepted},
             {"timestamp", h.timestamp}};
}

void from_json(const Json& j, HandoffRecord& h) {
    h.from_role = role_from_string(req_str(j, "from_role"));
    h.to_role = role_from_string(req_str(j, "to_role"));
    h.payload_digest = req_str(j, "payload_digest");
    h.accepted = req_bool(j, "accepted");
    h.timestamp = req_int(j, "timestamp");
}

void to_json(Json& j, const WorkflowEvent& e) {
    j = Json{{"seq", e.seq}, {"kind", to_string(e.kind)}, {"payload", e.payload}, {"timestamp", e.timestamp}};
}

void from_json(const Json& j, WorkflowEvent& e) {
    const auto seq = req_int(j, "seq");
    if (seq < 1) throw Error(Errc::corrupt, "seq must be positive");
    e.seq = static_cast<std::uint64_t>(seq);
    e.kind = event_kind_from_string(req_str(j, "kind"));
    e.payload = req(j, "payload");
    if (!e.payload.is_object()) throw Error(Errc::corrupt, "payload must be an object");
    e.timestamp = req_int(j, "timestamp");
}

void to_json(Json& j, const WorkflowState& s) {
    Json tasks = Json::object();
    for (const auto& [id, t] : s.task_states) tasks[id] = t;
    j = Json{{"status", to_string(s.status)},
             {"task_states", tasks},
             {"last_seq", s.last_seq},
             {"retry_limit", s.retry_limit},
             {"pending_approvals", s.pending_approvals},
             {"clarifications", s.clarifications},
             {"turns", s.turns},
             {"handed_off", s.handed_off},
             {"close_reason", s.close_reason},
             {"close_cause", s.close_cause}};
    if (s.plan) j["plan"] = *s.plan;
}

void from_json(const Json& j, WorkflowState& s) {
    s.status = workflow_status_from_string(req_str(j, "status"));
    s.task_states.clear();
    const auto& tasks = req(j, "task_states");
    if (!tasks.is_object()) throw Error(Errc::corrupt, "task_states must be an object");
    for (const auto& [id, t] : tasks.items()) s.task_states[id] = t.get<TaskStatus>();
    s.last_seq = static_cast<std::uint64_t>(req_int(j, "last_seq"));
    s.retry_limit = static_cast<std::uint32_t>(req_int(j, "retry_limit"));
    const auto approvals = req_str_list(j, "pending_approvals");
    s.pending_approvals = {approvals.begin(), approvals.end()};
    s.clarifications = static_cast<std::uint32_t>(req_int(j, "clarifications"));
    s.turns = static_cast<std::uint32_t>(req_int(j, "turns"));
    s.handed_off = req_bool(j, "handed_off");
    s.close_reason = req_str(j, "close_reason");
    s.close_cause = req_str(j, "close_cause");
    s.plan.reset();
    if (j.contains("plan")) s.plan = j.at("plan").get<Plan>();
}

std::string serialize_event(const WorkflowEvent& e) { return canonical_dump(Json(e)); }

WorkflowEvent parse_event(std::string_view line) {
    Json j;
    try {
        j = Json::parse(line);
    } catch (const Json::exception& ex) {
        throw Error(Errc::corrupt, std::string("malformed event: ") + ex.what());
    }
    try {
        return j.get<WorkflowEvent>();
    } catch (const Json::exception& ex) {
        throw Error(Errc::corrupt, std::string("malformed event: ") + ex.what());
    }
}

Json levels_to_json(const Levels& levels) {
    Json out = Json::array();
    for (const auto& level : levels) out.push_back(level);
    return out;
}

}  // namespace autonoma::model
