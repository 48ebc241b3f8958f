#include "autonoma/model/task_result.hpp"

#include "autonoma/common/error.hpp"

namespace autonoma::model {

void to_json(Json& j, const TaskResult& r) {
    j = Json{{"step_id", r.step_id}, {"duration_ms", r.duration_ms}, {"agent_id", r.agent_id}};
    if (const auto* s = std::get_if<StepSucceeded>(&r.outcome)) {
        j["outcome"] = {{"status", "Succeeded"}, {"artifacts", s->artifacts}, {"summary", s->summary}, {"data", s->data}};
    } else if (const auto* f = std::get_if<StepFailed>(&r.outcome)) {
        j["outcome"] = {{"status", "Failed"}, {"cause", f->cause}, {"attempts", f->attempts}};
    } else {
        const auto& k = std::get<StepSkipped>(r.outcome);
        j["outcome"] = {{"status", "Skipped"}, {"failed_ancestor", k.failed_ancestor}};
    }
}

void from_json(const Json& j, TaskResult& r) {
    try {
        r.step_id = j.at("step_id").get<std::string>();
        r.duration_ms = j.at("duration_ms").get<std::int64_t>();
        r.agent_id = j.at("agent_id").get<std::string>();
        const auto& o = j.at("outcome");
        const auto status = o.at("status").get<std::string>();
        if (status == "Succeeded") {
            r.outcome = StepSucceeded{o.at("artifacts").get<std::vector<std::string>>(),
                                      o.at("summary").get<std::string>(), o.at("data")};
        } else if (status == "Failed") {
            r.outcome = StepFailed{o.at("cause").get<std::string>(), o.at("attempts").get<std::uint32_t>()};
        } else if (status == "Skipped") {
            r.outcome = StepSkipped{o.at("failed_ancestor").get<std::string>()};
        } else {
            throw Error(Errc::corrupt, "unknown task outcome: " + status);
        }
    } catch (const Json::exception& e) {
        throw Error(Errc::corrupt, std::string("task result: ") + e.what());
    }
}

}  // namespace autonoma::model
