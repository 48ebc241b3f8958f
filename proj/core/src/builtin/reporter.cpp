#include "autonoma/builtin/reporter.hpp"

#include "autonoma/common/error.hpp"
#include "autonoma/model/serialization.hpp"

#include <algorithm>
#include <set>

namespace autonoma::builtin {

namespace {

struct Advice {
    const char* cause;
    const char* en;
    const char* ar;
};

// Matched by prefix, first hit wins.
const Advice kAdvice[] = {
    {"AckTimeout", "Check that the agent is running and raise ack_timeout if it is slow to start.",
     "تحقق من تشغيل الوكيل وارفع مهلة الإقرار إذا كان بطيئا في البدء."},
    {"Timeout", "Raise max_runtime for this agent or split the step into smaller steps.",
     "ارفع الحد الأقصى لزمن التشغيل لهذا الوكيل أو قسم الخطوة إلى خطوات أصغر."},
    {"Stalled", "The agent stopped sending heartbeats; inspect it and raise heartbeat_interval if it is busy.",
     "توقف الوكيل عن إرسال نبضات الحياة؛ افحصه وارفع فاصل النبض إذا كان مشغولا."},
    {"PrivilegeViolation", "Adjust the agent grants or change the step so it stays within them.",
     "عدّل صلاحيات الوكيل أو غيّر الخطوة لتبقى ضمنها."},
    {"JailEscape", "Use paths inside the agent jail.", "استخدم مسارات داخل المجلد المعزول للوكيل."},
    {"PlanParseError", "Inspect the raw model output and the repair prompt.", "افحص مخرجات النموذج الخام وموجه الإصلاح."},
    {"SchemaViolation", "Inspect the raw model output and the repair prompt.", "افحص مخرجات النموذج الخام وموجه الإصلاح."},
    {"ApprovalDenied", "The action was declined; rephrase the request if a different action is wanted.",
     "تم رفض الإجراء؛ أعد صياغة الطلب إذا كنت تريد إجراء مختلفا."},
    {"NoCapableAgent", "Register an agent that declares the required capability.",
     "سجّل وكيلا يعلن عن القدرة المطلوبة."},
    {"AllToolsFailed", "Check the configured search tools and their network grants.",
     "تحقق من أدوات البحث المهيأة وصلاحيات الشبكة الخاصة بها."},
    {"InvalidQuery", "Provide a non-empty research query.", "قدّم استعلام بحث غير فارغ."},
    {"ExecDenied", "Grant allow_exec to the executing agent or use another agent.",
     "امنح صلاحية التنفيذ للوكيل المنفذ أو استخدم وكيلا آخر."},
    {"ScriptFailed", "Inspect the script output and fix the reported error.", "افحص مخرجات البرنامج النصي وأصلح الخطأ."},
    {"NotFound", "Check that the referenced files exist.", "تحقق من وجود الملفات المشار إليها."},
    {"AgentPanic", "Inspect the agent logs for the crash.", "افحص سجلات الوكيل لمعرفة سبب التعطل."},
    {"Cancelled", "The workflow was cancelled; submit the request again to retry.",
     "تم إلغاء سير العمل؛ أعد إرسال الطلب للمحاولة مرة أخرى."},
};

std::string first_line(const std::string& s) {
    const auto nl = s.find('\n');
    return nl == std::string::npos ? s : s.substr(0, nl);
}

bool ar(model::Lang l) { return l == model::Lang::ar; }

}  // namespace

std::string recommendation_for(const std::string& cause, model::Lang lang) {
    for (const auto& a : kAdvice) {
        if (cause.rfind(a.cause, 0) == 0) return ar(lang) ? a.ar : a.en;
    }
    if (cause.rfind("Skipped", 0) == 0) {
        return ar(lang) ? "عالج فشل الخطوة السابقة ثم أعد التشغيل." : "Resolve the upstream failure, then re-run.";
    }
    return ar(lang) ? "افحص سجل المهمة لمعرفة التفاصيل." : "Inspect the task log for details.";
}

Report compile_report(const model::Plan& plan, const std::vector<model::TaskResult>& results, model::Lang lang) {
    if (results.empty()) throw Error(Errc::nothing_to_report, "no task results to report");

    // Plan order first, unknown ids after in input order.
    std::vector<const model::TaskResult*> ordered;
    for (const auto& s : plan.steps) {
        for (const auto& r : results) {
            if (r.step_id == s.id) ordered.push_back(&r);
        }
    }
    for (const auto& r : results) {
        if (std::find(ordered.begin(), ordered.end(), &r) == ordered.end()) ordered.push_back(&r);
    }
    const auto description = [&](const std::string& id) {
        for (const auto& s : plan.steps) {
            if (s.id == id) return s.description;
        }
        return id;
    };

    Report rep;
    rep.lang = lang;
    std::size_t succeeded = 0;
    std::set<std::string> seen_sources;
    std::string analysis;
    for (const auto* r : ordered) {
        if (!analysis.empty()) analysis += "\n\n";
        analysis += "[" + r->step_id + "] " + description(r->step_id) + "\n";
        if (const auto* ok = std::get_if<model::StepSucceeded>(&r->outcome)) {
            ++succeeded;
            rep.key_findings.push_back(description(r->step_id) + ": " + first_line(ok->summary));
            analysis += ok->summary;
            if (ok->data.is_object() && ok->data.contains("items") && ok->data["items"].is_array()) {
                for (const auto& item : ok->data["items"]) {
                    const auto src = item.value("source_id", std::string{});
                    if (!src.empty() && seen_sources.insert(src).second) rep.sources.push_back(src);
                }
            }
            for (const auto& a : ok->artifacts) {
                if (seen_sources.insert(a).second) rep.sources.push_back(a);
            }
        } else if (const auto* bad = std::get_if<model::StepFailed>(&r->outcome)) {
            rep.failure_log.push_back({r->step_id, bad->cause, recommendation_for(bad->cause, lang)});
            analysis += (ar(lang) ? "فشلت بعد " : "Failed after ") + std::to_string(bad->attempts) +
                        (ar(lang) ? " محاولة: " : " attempt(s): ") + bad->cause;
        } else {
            const auto& sk = std::get<model::StepSkipped>(r->outcome);
            const auto cause = "Skipped: " + sk.failed_ancestor + " failed";
            rep.failure_log.push_back({r->step_id, cause, recommendation_for(cause, lang)});
            analysis += (ar(lang) ? "تم التخطي لأن الخطوة " : "Skipped because ") + sk.failed_ancestor +
                        (ar(lang) ? " فشلت" : " failed");
        }
    }
    rep.detailed_analysis = analysis;

    const auto n = std::to_string(ordered.size());
    const auto s = std::to_string(succeeded);
    const auto f = std::to_string(rep.failure_log.size());
    if (ar(lang)) {
        rep.executive_summary = "تم إنجاز " + s + " من " + n + " خطوات للطلب: " + plan.thought;
        if (!rep.failure_log.empty()) rep.executive_summary += " لم تكتمل " + f + " خطوة.";
        rep.conclusions_and_recommendations =
            rep.failure_log.empty() ? "اكتملت جميع الخطوات بنجاح."
                                    : "راجع سجل الإخفاقات وعالج الأسباب المذكورة قبل إعادة التشغيل.";
    } else {
        rep.executive_summary = "Completed " + s + " of " + n + " step(s) for: " + plan.thought;
        if (!rep.failure_log.empty()) rep.executive_summary += " " + f + " step(s) did not complete.";
        rep.conclusions_and_recommendations =
            rep.failure_log.empty() ? "All steps completed successfully."
                                    : "Review the failure log and address the listed causes before re-running.";
    }
    return rep;
}

Json report_to_json(const Report& r) {
    Json log = Json::array();
    for (const auto& e : r.failure_log) {
        log.push_back({{"step_id", e.step_id}, {"cause", e.cause}, {"recommendation", e.recommendation}});
    }
    return Json{{"executive_summary", r.executive_summary},
                {"key_findings", r.key_findings},
                {"detailed_analysis", r.detailed_analysis},
                {"conclusions_and_recommendations", r.conclusions_and_recommendations},
                {"sources", r.sources},
                {"failure_log", log},
                {"lang", model::to_string(r.lang)}};
}

Report report_from_json(const Json& j) {
    try {
        Report r;
        r.executive_summary = j.at("executive_summary").get<std::string>();
        r.key_findings = j.at("key_findings").get<std::vector<std::string>>();
        r.detailed_analysis = j.at("detailed_analysis").get<std::string>();
        r.conclusions_and_recommendations = j.at("conclusions_and_recommendations").get<std::string>();
        r.sources = j.at("sources").get<std::vector<std::string>>();
        for (const auto& e : j.at("failure_log")) {
            r.failure_log.push_back({e.at("step_id").get<std::string>(), e.at("cause").get<std::string>(),
                                     e.at("recommendation").get<std::string>()});
        }
        r.lang = model::lang_from_string(j.at("lang").get<std::string>());
        return r;
    } catch (const Json::exception& e) {
        throw Error(Errc::corrupt, std::string("report: ") + e.what());
    }
}

std::string render_markdown(const Report& r) {
    const bool a = ar(r.lang);
    std::string md;
    md += a ? "# الملخص التنفيذي\n\n" : "# Executive summary\n\n";
    md += r.executive_summary + "\n\n";
    md += a ? "## النتائج الرئيسية\n\n" : "## Key findings\n\n";
    for (const auto& k : r.key_findings) md += "- " + k + "\n";
    md += a ? "\n## التحليل التفصيلي\n\n" : "\n## Detailed analysis\n\n";
    md += r.detailed_analysis + "\n\n";
    md += a ? "## الخلاصة والتوصيات\n\n" : "## Conclusions and recommendations\n\n";
    md += r.conclusions_and_recommendations + "\n";
    if (!r.sources.empty()) {
        md += a ? "\n## المصادر\n\n" : "\n## Sources\n\n";
        for (const auto& s : r.sources) md += "- " + s + "\n";
    }
    if (!r.failure_log.empty()) {
        md += a ? "\n## سجل الإخفاقات\n\n" : "\n## Failure log\n\n";
        for (const auto& e : r.failure_log) md += "- " + e.step_id + ": " + e.cause + " (" + e.recommendation + ")\n";
    }
    return md;
}

agents::AgentOutcome ReporterAgent::run(const agents::TaskPayload& payload, agents::TaskContext& ctx) {
    const auto& c = payload.context;
    if (!c.is_object() || !c.contains("plan") || !c.contains("results")) {
        throw Error(Errc::nothing_to_report, "reporter context lacks plan or results");
    }
    const auto plan = c["plan"].get<model::Plan>();
    std::vector<model::TaskResult> results;
    for (const auto& r : c["results"]) results.push_back(r.get<model::TaskResult>());
    const auto report = compile_report(plan, results, payload.lang);

    agents::AgentOutput out;
    out.summary = report.executive_summary;
    out.data = report_to_json(report);
    if (auto* sink = ctx.artifacts()) {
        out.artifacts.push_back(sink->write_artifact("report.md", render_markdown(report)));
        for (const auto& e : report.failure_log) {
            sink->append_line("failures.log",
                              canonical_dump(Json{{"step_id", e.step_id},
                                                  {"cause", e.cause},
                                                  {"recommendation", e.recommendation},
                                                  {"timestamp", ctx.now()}}));
        }
        if (!report.failure_log.empty()) out.artifacts.push_back("artifacts/failures.log");
    }
    return out;
}

agents::AgentManifest reporter_manifest() {
    agents::AgentManifest m;
    m.id = "reporter";
    m.display_name = "Reporter";
    m.capabilities = {agents::cap::report};
    m.description = "Aggregates task results into the final report";
    return m;
}

}  // namespace autonoma::builtin
