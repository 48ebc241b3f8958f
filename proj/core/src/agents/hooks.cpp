#include "autonoma/agents/hooks.hpp"

#include "autonoma/common/error.hpp"

namespace autonoma::agents {

std::string_view to_string(HookStage s) {
    switch (s) {
        case HookStage::pre_plan: return "pre_plan";
        case HookStage::post_plan: return "post_plan";
        case HookStage::pre_task: return "pre_task";
        case HookStage::post_task: return "post_task";
        case HookStage::pre_report: return "pre_report";
        case HookStage::post_report: return "post_report";
    }
    return "pre_plan";
}

HookStage hook_stage_from_string(std::string_view s) {
    for (auto st : {HookStage::pre_plan, HookStage::post_plan, HookStage::pre_task, HookStage::post_task,
                    HookStage::pre_report, HookStage::post_report}) {
        if (to_string(st) == s) return st;
    }
    throw Error(Errc::invalid_argument, "unknown hook stage: " + std::string(s));
}

std::string HookPipeline::install_hook(Hook hook) {
    std::lock_guard lock(mu_);
    if (hook.id.empty()) hook.id = "hook-" + std::to_string(next_id_);
    ++next_id_;
    const auto id = hook.id;
    hooks_.push_back(std::move(hook));
    return id;
}

std::optional<HookAbort> HookPipeline::run(HookStage stage, Json& payload) const {
    std::vector<Hook> hooks;
    {
        std::lock_guard lock(mu_);
        hooks = hooks_;
    }
    for (const auto& h : hooks) {
        if (h.stage != stage || !h.fn) continue;
        try {
            if (h.action == HookAction::transform) {
                h.fn(payload);
                continue;
            }
            Json copy = payload;
            auto verdict = h.fn(copy);
            if (h.action == HookAction::validate && verdict) return HookAbort{h.id, *verdict};
        } catch (const std::exception& e) {
            return HookAbort{h.id, e.what()};
        }
    }
    return std::nullopt;
}

}  // namespace autonoma::agents
