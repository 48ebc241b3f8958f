#include "autonoma/common/error.hpp"

namespace autonoma {

std::string_view to_string(Errc code) {
    switch (code) {
        case Errc::cyclic_dependency:   return "CyclicDependency";
        case Errc::unknown_capability:  return "UnknownCapability";
        case Errc::empty_plan:          return "EmptyPlan";
        case Errc::duplicate_step_id:   return "DuplicateStepId";
        case Errc::unknown_dependency:  return "UnknownDependency";
        case Errc::illegal_transition:  return "IllegalTransition";
        case Errc::gap_in_sequence:     return "GapInSequence";
        case Errc::provider_unavailable: return "ProviderUnavailable";
        case Errc::ack_timeout:         return "AckTimeout";
        case Errc::script_exhausted:    return "ScriptExhausted";
        case Errc::fingerprint_mismatch: return "FingerprintMismatch";
        case Errc::schema_violation:    return "SchemaViolation";
        case Errc::plan_parse_error:    return "PlanParseError";
        case Errc::no_capable_agent:    return "NoCapableAgent";
        case Errc::duplicate_agent_id:  return "DuplicateAgentId";
        case Errc::grant_lint_failure:  return "GrantLintFailure";
        case Errc::unknown_agent:       return "UnknownAgent";
        case Errc::timeout:             return "Timeout";
        case Errc::agent_panic:         return "AgentPanic";
        case Errc::privilege_violation: return "PrivilegeViolation";
        case Errc::all_tools_failed:    return "AllToolsFailed";
        case Errc::invalid_query:       return "InvalidQuery";
        case Errc::exec_denied:         return "ExecDenied";
        case Errc::jail_escape:         return "JailEscape";
        case Errc::not_found:           return "NotFound";
        case Errc::approval_denied:     return "ApprovalDenied";
        case Errc::nothing_to_report:   return "NothingToReport";
        case Errc::storage_full:        return "StorageFull";
        case Errc::corrupt_existing:    return "CorruptExisting";
        case Errc::corrupt:             return "Corrupt";
        case Errc::chain_head_mismatch: return "ChainHeadMismatch";
        case Errc::invalid_argument:    return "InvalidArgument";
        case Errc::io_error:            return "IoError";
        case Errc::filtered:            return "Filtered";
        case Errc::unauthenticated:     return "Unauthenticated";
        case Errc::busy:                return "Busy";
        case Errc::too_large:           return "TooLarge";
        case Errc::no_pending_approval: return "NoPendingApproval";
        case Errc::digest_mismatch:     return "DigestMismatch";
        case Errc::config_error:        return "ConfigError";
    }
    return "Unknown";
}

}  // namespace autonoma
