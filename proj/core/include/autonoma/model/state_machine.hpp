#pragma once

#include "autonoma/model/types.hpp"

#include <optional>
#include <span>
#include <string>

namespace autonoma::model {

// Applies one event to a state. Pure. Throws Error(GapInSequence) when
// event.seq != state.last_seq + 1 and Error(IllegalTransition) when the
// (status, event) pair is not in the transition table; the latter always
// indicates an engine bug.
//
//   Created                PromptReceived    -> Created
//                          IntentClassified  -> Planning | Created | AwaitingClarification | Rejected
//   AwaitingClarification  PromptReceived    -> Created
//   Planning               HandoffToPlanner, HandoffRecorded -> Planning
//                          PlanProposed      -> Executing (after an accepted handoff)
//   Executing              task events       -> Executing | Reporting (all tasks terminal)
//                          ApprovalRequested -> AwaitingApproval
//   AwaitingApproval       task events, ApprovalRequested -> AwaitingApproval
//                          ApprovalResolved  -> Executing once none pending
//   Reporting              HandoffRecorded, ReportReady -> Reporting
//   any active status      WorkflowClosed    -> Complete | PartialFailure | Failed
//   terminal statuses      PromptReceived    -> Created (next workflow)
WorkflowState transition(const WorkflowState& state, const WorkflowEvent& event);

// Fold of transition from the initial state. Throws GapInSequence when seq
// does not run 1, 2, 3, ...
WorkflowState replay(std::span<const WorkflowEvent> events);

// Outcome the workflow closes with given its task states.
WorkflowStatus closing_outcome(const WorkflowState& state);

// Returns a description of the first violated WorkflowState invariant.
std::optional<std::string> check_invariants(const WorkflowState& state);

}  // namespace autonoma::model
