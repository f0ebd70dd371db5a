// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "aasim/common.hpp"

#include <vector>

namespace aasim::goms {

// GOMS operator-level workflow models. M = mental, P = physical, W = wait.
// Operator counts are an interaction-complexity proxy, not timing predictions.

enum class Operator { Mental, Physical, Wait };

enum class WorkflowLabel { EoaRecovery, PoaSteadyState, AoaInit, AoaSteadyState, AoaTopUp };

inline std::string_view workflowName(WorkflowLabel w) {
    switch (w) {
        case WorkflowLabel::EoaRecovery: return "EoaRecovery";
        case WorkflowLabel::PoaSteadyState: return "PoaSteadyState";
        case WorkflowLabel::AoaInit: return "AoaInit";
        case WorkflowLabel::AoaSteadyState: return "AoaSteadyState";
        case WorkflowLabel::AoaTopUp: return "AoaTopUp";
    }
    return "Unknown";
}

struct WorkflowModel {
    WorkflowLabel label;
    std::vector<Operator> operators;
};

struct GomsCount {
    size_t m = 0;
    size_t p = 0;
    size_t w = 0;
    size_t total = 0;
};

inline GomsCount gomsCount(const WorkflowModel& model) {
    GomsCount c;
    for (auto op : model.operators) {
        switch (op) {
            case Operator::Mental: ++c.m; break;
            case Operator::Physical: ++c.p; break;
            case Operator::Wait: ++c.w; break;
        }
    }
    c.total = c.m + c.p + c.w;
    return c;
}

// The five reference workflows, step for step:
//   EOA failure recovery: perceive error, decide strategy, select service,
//     navigate, calculate amount, execute swap/bridge, wait, return, retry.
//   POA steady state: perceive prompt, decide which paymaster, configure the
//     API call, sign & submit.
//   AOA one-time init: decide community, claim card on-chain, wait for mint,
//     load the card.
//   AOA steady state: perceive prompt, confirm (card auto-deducts).
//   AOA top-up: perceive low balance, recharge.
inline std::vector<WorkflowModel> standardWorkflows() {
    using O = Operator;
    return {
        {WorkflowLabel::EoaRecovery,
         {O::Mental, O::Mental, O::Mental, O::Physical, O::Mental, O::Physical, O::Wait, O::Physical, O::Physical}},
        {WorkflowLabel::PoaSteadyState, {O::Mental, O::Mental, O::Physical, O::Physical}},
        {WorkflowLabel::AoaInit, {O::Mental, O::Physical, O::Wait, O::Physical}},
        {WorkflowLabel::AoaSteadyState, {O::Mental, O::Physical}},
        {WorkflowLabel::AoaTopUp, {O::Mental, O::Physical}},
    };
}

inline WorkflowModel standardWorkflow(WorkflowLabel label) {
    for (auto& m : standardWorkflows())
        if (m.label == label) return m;
    return {label, {}};
}

// Steady-state per-transaction operator reductions, rounded to whole percent:
// 2 vs 4 operators -> 50%; 2 vs 9 -> 78%.
inline int reductionPercent(size_t ours, size_t baseline) {
    if (baseline == 0) return 0;
    double frac = 1.0 - static_cast<double>(ours) / static_cast<double>(baseline);
    return static_cast<int>(std::lround(frac * 100.0));
}

} // namespace aasim::goms
