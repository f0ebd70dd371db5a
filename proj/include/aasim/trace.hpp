// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "aasim/common.hpp"

#include <vector>

namespace aasim {

// Storage-access tracing for the validation-phase storage rules. Every ledger,
// registry and paymaster storage touch during a handled operation is recorded
// exactly once with the phase it happened in.

enum class Phase { AccountValidation, PaymasterValidation, Execution, PostOp };

inline std::string_view phaseName(Phase p) {
    switch (p) {
        case Phase::AccountValidation: return "accountValidation";
        case Phase::PaymasterValidation: return "paymasterValidation";
        case Phase::Execution: return "execution";
        case Phase::PostOp: return "postOp";
    }
    return "unknown";
}

enum class AccessMode { Read, Write };

struct AccessEntry {
    Address contract;
    std::string slot;
    AccessMode mode = AccessMode::Read;
    Phase phase = Phase::Execution;
};

struct AccessTrace {
    std::vector<AccessEntry> entries;
};

class StorageTracer {
public:
    void begin(AccessTrace* sink) { sink_ = sink; }
    void end() {
        sink_ = nullptr;
        phase_.reset();
    }
    void setPhase(Phase p) { phase_ = p; }
    void clearPhase() { phase_.reset(); }

    bool recording() const { return sink_ != nullptr && phase_.has_value(); }
    std::optional<Phase> phase() const { return phase_; }
    AccessTrace* sink() const { return sink_; }

    void onRead(const Address& contract, std::string slot) { record(contract, std::move(slot), AccessMode::Read); }
    void onWrite(const Address& contract, std::string slot) { record(contract, std::move(slot), AccessMode::Write); }

private:
    void record(const Address& contract, std::string slot, AccessMode mode) {
        if (!recording()) return;
        sink_->entries.push_back(AccessEntry{contract, std::move(slot), mode, *phase_});
    }

    AccessTrace* sink_ = nullptr;
    std::optional<Phase> phase_;
};

struct RuleViolation {
    AccessEntry entry;
    std::string note;
};

// Strict self-storage form of the validation-phase rule: every
// paymaster-validation access must target the paymaster's own storage.
// ERC-7562 grants staked entities broader access; the deployed contract this
// models restricts itself voluntarily, so staked status is reported in the
// note instead of excusing the entry.
inline std::vector<RuleViolation> checkSelfStorageRule(const AccessTrace& trace, const Address& paymaster,
                                                       bool staked) {
    std::vector<RuleViolation> out;
    for (const auto& e : trace.entries) {
        if (e.phase != Phase::PaymasterValidation) continue;
        if (e.contract == paymaster) continue;
        std::string note = "non-self storage access in paymaster validation: contract " + e.contract.hex() +
                           " slot " + e.slot;
        if (staked) note += " (entity staked; strict self-storage form still applied)";
        out.push_back(RuleViolation{e, std::move(note)});
    }
    return out;
}

} // namespace aasim
