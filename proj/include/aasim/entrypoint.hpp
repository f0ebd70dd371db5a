// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "aasim/common.hpp"
#include "aasim/dex_pool.hpp"
#include "aasim/gas_model.hpp"
#include "aasim/ledger.hpp"
#include "aasim/paymaster.hpp"
#include "aasim/registry.hpp"
#include "aasim/signer.hpp"
#include "aasim/trace.hpp"
#include "aasim/userop.hpp"

#include <map>
#include <memory>
#include <vector>

namespace aasim {

struct AccountState {
    KeyHandle key;
    u256 nonce{0};
    AccountKind kind = AccountKind::Reference;
};

struct OpResult {
    bool accepted = false;
    GasReceipt receipt;
    AccessTrace trace;
    SettlementEffects settlement;
    std::optional<Failure> rejection; // stage-level error when not accepted
    std::optional<Err> innerError;    // inner paymaster error for PaymasterRejected
};

// Simulated EntryPoint plus bundler for one chain instance. handleOp runs the
// full lifecycle in driver order: account validation, paymaster validation,
// execution, postOp, receipt assembly. Bundles carry exactly one operation.
class Chain {
public:
    Address entryPointAddr = derivedAddress("contract/entrypoint");
    Address treasuryAddr = derivedAddress("actor/treasury");
    Address governanceAddr = derivedAddress("actor/governance");

    TokenLedger ledger;
    Registry registry;
    std::map<Address, PaymasterInstance> paymasters;
    std::map<Address, AccountState> accounts;
    std::optional<ConstantProductPool> dexPool;

    GasCostTable gas = GasCostTable::calibrated();
    BundlerProfile bundler = BundlerProfile::calibrated();
    u64 blockNumber = 1;
    u256 gasPriceWei{1'000'000'000};
    std::optional<JitterStream> jitter;

    std::vector<SettlementEffects> settlements;

    Chain() = default;
    Chain(const Chain&) = delete;
    Chain& operator=(const Chain&) = delete;

    AccountState& registerAccount(const Address& addr, AccountKind kind = AccountKind::Reference) {
        ByteWriter w;
        w.str("account-key");
        w.address(addr);
        Digest32 d = w.digest();
        u64 secret = 0;
        for (int i = 0; i < 8; ++i) secret |= u64(d.bytes[i]) << (8 * i);
        auto [it, inserted] = accounts.emplace(addr, AccountState{KeyHandle{secret}, u256{0}, kind});
        if (!inserted) it->second.kind = kind;
        return it->second;
    }

    void advanceBlocks(u64 n = 1) { blockNumber += n; }

    u256 accountNonce(const Address& sender) const {
        auto it = accounts.find(sender);
        return it == accounts.end() ? u256{0} : it->second.nonce;
    }

    // Builds a signed, hash-bound operation at the sender's current nonce.
    UserOperation makeOp(const Address& sender, const Action& action, const Address& paymaster,
                         std::optional<Address> operatorAddr, const u256& maxCost) {
        UserOperation op;
        op.sender = sender;
        op.nonce = accountNonce(sender);
        op.action = action;
        op.paymaster = paymaster;
        if (operatorAddr) bindOperator(op, *operatorAddr);
        op.maxCost = maxCost;
        sealOp(op);
        return op;
    }

    void sealOp(UserOperation& op) {
        op.userOpHash = computeUserOpHash(op);
        auto it = accounts.find(op.sender);
        if (it != accounts.end()) op.accountSignature = signDigest(it->second.key, op.userOpHash);
    }

    // Driver-step mirror refresh, outside any validation phase: mirrors the
    // sender's gas-token ledger balance into the paymaster's own userOpState
    // slot so the validation hot path never leaves self-storage.
    void syncMirrors(const UserOperation& op) {
        auto pmIt = paymasters.find(op.paymaster);
        if (pmIt == paymasters.end()) return;
        PaymasterInstance& pm = pmIt->second;
        if (!isAoa(pm.kind)) return;
        auto operatorAddr = boundOperator(op);
        if (!operatorAddr) return;
        auto cfgIt = pm.operators.find(*operatorAddr);
        if (cfgIt == pm.operators.end()) return;
        const TokenId& token = cfgIt->second.supportedTokens.front();
        pm.userOpState[{*operatorAddr, op.sender}].gasTokenBalance = ledger.balance(token, op.sender);
    }

    OpResult submit(const UserOperation& op) {
        syncMirrors(op);
        return handleOp(op);
    }

    OpResult handleOp(const UserOperation& op) {
        OpResult out;
        auto pmIt = paymasters.find(op.paymaster);
        if (pmIt == paymasters.end()) {
            out.rejection = fail(Err::PaymasterRejected, "paymaster not registered: " + op.paymaster.hex());
            return out;
        }
        PaymasterInstance& pm = pmIt->second;

        attachTracers();
        tracer_.begin(&out.trace);
        struct TraceGuard {
            StorageTracer& t;
            ~TraceGuard() { t.end(); }
        } guard{tracer_};

        // (1) account validation: tamper-evident hash, signature, nonce.
        tracer_.setPhase(Phase::AccountValidation);
        auto acctIt = accounts.find(op.sender);
        if (acctIt == accounts.end()) {
            out.rejection = fail(Err::InvalidAccountSig, "unknown sender " + op.sender.hex());
            return out;
        }
        AccountState& acct = acctIt->second;
        Digest32 recomputed = computeUserOpHash(op);
        if (recomputed != op.userOpHash || !verifyDigest(acct.key, recomputed, op.accountSignature)) {
            out.rejection = fail(Err::InvalidAccountSig);
            return out;
        }
        tracer_.onRead(op.sender, "nonce");
        if (op.nonce != acct.nonce) {
            out.rejection = fail(Err::NonceReplay, "expected nonce " + acct.nonce.str());
            return out;
        }

        // The bundler prices the stack before inclusion; an unpriced stack
        // never reaches the chain.
        auto pvg = bundler.pvgFor(pm.kind, acct.kind);
        if (!pvg.ok()) {
            out.rejection = pvg.failure();
            return out;
        }

        // (2) paymaster validation, dispatched by kind.
        tracer_.setPhase(Phase::PaymasterValidation);
        ValidationEnv venv{gas, &tracer_, &ledger, dexPool ? &*dexPool : nullptr, registry.addr};
        ValidationResult v = validatePaymasterUserOp(pm, op, blockNumber, venv);
        if (!v.valid) {
            out.rejection = fail(Err::PaymasterRejected, v.failureReason->describe());
            out.innerError = v.failureReason->code;
            return out;
        }

        // Nonce is consumed once both validations pass.
        tracer_.setPhase(Phase::AccountValidation);
        tracer_.onWrite(op.sender, "nonce");
        acct.nonce += 1;

        // Gas accounting for this stack.
        u64 acctGas = gas.chargeComponent(pm.kind, GasComponent::AccountValidation).value();
        u64 execGas = 0;
        u64 swapGas = 0;
        if (op.action.kind != ActionKind::Noop)
            execGas = gas.chargeComponent(pm.kind, GasComponent::Execution).value();
        if (pm.kind == PaymasterKind::PoaDexErc20)
            swapGas = gas.chargeComponent(pm.kind, GasComponent::PostOpSwap).value();
        u64 overhead = gas.chargeComponent(pm.kind, GasComponent::EntryPointOverhead).value();
        if (jitter) {
            std::int64_t d = jitter->next();
            std::int64_t adjusted = static_cast<std::int64_t>(overhead) + d;
            overhead = adjusted > 0 ? static_cast<u64>(adjusted) : 0;
        }

        // (3) execution, against a snapshot so a postOp failure reverts it.
        TokenLedger snapshot = ledger;
        tracer_.setPhase(Phase::Execution);
        if (op.action.kind == ActionKind::Erc20Transfer) {
            Status s = ledger.transfer(op.action.token, op.sender, op.action.to, op.action.amount);
            if (!s.ok()) {
                out.rejection = fail(Err::ExecutionFailed, s.failure().describe());
                return out;
            }
        }

        // (4) postOp with the actual cost; the EntryPoint never redeems more
        // than the capped prefund.
        u64 txGas = acctGas + v.gasCharged + execGas + swapGas + overhead;
        u64 actualGas = txGas + pvg.value();
        u256 costEth = u256(actualGas) * gasPriceWei;
        if (costEth > v.cappedCost) costEth = v.cappedCost;

        tracer_.setPhase(Phase::PostOp);
        PostOpEnv penv;
        penv.entryPoint = entryPointAddr;
        penv.executedOpHash = recomputed;
        penv.ledger = &ledger;
        penv.pool = dexPool ? &*dexPool : nullptr;
        penv.nowBlock = blockNumber;
        penv.tracer = &tracer_;
        auto settled = postOp(pm, entryPointAddr, *v.context, costEth, penv);
        if (!settled.ok()) {
            ledger = snapshot; // all-or-nothing at the operation level
            attachTracers();
            out.rejection = fail(Err::PostOpFailed, settled.failure().describe());
            out.innerError = settled.failure().code;
            return out;
        }

        // (5) receipt assembly.
        GasReceipt r;
        r.components.emplace_back(GasComponent::AccountValidation, acctGas);
        r.components.emplace_back(GasComponent::PaymasterValidation, v.gasCharged);
        if (execGas > 0) r.components.emplace_back(GasComponent::Execution, execGas);
        if (swapGas > 0) r.components.emplace_back(GasComponent::PostOpSwap, swapGas);
        r.components.emplace_back(GasComponent::EntryPointOverhead, overhead);
        r.txGasUsed = txGas;
        r.pvg = pvg.value();
        r.actualGasUsed = actualGas;
        r.l1FeeShare = bundler.l1FeeShare;

        out.accepted = true;
        out.receipt = r;
        out.settlement = settled.value();
        settlements.push_back(settled.value());
        return out;
    }

    StorageTracer& tracer() { return tracer_; }

private:
    void attachTracers() {
        ledger.attachTracer(&tracer_);
        registry.attachTracer(&tracer_);
    }

    StorageTracer tracer_;
};

} // namespace aasim
