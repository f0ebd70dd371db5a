// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "aasim/common.hpp"
#include "aasim/dex_pool.hpp"
#include "aasim/gas_model.hpp"
#include "aasim/ledger.hpp"
#include "aasim/registry.hpp"
#include "aasim/signer.hpp"
#include "aasim/trace.hpp"
#include "aasim/userop.hpp"

#include <map>
#include <memory>

namespace aasim {

// Per-(operator, sender) self-storage: rate-limit window, replay bookkeeping
// and the mirrored gas-token balance. The balance mirror is what lets the
// validation hot path stay inside the paymaster's own storage; the driver
// refreshes it outside validation and postOp keeps it coherent on settlement.
struct SenderState {
    u256 spentInWindow{0};
    u64 windowStartBlock = 0;
    u256 lastNonceSeen{0};
    u256 gasTokenBalance{0};
};

// Opaque settlement context produced by a valid validation and consumed by
// postOp for exactly that operation.
struct SettlementContext {
    Address operatorAddr;
    Address sender;
    Digest32 userOpHash;
    u256 cappedCost{0};
    TokenId token;
    u256 nonce{0};
};

struct ValidationResult {
    bool valid = false;
    u256 cappedCost{0};
    std::optional<SettlementContext> context;
    u64 gasCharged = 0;
    AccessTrace accessTrace;
    std::optional<Failure> failureReason;
};

struct PaymasterInstance {
    PaymasterKind kind = PaymasterKind::AoaSuper;
    Address addr;
    u256 entryPointStake{0}; // > 0 for AOA kinds (self-storage rule precondition)
    u256 deposit{0};         // ETH backing sponsorship, base units

    // self-storage mirrors
    std::map<Address, OperatorConfig> operators;
    std::map<std::pair<Address, Address>, SenderState> userOpState;
    PriceCache cachedPrice;
    std::map<Address, bool> sbtHolders;

    u256 protocolHardCap{0};
    std::shared_ptr<SignerService> signerService; // POA kinds only
    Address treasury;

    u64 priceMaxAgeBlocks = 300;
    TokenId feeToken; // PoaDexErc20 only

    // Test hook: a deliberately broken variant that performs a live Registry
    // read inside the validation phase, for the storage-rule checker.
    bool injectLiveRegistryRead = false;

    bool staked() const { return entryPointStake > 0; }

    SenderState senderState(const Address& op, const Address& sender) const {
        auto it = userOpState.find({op, sender});
        return it == userOpState.end() ? SenderState{} : it->second;
    }
};

// ETH -> aPNTs -> gas token, each step rounded up in the paymaster's favor.
inline u256 apntsForEth(const u256& eth, const Ratio& ethPerApnts) {
    return mulDivCeil(eth, ethPerApnts.den, ethPerApnts.num);
}

inline u256 gasTokenForEth(const u256& eth, const Ratio& ethPerApnts, const Ratio& exchangeRate) {
    return mulDivCeil(apntsForEth(eth, ethPerApnts), exchangeRate.num, exchangeRate.den);
}

struct ValidationEnv {
    const GasCostTable& gas;
    StorageTracer* tracer = nullptr;              // chain tracer, if running under handleOp
    const TokenLedger* ledger = nullptr;          // POA kinds only
    const ConstantProductPool* pool = nullptr;    // PoaDexErc20 only
    Address registryAddr;                         // for the broken-variant hook
};

namespace detail {

// Records into the chain tracer when one is active, otherwise into a local
// scratch trace, and exposes the validation-phase slice either way.
class ValidationTraceScope {
public:
    explicit ValidationTraceScope(StorageTracer* external) {
        if (external && external->sink()) {
            external_ = external;
            start_ = external->sink()->entries.size();
        } else {
            local_.begin(&scratch_);
            local_.setPhase(Phase::PaymasterValidation);
        }
    }

    StorageTracer& tracer() { return external_ ? *external_ : local_; }

    AccessTrace slice() const {
        if (!external_) return scratch_;
        AccessTrace t;
        const auto& e = external_->sink()->entries;
        t.entries.assign(e.begin() + static_cast<std::ptrdiff_t>(start_), e.end());
        return t;
    }

private:
    StorageTracer* external_ = nullptr;
    size_t start_ = 0;
    AccessTrace scratch_;
    StorageTracer local_;
};

inline ValidationResult rejectValidation(const ValidationTraceScope& scope, Failure f, u64 gasCharged) {
    ValidationResult r;
    r.valid = false;
    r.gasCharged = gasCharged;
    r.failureReason = std::move(f);
    r.accessTrace = scope.slice();
    return r;
}

} // namespace detail

// -----------------------------------------------------------------------------
// validatePaymasterUserOp, per kind.
// -----------------------------------------------------------------------------

// Five-stage pipeline of the multi-community paymaster. Four self-storage
// reads (sbtHolders, operators, userOpState, cachedPrice); no signer service,
// no storage outside the paymaster's own maps.
inline ValidationResult validateSuper(const PaymasterInstance& pm, const UserOperation& op, u64 nowBlock,
                                      const ValidationEnv& env) {
    detail::ValidationTraceScope scope(env.tracer);
    auto& tr = scope.tracer();
    u64 gas = env.gas.chargeComponent(pm.kind, GasComponent::PaymasterValidation).value();

    if (pm.injectLiveRegistryRead)
        tr.onRead(env.registryAddr, "operators[" + pm.addr.hex() + "]");

    // Stage 1: identity/asset eligibility via the SBT mirror.
    tr.onRead(pm.addr, "sbtHolders[" + op.sender.hex() + "]");
    auto sbtIt = pm.sbtHolders.find(op.sender);
    if (sbtIt == pm.sbtHolders.end() || !sbtIt->second)
        return detail::rejectValidation(scope, fail(Err::NoSbt, op.sender.hex()), gas);

    // Stage 2: operator configuration resolution.
    auto operatorAddr = boundOperator(op);
    tr.onRead(pm.addr, "operators[" + (operatorAddr ? operatorAddr->hex() : "unbound") + "]");
    const OperatorConfig* cfg = nullptr;
    if (operatorAddr) {
        auto it = pm.operators.find(*operatorAddr);
        if (it != pm.operators.end()) cfg = &it->second;
    }
    if (!cfg) return detail::rejectValidation(scope, fail(Err::UnknownOperator), gas);

    tr.onRead(pm.addr, "userOpState[" + operatorAddr->hex() + "][" + op.sender.hex() + "]");
    SenderState st = pm.senderState(*operatorAddr, op.sender);

    // Stage 3: cost estimation and capping.
    u256 cappedCost = op.maxCost < pm.protocolHardCap ? op.maxCost : pm.protocolHardCap;

    // Rate limit: fixed window keyed by windowStartBlock; rollover resets.
    u256 effectiveSpent = nowBlock >= st.windowStartBlock + cfg->rateLimitWindow ? u256{0} : st.spentInWindow;
    if (effectiveSpent + cappedCost > cfg->perCardSpendingCap)
        return detail::rejectValidation(scope, fail(Err::RateLimited), gas);

    // Stage 4: settlement capability against the mirrored balance.
    tr.onRead(pm.addr, "cachedPrice");
    u64 priceAge = nowBlock >= pm.cachedPrice.updatedAtBlock ? nowBlock - pm.cachedPrice.updatedAtBlock : 0;
    if (priceAge > pm.priceMaxAgeBlocks)
        return detail::rejectValidation(scope, fail(Err::StalePrice, "age " + std::to_string(priceAge)), gas);
    u256 required = gasTokenForEth(cappedCost, pm.cachedPrice.ethPerApnts, cfg->exchangeRate);
    if (st.gasTokenBalance < required)
        return detail::rejectValidation(scope, fail(Err::InsufficientGasToken), gas);

    ValidationResult res;
    res.valid = true;
    res.cappedCost = cappedCost;
    res.gasCharged = gas;
    res.context = SettlementContext{*operatorAddr, op.sender, op.userOpHash,
                                    cappedCost,    cfg->supportedTokens.front(), op.nonce};
    res.accessTrace = scope.slice();
    return res;
}

// Single-community AOA base: token-balance and cap checks only. No SBT
// binding, no rate-limit state.
inline ValidationResult validateV4(const PaymasterInstance& pm, const UserOperation& op, u64 nowBlock,
                                   const ValidationEnv& env) {
    (void)nowBlock;
    detail::ValidationTraceScope scope(env.tracer);
    auto& tr = scope.tracer();
    u64 gas = env.gas.chargeComponent(pm.kind, GasComponent::PaymasterValidation).value();

    if (pm.injectLiveRegistryRead)
        tr.onRead(env.registryAddr, "operators[" + pm.addr.hex() + "]");

    auto operatorAddr = boundOperator(op);
    tr.onRead(pm.addr, "operators[" + (operatorAddr ? operatorAddr->hex() : "unbound") + "]");
    const OperatorConfig* cfg = nullptr;
    if (operatorAddr) {
        auto it = pm.operators.find(*operatorAddr);
        if (it != pm.operators.end()) cfg = &it->second;
    }
    if (!cfg) return detail::rejectValidation(scope, fail(Err::UnknownOperator), gas);

    tr.onRead(pm.addr, "userOpState[" + operatorAddr->hex() + "][" + op.sender.hex() + "]");
    SenderState st = pm.senderState(*operatorAddr, op.sender);

    u256 cappedCost = op.maxCost < pm.protocolHardCap ? op.maxCost : pm.protocolHardCap;

    tr.onRead(pm.addr, "cachedPrice");
    u256 required = gasTokenForEth(cappedCost, pm.cachedPrice.ethPerApnts, cfg->exchangeRate);
    if (st.gasTokenBalance < required)
        return detail::rejectValidation(scope, fail(Err::InsufficientGasToken), gas);

    ValidationResult res;
    res.valid = true;
    res.cappedCost = cappedCost;
    res.gasCharged = gas;
    res.context = SettlementContext{*operatorAddr, op.sender, op.userOpHash,
                                    cappedCost,    cfg->supportedTokens.front(), op.nonce};
    res.accessTrace = scope.slice();
    return res;
}

// API-signature baseline: a fresh signature is requested from the off-chain
// service for every operation; the service is a hard validity gate.
inline ValidationResult validateVerifying(const PaymasterInstance& pm, const UserOperation& op, u64 nowBlock,
                                          const ValidationEnv& env) {
    (void)nowBlock;
    detail::ValidationTraceScope scope(env.tracer);
    u64 gas = env.gas.chargeComponent(pm.kind, GasComponent::PaymasterValidation).value();

    if (!pm.signerService)
        return detail::rejectValidation(scope, fail(Err::SignerOffline, "no signer service configured"), gas);
    auto sig = pm.signerService->requestSignature(op.userOpHash, op.sender);
    if (!sig.ok()) return detail::rejectValidation(scope, sig.failure(), gas);

    Signature presented = signatureOverride(op).value_or(sig.value());
    if (!verifyDigest(pm.signerService->signingKey, op.userOpHash, presented))
        return detail::rejectValidation(scope, fail(Err::BadSignature), gas);

    u256 cappedCost = op.maxCost < pm.protocolHardCap ? op.maxCost : pm.protocolHardCap;

    ValidationResult res;
    res.valid = true;
    res.cappedCost = cappedCost;
    res.gasCharged = gas;
    res.context = SettlementContext{Address::zero(), op.sender, op.userOpHash, cappedCost, TokenId{}, op.nonce};
    res.accessTrace = scope.slice();
    return res;
}

// DEX-routed ERC-20 baseline: oracle quote, standard allowance check, pool
// liquidity check now; the swap itself runs in postOp.
inline ValidationResult validateDexErc20(const PaymasterInstance& pm, const UserOperation& op, u64 nowBlock,
                                         const ValidationEnv& env) {
    (void)nowBlock;
    detail::ValidationTraceScope scope(env.tracer);
    auto& tr = scope.tracer();
    u64 gas = env.gas.chargeComponent(pm.kind, GasComponent::PaymasterValidation).value();

    if (!env.pool)
        return detail::rejectValidation(scope, fail(Err::OracleUnavailable, "no pool configured"), gas);
    tr.onRead(env.pool->oracleAddr, "price");
    tr.onRead(env.pool->oracleAddr, "updatedAt");
    if (!env.pool->oracleAvailable)
        return detail::rejectValidation(scope, fail(Err::OracleUnavailable), gas);

    u256 cappedCost = op.maxCost < pm.protocolHardCap ? op.maxCost : pm.protocolHardCap;

    auto quote = env.pool->quoteTokenInForEthOut(cappedCost);
    if (!quote.ok()) return detail::rejectValidation(scope, quote.failure(), gas);

    u256 allowed = env.ledger ? env.ledger->allowance(pm.feeToken, op.sender, pm.addr) : u256{0};
    if (allowed < quote.value())
        return detail::rejectValidation(scope, fail(Err::NoAllowance, pm.feeToken.symbol), gas);

    ValidationResult res;
    res.valid = true;
    res.cappedCost = cappedCost;
    res.gasCharged = gas;
    res.context = SettlementContext{Address::zero(), op.sender, op.userOpHash, cappedCost, pm.feeToken, op.nonce};
    res.accessTrace = scope.slice();
    return res;
}

inline ValidationResult validatePaymasterUserOp(const PaymasterInstance& pm, const UserOperation& op,
                                                u64 nowBlock, const ValidationEnv& env) {
    switch (pm.kind) {
        case PaymasterKind::AoaSuper: return validateSuper(pm, op, nowBlock, env);
        case PaymasterKind::AoaV4: return validateV4(pm, op, nowBlock, env);
        case PaymasterKind::PoaVerifying: return validateVerifying(pm, op, nowBlock, env);
        case PaymasterKind::PoaDexErc20: return validateDexErc20(pm, op, nowBlock, env);
    }
    throw std::logic_error("unreachable paymaster kind");
}

// -----------------------------------------------------------------------------
// postOp settlement.
// -----------------------------------------------------------------------------

struct SettlementEffects {
    u256 costEth{0};
    u256 xpntsBurned{0};
    u256 apntsToTreasury{0};
    u256 feeTokensSwapped{0};
    TokenId burnToken;
};

struct PostOpEnv {
    Address entryPoint;
    Digest32 executedOpHash;
    TokenLedger* ledger = nullptr;
    ConstantProductPool* pool = nullptr;
    u64 nowBlock = 0;
    StorageTracer* tracer = nullptr;
    TokenId apntsToken{"aPNTs"};
    Address poolAddr = derivedAddress("contract/dex-pool");
};

// All-or-nothing settlement: every precondition is checked before the first
// mutation, so a failing postOp leaves no state change at all.
inline Outcome<SettlementEffects> postOp(PaymasterInstance& pm, const Address& caller,
                                         const SettlementContext& ctx, const u256& actualCostEth,
                                         const PostOpEnv& env) {
    if (caller != env.entryPoint) return fail(Err::NotEntryPoint, caller.hex());
    if (ctx.userOpHash != env.executedOpHash) return fail(Err::HashMismatch);
    if (actualCostEth > ctx.cappedCost) return fail(Err::CostExceedsCap);
    if (!env.ledger) return fail(Err::PostOpFailed, "no ledger");
    TokenLedger& ledger = *env.ledger;

    SettlementEffects fx;
    fx.costEth = actualCostEth;

    auto selfWrite = [&](std::string slot) {
        if (env.tracer) env.tracer->onWrite(pm.addr, std::move(slot));
    };

    switch (pm.kind) {
        case PaymasterKind::AoaSuper:
        case PaymasterKind::AoaV4: {
            auto cfgIt = pm.operators.find(ctx.operatorAddr);
            if (cfgIt == pm.operators.end()) return fail(Err::UnknownOperator, ctx.operatorAddr.hex());
            const OperatorConfig& cfg = cfgIt->second;

            u256 apnts = apntsForEth(actualCostEth, pm.cachedPrice.ethPerApnts);
            u256 xpnts = mulDivCeil(apnts, cfg.exchangeRate.num, cfg.exchangeRate.den);

            // prechecks
            if (xpnts > ledger.maxSingleTxLimit) return fail(Err::ExceedsCap, "burn above per-tx limit");
            if (ledger.balance(ctx.token, ctx.sender) < xpnts)
                return fail(Err::InsufficientBalance, "sender " + ctx.token.symbol);
            if (ledger.balance(env.apntsToken, ctx.operatorAddr) < apnts)
                return fail(Err::InsufficientBalance, "operator aPNTs");
            if (pm.deposit < actualCostEth) return fail(Err::InsufficientBalance, "paymaster deposit");

            // burn user xPNTs: firewall-governed pull, then supply reduction
            Status pulled = ledger.transferFrom(ctx.token, pm.addr, ctx.sender, pm.addr, xpnts);
            if (!pulled.ok()) {
                if (pulled.error() == Err::UnauthorizedDestination)
                    return fail(Err::FirewallViolation, pulled.failure().detail);
                return pulled.failure();
            }
            Status burned = ledger.burn(ctx.token, pm.addr, xpnts);
            if (!burned.ok()) return burned.failure();

            // operator aPNTs to protocol treasury
            Status settled = ledger.transfer(env.apntsToken, ctx.operatorAddr, pm.treasury, apnts);
            if (!settled.ok()) return settled.failure();

            auto& st = pm.userOpState[{ctx.operatorAddr, ctx.sender}];
            if (env.nowBlock >= st.windowStartBlock + cfg.rateLimitWindow) {
                st.windowStartBlock = env.nowBlock;
                st.spentInWindow = 0;
            }
            st.spentInWindow += actualCostEth;
            st.lastNonceSeen = ctx.nonce;
            st.gasTokenBalance = ledger.balance(ctx.token, ctx.sender);
            selfWrite("userOpState[" + ctx.operatorAddr.hex() + "][" + ctx.sender.hex() + "]");

            pm.deposit -= actualCostEth;
            fx.xpntsBurned = xpnts;
            fx.apntsToTreasury = apnts;
            fx.burnToken = ctx.token;
            return fx;
        }

        case PaymasterKind::PoaVerifying: {
            if (pm.deposit < actualCostEth) return fail(Err::InsufficientBalance, "paymaster deposit");
            pm.deposit -= actualCostEth;
            selfWrite("deposit");
            return fx;
        }

        case PaymasterKind::PoaDexErc20: {
            if (!env.pool) return fail(Err::OracleUnavailable, "no pool configured");
            auto quote = env.pool->quoteTokenInForEthOut(actualCostEth);
            if (!quote.ok()) return quote.failure();
            u256 tokensIn = quote.value();
            if (ledger.allowance(ctx.token, ctx.sender, pm.addr) < tokensIn)
                return fail(Err::InsufficientAllowance, ctx.token.symbol);
            if (ledger.balance(ctx.token, ctx.sender) < tokensIn)
                return fail(Err::InsufficientBalance, "sender " + ctx.token.symbol);

            Status pulled = ledger.transferFrom(ctx.token, pm.addr, ctx.sender, pm.addr, tokensIn);
            if (!pulled.ok()) return pulled.failure();
            Status pooled = ledger.transfer(ctx.token, pm.addr, env.poolAddr, tokensIn);
            if (!pooled.ok()) return pooled.failure();
            auto swapped = env.pool->swapTokenForExactEth(actualCostEth);
            if (!swapped.ok()) return swapped.failure();

            // The EntryPoint redeems actualCostEth from the deposit and the
            // swap output replenishes it in the same atomic step.
            fx.feeTokensSwapped = tokensIn;
            fx.burnToken = ctx.token;
            return fx;
        }
    }
    throw std::logic_error("unreachable paymaster kind");
}

// -----------------------------------------------------------------------------
// Registry mirror writers (declared in registry.hpp).
// -----------------------------------------------------------------------------

inline Status Registry::updateSBTStatus(const Address& registryCaller, PaymasterInstance& pm,
                                        const TokenLedger& ledger, const Address& holder, bool eligible) const {
    if (registryCaller != addr) return fail(Err::NotRegistry, registryCaller.hex());
    if (eligible && ledger.sbtOf(holder) == nullptr) return fail(Err::NoSbtRecord, holder.hex());
    if (tracer_) {
        // Authorization read against registry storage: if this ever runs inside
        // a validation phase, the storage-rule checker will flag it.
        tracer_->onRead(addr, "authorizedMirrorWriter");
        tracer_->onWrite(pm.addr, "sbtHolders[" + holder.hex() + "]");
    }
    pm.sbtHolders[holder] = eligible;
    return okStatus();
}

inline Status Registry::pushPriceTo(const Address& registryCaller, PaymasterInstance& pm) const {
    if (registryCaller != addr) return fail(Err::NotRegistry, registryCaller.hex());
    if (tracer_) {
        tracer_->onRead(addr, "authorizedMirrorWriter");
        tracer_->onWrite(pm.addr, "cachedPrice");
    }
    if (cache_.updatedAtBlock >= pm.cachedPrice.updatedAtBlock) pm.cachedPrice = cache_;
    return okStatus();
}

} // namespace aasim
