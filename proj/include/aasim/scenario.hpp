// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "aasim/common.hpp"
#include "aasim/entrypoint.hpp"

#include <memory>
#include <string>
#include <vector>

namespace aasim {

struct UserSetup {
    Address addr;
    u256 gtokenBalance = ether(10);
    u256 gasTokenBalance = ether(1000);
    u256 feeTokenBalance = ether(1000);
    u256 payloadBalance = ether(1000);
    bool holdsSbt = true;
};

struct OperatorSetup {
    Address addr = derivedAddress("actor/operator-0");
    TokenId gasToken{"xPNTs"};
    Ratio exchangeRate{1, 1};
    u256 perCardSpendingCap{"1000000000000000000000"}; // 10^21
    u64 rateLimitWindow = 100;
    u256 depositBalance = ether(100);
    u256 apntsBalance = ether(100000);
};

// Block-indexed step functions; faults latch on at their block and stay on.
// The stale fault silences the primary oracle feed; a scheduled keeper set can
// restore freshness through the fallback aggregation path.
struct FaultSchedule {
    std::optional<u64> signerOfflineAtBlock;
    std::vector<Address> blacklistSenders;
    u64 blacklistAtBlock = 0;
    std::optional<u64> priceFeedStaleAtBlock;
    std::optional<u64> dvtRecoveryAtBlock;
    size_t dvtRecoveryKeepers = 3;
};

struct WorkloadSpec {
    size_t opsPerSystem = 50;
    ActionKind action = ActionKind::Erc20Transfer;
    TokenId payloadToken{"PAY"};
    u256 transferAmount = ether(1);
    u256 maxCostWei{"500000000000000"}; // 0.0005 ETH
    size_t userCount = 5;
};

// Fully deterministic given the seed: chain setup, fault schedule and
// workload together define one experiment.
struct ScenarioSpec {
    std::string name = "default";
    u64 seed = 42;

    u256 gasPriceWei{1'000'000'000};
    u256 protocolHardCapWei{"1000000000000000"}; // 0.001 ETH
    u256 maxSingleTxLimit = ether(5000);
    u256 sbtMintFloor = ether(1);
    u64 stalenessThresholdBlocks = 300;
    u64 dvtFreshnessBlocks = 50;
    size_t dvtQuorum = 3;
    Ratio priceEthPerApnts{1, 1};
    u64 startBlock = 1000;

    std::vector<OperatorSetup> operators{OperatorSetup{}};
    std::vector<UserSetup> users; // empty: derived from workload.userCount

    TokenId feeToken{"FEE"};
    u256 poolTokenReserve = ether(1'000'000);
    u256 poolEthReserve = ether(1000);

    FaultSchedule faults;
    WorkloadSpec workload;
    std::vector<SystemKind> systems{SystemKind::EoaDirect, SystemKind::AoaV4, SystemKind::AoaSuper,
                                    SystemKind::PoaVerifying, SystemKind::PoaDexErc20};
    GasMode gasMode = GasMode::Calibrated;
    bool noise = false;
};

inline std::vector<UserSetup> scenarioUsers(const ScenarioSpec& spec) {
    if (!spec.users.empty()) return spec.users;
    std::vector<UserSetup> out;
    for (size_t i = 0; i < spec.workload.userCount; ++i) {
        UserSetup u;
        u.addr = derivedAddress("actor/user-" + std::to_string(i));
        out.push_back(u);
    }
    return out;
}

inline Address paymasterAddressFor(PaymasterKind kind) {
    return derivedAddress("contract/pm-" + std::string(kindName(kind)));
}

inline ScenarioSpec defaultScenario() { return ScenarioSpec{}; }

// Builds one chain instance holding exactly the paymaster stack for the given
// system. Pointer identity matters (the tracer is wired into ledger and
// registry), so chains live on the heap and never move.
inline std::unique_ptr<Chain> buildChain(const ScenarioSpec& spec, SystemKind system) {
    auto chain = std::make_unique<Chain>();
    chain->blockNumber = spec.startBlock;
    chain->gasPriceWei = spec.gasPriceWei;
    chain->gas = spec.gasMode == GasMode::Micro ? GasCostTable::micro() : GasCostTable::calibrated();
    chain->bundler = BundlerProfile::calibrated();

    TokenLedger& ledger = chain->ledger;
    ledger.governance = chain->governanceAddr;
    ledger.maxSingleTxLimit = spec.maxSingleTxLimit;
    ledger.sbtMintFloor = spec.sbtMintFloor;

    Registry& registry = chain->registry;
    registry.stalenessThresholdBlocks = spec.stalenessThresholdBlocks;
    registry.dvtFreshnessBlocks = spec.dvtFreshnessBlocks;
    registry.dvtQuorum = spec.dvtQuorum;
    for (const auto& opSetup : spec.operators) {
        OperatorConfig cfg;
        cfg.operatorAddr = opSetup.addr;
        cfg.supportedTokens = {opSetup.gasToken};
        cfg.exchangeRate = opSetup.exchangeRate;
        cfg.perCardSpendingCap = opSetup.perCardSpendingCap;
        cfg.rateLimitWindow = opSetup.rateLimitWindow;
        cfg.depositBalance = opSetup.depositBalance;
        auto st = registry.registerOperator(cfg);
        if (!st.ok()) throw std::runtime_error("scenario operator setup: " + st.failure().describe());
    }
    auto priced = registry.updatePrice(spec.priceEthPerApnts, 0, chain->blockNumber);
    if (!priced.ok()) throw std::runtime_error("scenario price setup: " + priced.failure().describe());

    auto pmKind = paymasterKindOf(system);
    Address pmAddr;
    if (pmKind) {
        pmAddr = paymasterAddressFor(*pmKind);
        PaymasterInstance pm;
        pm.kind = *pmKind;
        pm.addr = pmAddr;
        pm.treasury = chain->treasuryAddr;
        pm.protocolHardCap = spec.protocolHardCapWei;
        pm.priceMaxAgeBlocks = spec.stalenessThresholdBlocks;
        pm.deposit = ether(1000);
        switch (*pmKind) {
            case PaymasterKind::AoaSuper:
            case PaymasterKind::AoaV4:
                pm.entryPointStake = ether(1);
                for (const auto& [addr, cfg] : registry.operators()) pm.operators.emplace(addr, cfg);
                pm.cachedPrice = registry.cache();
                break;
            case PaymasterKind::PoaVerifying:
                pm.signerService = std::make_shared<SignerService>();
                break;
            case PaymasterKind::PoaDexErc20:
                pm.entryPointStake = ether(1);
                pm.feeToken = spec.feeToken;
                // vendor stack runs an API service, but the validation gate is
                // the oracle/swap path and never consults it
                pm.signerService = std::make_shared<SignerService>();
                chain->dexPool = ConstantProductPool{spec.feeToken, spec.poolTokenReserve, spec.poolEthReserve};
                break;
        }
        chain->paymasters.emplace(pmAddr, pm);
        if (isAoa(*pmKind)) {
            // The paymaster is the registered settlement destination and a
            // trusted (auto-approved) spender of the community gas token.
            for (const auto& opSetup : spec.operators) {
                ledger.superPaymasterAddr = pmAddr;
                auto st = ledger.setAutoApproved(chain->governanceAddr, opSetup.gasToken, pmAddr, true);
                if (!st.ok()) throw std::runtime_error("scenario auto-approve: " + st.failure().describe());
            }
        }
    }

    for (const auto& opSetup : spec.operators) ledger.mint(TokenId{"aPNTs"}, opSetup.addr, opSetup.apntsBalance);

    AccountKind acctKind = (system == SystemKind::PoaVerifying || system == SystemKind::PoaDexErc20)
                               ? AccountKind::Vendor
                               : AccountKind::Reference;
    for (const auto& user : scenarioUsers(spec)) {
        chain->registerAccount(user.addr, acctKind);
        ledger.mint(ledger.gtoken, user.addr, user.gtokenBalance);
        for (const auto& opSetup : spec.operators) ledger.mint(opSetup.gasToken, user.addr, user.gasTokenBalance);
        ledger.mint(spec.feeToken, user.addr, user.feeTokenBalance);
        ledger.mint(spec.workload.payloadToken, user.addr, user.payloadBalance);
        if (user.holdsSbt) {
            auto rec = ledger.mintSbt(user.addr, spec.sbtMintFloor, chain->blockNumber);
            if (!rec.ok()) throw std::runtime_error("scenario sbt mint: " + rec.failure().describe());
            for (const auto& opSetup : spec.operators) (void)ledger.associateSbtCommunity(user.addr, opSetup.addr);
        }
        if (pmKind == PaymasterKind::AoaSuper && user.holdsSbt) {
            auto& pm = chain->paymasters.at(pmAddr);
            auto st = registry.updateSBTStatus(registry.addr, pm, ledger, user.addr, true);
            if (!st.ok()) throw std::runtime_error("scenario sbt mirror: " + st.failure().describe());
        }
        if (pmKind == PaymasterKind::PoaDexErc20)
            (void)ledger.approve(spec.feeToken, user.addr, pmAddr, ether(100000));
    }

    return chain;
}

// Latches scheduled faults onto the chain once their block is reached.
inline void applyFaults(Chain& chain, const FaultSchedule& faults, const ScenarioSpec& spec) {
    for (auto& [addr, pm] : chain.paymasters) {
        if (pm.signerService) {
            if (faults.signerOfflineAtBlock && chain.blockNumber >= *faults.signerOfflineAtBlock)
                pm.signerService->online = false;
            if (!faults.blacklistSenders.empty() && chain.blockNumber >= faults.blacklistAtBlock)
                for (const auto& s : faults.blacklistSenders) pm.signerService->blacklist.insert(s);
        }
        if (faults.priceFeedStaleAtBlock && chain.blockNumber >= *faults.priceFeedStaleAtBlock) {
            // The primary feed died at the fault block having last updated one
            // beyond the staleness threshold; fallback-sourced prices are not
            // constrained by it.
            u64 maxAge = spec.stalenessThresholdBlocks;
            u64 deadSince = *faults.priceFeedStaleAtBlock > maxAge + 1
                                ? *faults.priceFeedStaleAtBlock - maxAge - 1
                                : 0;
            if (pm.cachedPrice.source == PriceSource::PrimaryOracle &&
                pm.cachedPrice.updatedAtBlock > deadSince)
                pm.cachedPrice.updatedAtBlock = deadSince;
        }
        if (faults.dvtRecoveryAtBlock && chain.blockNumber >= *faults.dvtRecoveryAtBlock && isAoa(pm.kind)) {
            // Keeper set comes online: aggregate fresh reports and mirror the
            // fallback price into the paymaster.
            std::vector<KeeperReport> reports;
            for (size_t i = 0; i < faults.dvtRecoveryKeepers; ++i)
                reports.push_back(KeeperReport{derivedAddress("actor/keeper-" + std::to_string(i)),
                                               spec.priceEthPerApnts, chain.blockNumber});
            if (chain.registry.updatePriceDVT(reports, chain.blockNumber).ok())
                (void)chain.registry.pushPriceTo(chain.registry.addr, pm);
        }
    }
}

inline UserOperation buildWorkloadOp(Chain& chain, const ScenarioSpec& spec, SystemKind system, size_t opIndex) {
    auto users = scenarioUsers(spec);
    const Address sender = users[opIndex % users.size()].addr;
    Action action;
    action.kind = spec.workload.action;
    if (action.kind == ActionKind::Erc20Transfer) {
        action.token = spec.workload.payloadToken;
        action.to = derivedAddress("actor/recipient");
        action.amount = spec.workload.transferAmount;
    }
    auto pmKind = paymasterKindOf(system);
    Address pmAddr = pmKind ? paymasterAddressFor(*pmKind) : Address::zero();
    std::optional<Address> operatorAddr;
    if (pmKind && isAoa(*pmKind) && !spec.operators.empty()) operatorAddr = spec.operators.front().addr;
    return chain.makeOp(sender, action, pmAddr, operatorAddr, spec.workload.maxCostWei);
}

} // namespace aasim
