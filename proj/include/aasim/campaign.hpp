// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "aasim/common.hpp"
#include "aasim/scenario.hpp"
#include "aasim/stats.hpp"

#include <random>
#include <string>
#include <vector>

namespace aasim {

inline u64 deriveSeed(u64 seed, std::string_view label) {
    u64 h = 0xcbf29ce484222325ULL;
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return detail::splitmix64(seed ^ h);
}

// -----------------------------------------------------------------------------
// Gas campaign: n receipts per configured system. Rejected operations are
// logged as excluded-with-reason entries, never silently dropped.
// -----------------------------------------------------------------------------

struct OpRecord {
    size_t opIndex = 0;
    Address sender;
    bool accepted = false;
    GasReceipt receipt;
    SettlementEffects settlement;
    std::string exclusionReason;
    std::optional<Err> innerError;
    size_t selfStorageViolations = 0;
};

struct SystemRun {
    SystemKind system = SystemKind::EoaDirect;
    std::vector<OpRecord> records;
    size_t accepted = 0;
    size_t excluded = 0;
    bool conservation = true;
    u256 ledgerGasTokenBurned{0};
    u256 receiptGasTokenBurned{0};

    std::vector<GasReceipt> receipts() const {
        std::vector<GasReceipt> out;
        for (const auto& r : records)
            if (r.accepted) out.push_back(r.receipt);
        return out;
    }
};

struct CampaignResult {
    std::vector<SystemRun> runs;
    size_t nPerSystem = 0;

    std::vector<std::pair<std::string, std::vector<GasReceipt>>> bySystem() const {
        std::vector<std::pair<std::string, std::vector<GasReceipt>>> out;
        for (const auto& run : runs) out.emplace_back(std::string(systemName(run.system)), run.receipts());
        return out;
    }
};

inline SystemRun runSystem(const ScenarioSpec& spec, SystemKind system, size_t n) {
    SystemRun run;
    run.system = system;
    u64 sysSeed = deriveSeed(spec.seed, systemName(system));
    u64 amplitude = spec.noise ? defaultJitterAmplitude(system) : 0;

    auto chain = buildChain(spec, system);
    auto users = scenarioUsers(spec);

    if (system == SystemKind::EoaDirect) {
        // Direct transfers bypass the EntryPoint entirely; the receipt is a
        // fixed-cost model with configurable jitter.
        JitterStream js(amplitude, sysSeed);
        Address recipient = derivedAddress("actor/recipient");
        for (size_t i = 0; i < n; ++i) {
            OpRecord rec;
            rec.opIndex = i;
            rec.sender = users[i % users.size()].addr;
            Status s = chain->ledger.transfer(spec.workload.payloadToken, rec.sender, recipient,
                                              spec.workload.transferAmount);
            if (!s.ok()) {
                rec.exclusionReason = s.failure().describe();
                run.records.push_back(rec);
                ++run.excluded;
                continue;
            }
            GasReceipt r;
            std::int64_t adjusted = static_cast<std::int64_t>(gasdefaults::TXGAS_EOA) + js.next();
            r.txGasUsed = adjusted > 0 ? static_cast<u64>(adjusted) : 0;
            r.pvg = 0;
            r.actualGasUsed = r.txGasUsed;
            r.l1FeeShare = chain->bundler.l1FeeShare;
            r.components.emplace_back(GasComponent::Execution, r.txGasUsed);
            rec.accepted = true;
            rec.receipt = r;
            run.records.push_back(rec);
            ++run.accepted;
            chain->advanceBlocks();
        }
    } else {
        chain->jitter.emplace(amplitude, sysSeed);
        auto pmKind = *paymasterKindOf(system);
        Address pmAddr = paymasterAddressFor(pmKind);
        for (size_t i = 0; i < n; ++i) {
            applyFaults(*chain, spec.faults, spec);
            UserOperation op = buildWorkloadOp(*chain, spec, system, i);
            OpRecord rec;
            rec.opIndex = i;
            rec.sender = op.sender;
            OpResult res = chain->submit(op);
            if (res.accepted) {
                rec.accepted = true;
                rec.receipt = res.receipt;
                rec.settlement = res.settlement;
                rec.selfStorageViolations =
                    checkSelfStorageRule(res.trace, pmAddr, chain->paymasters.at(pmAddr).staked()).size();
                ++run.accepted;
            } else {
                rec.exclusionReason = res.rejection ? res.rejection->describe() : "rejected";
                rec.innerError = res.innerError;
                ++run.excluded;
            }
            run.records.push_back(std::move(rec));
            chain->advanceBlocks();
        }
        if (!spec.operators.empty()) {
            TokenId gasToken = spec.operators.front().gasToken;
            run.ledgerGasTokenBurned = chain->ledger.totalBurned(gasToken);
            for (const auto& fx : chain->settlements)
                if (fx.burnToken == gasToken) run.receiptGasTokenBurned += fx.xpntsBurned;
        }
    }
    run.conservation = chain->ledger.conservationHolds();
    return run;
}

inline CampaignResult runGasCampaign(const ScenarioSpec& spec, size_t n) {
    CampaignResult result;
    result.nPerSystem = n;
    for (auto system : spec.systems) result.runs.push_back(runSystem(spec, system, n));
    return result;
}

// -----------------------------------------------------------------------------
// P1 censorship experiment: identical workloads against the API-signature
// baseline and the asset-gated paymaster, under a signer fault schedule.
// -----------------------------------------------------------------------------

struct CensorshipTally {
    SystemKind system = SystemKind::AoaSuper;
    size_t succeeded = 0;
    size_t failed = 0;
    std::map<std::string, size_t> failuresByError;
    std::map<Address, std::pair<size_t, size_t>> perSender; // success, fail
};

struct CensorshipResult {
    CensorshipTally poa;
    CensorshipTally aoa;
};

inline CensorshipTally tallySystem(const ScenarioSpec& spec, SystemKind system, size_t n) {
    CensorshipTally tally;
    tally.system = system;
    SystemRun run = runSystem(spec, system, n);
    for (const auto& rec : run.records) {
        auto& per = tally.perSender[rec.sender];
        if (rec.accepted) {
            ++tally.succeeded;
            ++per.first;
        } else {
            ++tally.failed;
            ++per.second;
            std::string key = rec.innerError ? std::string(errName(*rec.innerError)) : rec.exclusionReason;
            ++tally.failuresByError[key];
        }
    }
    return tally;
}

inline CensorshipResult runCensorshipExperiment(const ScenarioSpec& spec) {
    CensorshipResult out;
    size_t n = spec.workload.opsPerSystem;
    out.poa = tallySystem(spec, SystemKind::PoaVerifying, n);
    out.aoa = tallySystem(spec, SystemKind::AoaSuper, n);
    return out;
}

// -----------------------------------------------------------------------------
// Adversarial suite over the threat model: replay, fund drain, direct postOp,
// Sybil issuance, governance surfaces, burn/firewall safety.
// -----------------------------------------------------------------------------

struct AdversarialSpec {
    ScenarioSpec base;
    bool adversariesEnabled = true;
    size_t replayCopies = 10;
    size_t drainOps = 20;
    size_t directPostOpAttempts = 10;
    size_t sybilMints = 100;
    size_t firewallAttempts = 2000;
    bool disableFirewall = false; // test hook, demonstrates a caught violation
};

struct ThreatCheck {
    std::string id;
    std::string name;
    bool applicable = true;
    bool passed = true;
    std::string detail;
};

struct AdversarialReport {
    std::vector<ThreatCheck> checks;

    bool allPassed() const {
        for (const auto& c : checks)
            if (c.applicable && !c.passed) return false;
        return true;
    }
};

namespace detail_adv {

inline ThreatCheck sybilCheck(const AdversarialSpec& spec) {
    ThreatCheck check{"i", "sybil cost on gas-card issuance", spec.adversariesEnabled, true, ""};
    if (!spec.adversariesEnabled || spec.sybilMints == 0) {
        check.applicable = false;
        check.detail = "no sybil adversary configured";
        return check;
    }
    auto chain = buildChain(spec.base, SystemKind::AoaSuper);
    TokenLedger& ledger = chain->ledger;
    u256 floor = ledger.sbtMintFloor;
    u256 burnedBefore = ledger.totalBurned(ledger.gtoken);
    size_t minted = 0, duplicatesRejected = 0;
    for (size_t i = 0; i < spec.sybilMints; ++i) {
        Address sybil = derivedAddress("actor/sybil-" + std::to_string(i));
        ledger.mint(ledger.gtoken, sybil, floor);
        if (ledger.mintSbt(sybil, floor, chain->blockNumber).ok()) ++minted;
        if (!ledger.mintSbt(sybil, floor, chain->blockNumber).ok()) ++duplicatesRejected;
    }
    u256 expectedBurn = floor * spec.sybilMints;
    u256 actualBurn = ledger.totalBurned(ledger.gtoken) - burnedBefore;
    check.passed = minted == spec.sybilMints && duplicatesRejected == spec.sybilMints && actualBurn == expectedBurn;
    check.detail = std::to_string(minted) + " mints burned exactly " + actualBurn.str() +
                   " GToken base units; one card per identity";
    return check;
}

inline ThreatCheck cardTheftCheck(const AdversarialSpec& spec) {
    ThreatCheck check{"ii", "gas-card non-transferability", true, true, ""};
    auto chain = buildChain(spec.base, SystemKind::AoaSuper);
    auto ownersBefore = chain->ledger.sbtRecords();
    // run a slice of workload plus arbitrary ledger traffic, then re-check
    for (size_t i = 0; i < 10; ++i) {
        applyFaults(*chain, spec.base.faults, spec.base);
        UserOperation op = buildWorkloadOp(*chain, spec.base, SystemKind::AoaSuper, i);
        chain->submit(op);
        chain->advanceBlocks();
    }
    const auto& after = chain->ledger.sbtRecords();
    bool appendOnly = true;
    for (const auto& [owner, rec] : ownersBefore) {
        auto it = after.find(owner);
        if (it == after.end() || it->second.owner != owner) appendOnly = false;
    }
    check.passed = appendOnly;
    check.detail = "owner->record bindings append-only; no transfer operation exists";
    return check;
}

inline ThreatCheck drainCheck(const AdversarialSpec& spec) {
    ThreatCheck check{"iii", "paymaster fund drain bounding", spec.adversariesEnabled, true, ""};
    if (!spec.adversariesEnabled || spec.drainOps == 0) {
        check.applicable = false;
        check.detail = "no drain adversary configured";
        return check;
    }
    auto chain = buildChain(spec.base, SystemKind::AoaSuper);
    Address pmAddr = paymasterAddressFor(PaymasterKind::AoaSuper);
    u256 hardCap = chain->paymasters.at(pmAddr).protocolHardCap;
    u256 tenTimes = hardCap * 10;
    auto users = scenarioUsers(spec.base);
    bool bounded = true;
    std::string offender;
    for (size_t i = 0; i < spec.drainOps; ++i) {
        Action action{ActionKind::Erc20Transfer, spec.base.workload.payloadToken, derivedAddress("actor/recipient"),
                      spec.base.workload.transferAmount};
        UserOperation op = chain->makeOp(users[i % users.size()].addr, action, pmAddr,
                                         spec.base.operators.front().addr, tenTimes);
        u256 depositBefore = chain->paymasters.at(pmAddr).deposit;
        OpResult res = chain->submit(op);
        chain->advanceBlocks();
        if (!res.accepted) continue;
        u256 depositAfter = chain->paymasters.at(pmAddr).deposit;
        u256 settled = res.settlement.costEth;
        u256 cap = tenTimes < hardCap ? tenTimes : hardCap;
        if (settled > cap || depositBefore - depositAfter > cap ||
            res.settlement.xpntsBurned > chain->ledger.maxSingleTxLimit) {
            bounded = false;
            offender = "op " + std::to_string(i) + " settled " + settled.str();
        }
    }
    check.passed = bounded;
    check.detail = bounded ? "settled cost <= min(maxCost, hardCap) and burns <= per-tx limit on every op"
                           : offender;
    return check;
}

inline ThreatCheck sequencerCheck() {
    ThreatCheck check{"iv", "sequencer censorship", false, true,
                      "out of scope: inherits rollup inclusion assumptions; force-inclusion paths not modeled"};
    return check;
}

inline ThreatCheck governanceCheck(const AdversarialSpec& spec) {
    ThreatCheck check{"v", "registry governance and permissionless issuance", true, true, ""};
    auto chain = buildChain(spec.base, SystemKind::AoaSuper);
    Address attacker = derivedAddress("actor/attacker");
    Address pmAddr = paymasterAddressFor(PaymasterKind::AoaSuper);
    auto& pm = chain->paymasters.at(pmAddr);

    bool govGate = !chain->ledger.setAutoApproved(attacker, spec.base.operators.front().gasToken, attacker, true).ok();
    bool registryGate = !chain->registry.updateSBTStatus(attacker, pm, chain->ledger, attacker, true).ok();
    Address fresh = derivedAddress("actor/fresh-minter");
    chain->ledger.mint(chain->ledger.gtoken, fresh, chain->ledger.sbtMintFloor);
    bool permissionless = chain->ledger.mintSbt(fresh, chain->ledger.sbtMintFloor, chain->blockNumber).ok();

    check.passed = govGate && registryGate && permissionless;
    check.detail = "governance-only spender list, registry-only mirror writes, permissionless self-mint";
    return check;
}

inline ThreatCheck burnSafetyCheck(const AdversarialSpec& spec) {
    ThreatCheck check{"vi", "gas-token burn safety", spec.adversariesEnabled, true, ""};
    if (!spec.adversariesEnabled) {
        check.applicable = false;
        check.detail = "no adversaries configured";
        return check;
    }
    auto chain = buildChain(spec.base, SystemKind::AoaSuper);
    chain->ledger.firewallEnabled = !spec.disableFirewall;
    Address pmAddr = paymasterAddressFor(PaymasterKind::AoaSuper);
    auto& pm = chain->paymasters.at(pmAddr);
    TokenId gasToken = spec.base.operators.front().gasToken;
    auto users = scenarioUsers(spec.base);
    std::vector<std::string> problems;

    // Replay: exactly-once per nonce.
    UserOperation op = buildWorkloadOp(*chain, spec.base, SystemKind::AoaSuper, 0);
    size_t successes = 0;
    for (size_t i = 0; i < spec.replayCopies; ++i) {
        if (chain->submit(op).accepted) ++successes;
    }
    if (successes != 1)
        problems.push_back("replay: " + std::to_string(successes) + " of " + std::to_string(spec.replayCopies) +
                           " duplicates succeeded");

    // Direct postOp calls without the EntryPoint caller or with a mismatched
    // hash must burn nothing.
    u256 burnedBefore = chain->ledger.totalBurned(gasToken);
    SettlementContext forged{spec.base.operators.front().addr, users[0].addr, Digest32{}, u256{1'000'000},
                             gasToken,
                             u256{0}};
    PostOpEnv env;
    env.entryPoint = chain->entryPointAddr;
    env.executedOpHash = Digest32{};
    env.ledger = &chain->ledger;
    env.nowBlock = chain->blockNumber;
    for (size_t i = 0; i < spec.directPostOpAttempts; ++i) {
        Address attacker = derivedAddress("actor/postop-attacker-" + std::to_string(i));
        auto direct = postOp(pm, attacker, forged, u256{1000}, env);
        if (direct.ok() || direct.error() != Err::NotEntryPoint)
            problems.push_back("direct postOp not rejected with NotEntryPoint");
        Digest32 other = hashBytes(std::array<std::uint8_t, 1>{static_cast<std::uint8_t>(i)});
        SettlementContext wrongHash = forged;
        wrongHash.userOpHash = other;
        auto mismatch = postOp(pm, chain->entryPointAddr, wrongHash, u256{1000}, env);
        if (mismatch.ok() || mismatch.error() != Err::HashMismatch)
            problems.push_back("hash-mismatched postOp not rejected");
    }
    if (chain->ledger.totalBurned(gasToken) != burnedBefore)
        problems.push_back("adversarial postOp calls changed burn totals");

    // Firewall: auto-approved pulls may only land on the spender itself or the
    // registered settlement destination, and never above the per-tx cap.
    std::mt19937_64 gen(deriveSeed(spec.base.seed, "firewall"));
    Address thirdParty = derivedAddress("actor/third-party");
    for (size_t i = 0; i < spec.firewallAttempts; ++i) {
        const Address& from = users[gen() % users.size()].addr;
        u64 destPick = gen() % 3;
        Address dest = destPick == 0 ? pmAddr : destPick == 1 ? chain->ledger.superPaymasterAddr : thirdParty;
        bool overCap = gen() % 4 == 0;
        u256 amount = overCap ? chain->ledger.maxSingleTxLimit + 1 : u256{1 + gen() % 1000};
        u256 thirdBefore = chain->ledger.balance(gasToken, thirdParty);
        Status st = chain->ledger.transferFrom(gasToken, pmAddr, from, dest, amount);
        bool destAllowed = dest == pmAddr || dest == chain->ledger.superPaymasterAddr;
        if (st.ok() && (!destAllowed || overCap)) {
            problems.push_back("firewall breach: transferFrom " + from.hex() + " -> " + dest.hex() + " amount " +
                               amount.str());
            break;
        }
        if (chain->ledger.balance(gasToken, thirdParty) != thirdBefore) {
            problems.push_back("third party credited: " + thirdParty.hex());
            break;
        }
    }

    check.passed = problems.empty();
    if (!problems.empty())
        check.detail = problems.front();
    else
        check.detail = "replay exactly-once, direct postOp inert, firewall and per-tx cap hold";
    return check;
}

} // namespace detail_adv

inline AdversarialReport runAdversarialSuite(const AdversarialSpec& spec) {
    AdversarialReport report;
    report.checks.push_back(detail_adv::sybilCheck(spec));
    report.checks.push_back(detail_adv::cardTheftCheck(spec));
    report.checks.push_back(detail_adv::drainCheck(spec));
    report.checks.push_back(detail_adv::sequencerCheck());
    report.checks.push_back(detail_adv::governanceCheck(spec));
    report.checks.push_back(detail_adv::burnSafetyCheck(spec));
    return report;
}

} // namespace aasim
