// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one test case per acceptance criterion, one printed
// pass/fail line each. Run via ctest or directly.

#include <catch2/catch_amalgamated.hpp>

#include "aasim/campaign.hpp"
#include "aasim/cli.hpp"
#include "aasim/goms.hpp"
#include "helpers.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

using namespace aasim;
using aasim::test::Rng;

namespace {

class CriterionReporter : public Catch::EventListenerBase {
public:
    using EventListenerBase::EventListenerBase;
    void testCaseEnded(const Catch::TestCaseStats& stats) override {
        bool ok = stats.totals.assertions.allPassed();
        std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", stats.testInfo->name.c_str());
        std::fflush(stdout);
    }
};
CATCH_REGISTER_LISTENER(CriterionReporter)

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

std::vector<double> txSamples(const CampaignResult& c, SystemKind s) {
    for (const auto& run : c.runs)
        if (run.system == s) return stats::txGasSamples(run.receipts());
    return {};
}

} // namespace

TEST_CASE("criterion 1: receipt identity, reference decompositions exact") {
    Stopwatch sw;
    ScenarioSpec spec;
    spec.noise = false;
    spec.systems = {SystemKind::AoaV4, SystemKind::AoaSuper, SystemKind::PoaVerifying, SystemKind::PoaDexErc20};
    CampaignResult res = runGasCampaign(spec, 3);

    const std::map<SystemKind, std::array<u64, 3>> expected{
        {SystemKind::AoaV4, {152'008, 119'084, 271'092}},
        {SystemKind::AoaSuper, {167'830, 118'988, 286'818}},
        {SystemKind::PoaVerifying, {205'951, 51'348, 257'299}},
        {SystemKind::PoaDexErc20, {328'937, 58'192, 387'129}},
    };
    for (const auto& run : res.runs) {
        const auto& [tx, pvg, actual] = expected.at(run.system);
        REQUIRE(run.accepted == 3);
        for (const auto& rec : run.records) {
            REQUIRE(rec.receipt.txGasUsed == tx);
            REQUIRE(rec.receipt.pvg == pvg);
            REQUIRE(rec.receipt.actualGasUsed == actual);
            REQUIRE(rec.receipt.actualGasUsed == rec.receipt.txGasUsed + rec.receipt.pvg);
            REQUIRE(rec.receipt.componentSum() == rec.receipt.txGasUsed);
        }
    }
    REQUIRE(sw.seconds() < 1.0);
}

TEST_CASE("criterion 2: validation deltas exact in calibrated mode") {
    GasCostTable t = GasCostTable::calibrated();
    u64 super = t.chargeComponent(PaymasterKind::AoaSuper, GasComponent::PaymasterValidation).value();
    u64 verifying = t.chargeComponent(PaymasterKind::PoaVerifying, GasComponent::PaymasterValidation).value();
    u64 v4 = t.chargeComponent(PaymasterKind::AoaV4, GasComponent::PaymasterValidation).value();
    REQUIRE(super - verifying == 32'625);
    REQUIRE(super - v4 == 13'076);

    u64 superActual = t.fullStackTxGas(PaymasterKind::AoaSuper) + gasdefaults::PVG_SUPER;
    u64 v4Actual = t.fullStackTxGas(PaymasterKind::AoaV4) + gasdefaults::PVG_V4;
    REQUIRE(superActual - v4Actual == 15'726);
    double pct = 100.0 * static_cast<double>(superActual - v4Actual) / static_cast<double>(v4Actual);
    REQUIRE(std::fabs(pct - 5.80) <= 0.01); // percentage points
}

TEST_CASE("criterion 3: signer-gate elimination and self-storage confinement") {
    Stopwatch sw;
    ScenarioSpec spec;
    spec.workload.opsPerSystem = 50;

    // signer offline for the whole run
    {
        ScenarioSpec faulted = spec;
        faulted.faults.signerOfflineAtBlock = 0;
        CensorshipResult res = runCensorshipExperiment(faulted);
        REQUIRE(res.poa.succeeded == 0);
        REQUIRE(res.poa.failed == 50);
        REQUIRE(res.aoa.succeeded == 50);
        REQUIRE(res.aoa.failed == 0);
    }
    // one-sender blacklist
    {
        ScenarioSpec faulted = spec;
        Address victim = scenarioUsers(faulted)[1].addr;
        faulted.faults.blacklistSenders = {victim};
        CensorshipResult res = runCensorshipExperiment(faulted);
        REQUIRE(res.aoa.failed == 0);
        for (const auto& [sender, tally] : res.poa.perSender) {
            auto [ok, bad] = tally;
            if (sender == victim) {
                REQUIRE(ok == 0);
                REQUIRE(bad == 10);
            } else {
                REQUIRE(bad == 0);
            }
        }
    }
    // AOA traces: zero non-self-storage reads in the validation phase
    for (auto system : {SystemKind::AoaSuper, SystemKind::AoaV4}) {
        SystemRun run = runSystem(spec, system, 50);
        REQUIRE(run.accepted == 50);
        for (const auto& rec : run.records) REQUIRE(rec.selfStorageViolations == 0);
    }
    // the broken variant is flagged
    {
        auto chain = buildChain(spec, SystemKind::AoaSuper);
        Address pmAddr = paymasterAddressFor(PaymasterKind::AoaSuper);
        chain->paymasters.at(pmAddr).injectLiveRegistryRead = true;
        UserOperation op = buildWorkloadOp(*chain, spec, SystemKind::AoaSuper, 0);
        OpResult res = chain->submit(op);
        REQUIRE(res.accepted);
        auto violations = checkSelfStorageRule(res.trace, pmAddr, true);
        REQUIRE(violations.size() == 1);
        REQUIRE(violations.front().entry.contract == chain->registry.addr);
    }
    REQUIRE(sw.seconds() < 5.0);
}

TEST_CASE("criterion 4: complete separation under jitter and delta properties") {
    ScenarioSpec spec;
    spec.noise = true;
    CampaignResult res = runGasCampaign(spec, 50);

    auto superTx = txSamples(res, SystemKind::AoaSuper);
    auto v4Tx = txSamples(res, SystemKind::AoaV4);
    auto verifyingTx = txSamples(res, SystemKind::PoaVerifying);
    auto dexTx = txSamples(res, SystemKind::PoaDexErc20);
    REQUIRE(superTx.size() == 50);

    auto dSuperVerifying = stats::cliffsDelta(superTx, verifyingTx).value();
    REQUIRE(dSuperVerifying.delta == 1.0);
    REQUIRE(dSuperVerifying.magnitude == stats::DeltaMagnitude::Large);

    auto dSuperDex = stats::cliffsDelta(superTx, dexTx).value();
    REQUIRE(dSuperDex.delta == 1.0);
    REQUIRE(dSuperDex.magnitude == stats::DeltaMagnitude::Large);

    // within the asset-gated family the single-community kind is strictly lower
    auto dV4Super = stats::cliffsDelta(v4Tx, superTx).value();
    REQUIRE(dV4Super.delta == 1.0);
    REQUIRE(stats::cliffsDelta(superTx, v4Tx).value().delta == -1.0);
    double v4Max = *std::max_element(v4Tx.begin(), v4Tx.end());
    double superMin = *std::min_element(superTx.begin(), superTx.end());
    REQUIRE(v4Max < superMin);

    // antisymmetry and monotone-transform invariance on randomized samples
    Rng rng(1212);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> a, b;
        size_t na = 1 + rng.below(10), nb = 1 + rng.below(10);
        for (size_t i = 0; i < na; ++i) a.push_back(rng.real(-100, 100));
        for (size_t i = 0; i < nb; ++i) b.push_back(rng.real(-100, 100));
        auto ab = stats::cliffsDelta(a, b).value();
        auto ba = stats::cliffsDelta(b, a).value();
        REQUIRE(ab.delta == Catch::Approx(-ba.delta));
        double scale = 0.25 + rng.real(0, 3);
        double shift = rng.real(-20, 20);
        std::vector<double> ta, tb;
        for (double x : a) ta.push_back(scale * x + shift);
        for (double x : b) tb.push_back(scale * x + shift);
        REQUIRE(stats::cliffsDelta(ta, tb).value().delta == Catch::Approx(ab.delta));
    }
}

TEST_CASE("criterion 5: bootstrap determinism and jittered CI width") {
    // constant samples: zero width
    auto flat = stats::bootstrapCi({5, 5, 5, 5}, 10'000, 0.95, 42).value();
    REQUIRE(flat.first == 5.0);
    REQUIRE(flat.second == 5.0);

    // bit-reproducibility
    std::vector<double> sample{10, 20, 30, 40, 50};
    REQUIRE(stats::bootstrapCi(sample, 10'000, 0.95, 7).value() ==
            stats::bootstrapCi(sample, 10'000, 0.95, 7).value());

    // jittered asset-gated campaign: 95% CI half-width at most 300 gas
    ScenarioSpec spec;
    spec.noise = true;
    spec.systems = {SystemKind::AoaSuper};
    CampaignResult res = runGasCampaign(spec, 50);
    auto tx = txSamples(res, SystemKind::AoaSuper);
    auto ci = stats::bootstrapCi(tx, 10'000, 0.95, spec.seed).value();
    double halfWidth = (ci.second - ci.first) / 2.0;
    REQUIRE(halfWidth <= 300.0);
    REQUIRE(ci.first <= 167'830.0);
    REQUIRE(ci.second >= 167'830.0);
}

TEST_CASE("criterion 6: threat suite with 10,000-case randomized property testing") {
    Stopwatch sw;
    ScenarioSpec spec;

    // replay: exactly-once per nonce over randomized resubmission storms
    {
        auto chain = buildChain(spec, SystemKind::AoaSuper);
        std::vector<UserOperation> pool;
        for (int i = 0; i < 20; ++i) {
            UserOperation op = buildWorkloadOp(*chain, spec, SystemKind::AoaSuper, i);
            OpResult first = chain->submit(op);
            REQUIRE(first.accepted);
            pool.push_back(op);
            chain->advanceBlocks();
        }
        Rng rng(606);
        size_t replaySuccesses = 0;
        for (int i = 0; i < 10'000; ++i) {
            OpResult res = chain->submit(pool[rng.below(pool.size())]);
            if (res.accepted)
                ++replaySuccesses;
            else
                REQUIRE(res.rejection->code == Err::NonceReplay);
        }
        REQUIRE(replaySuccesses == 0);
    }

    // drain bounding: settled <= min(maxCost, hardCap), burn <= per-tx limit
    {
        AdversarialSpec adv;
        adv.base = spec;
        adv.drainOps = 50;
        auto check = runAdversarialSuite(adv);
        for (const auto& c : check.checks)
            if (c.applicable) REQUIRE(c.passed);
    }

    // direct-postOp immunity and firewall, 10,000 randomized sequences
    {
        auto holders = aasim::test::testActors(6);
        Address spender = derivedAddress("test-spender");
        Rng rng(20260607);
        const TokenId gasToken{"xPNTs"};
        for (int seq = 0; seq < 10'000; ++seq) {
            TokenLedger ledger = aasim::test::fuzzLedger(holders, spender, gasToken);
            for (int step = 0; step < 4; ++step) {
                auto out = aasim::test::randomLedgerStep(ledger, rng, holders, spender, gasToken);
                INFO(out.what);
                REQUIRE(out.ok);
            }
        }
    }

    // sybil cost linearity at 10,000 identities
    {
        TokenLedger ledger;
        ledger.governance = derivedAddress("gov");
        u256 floor = ledger.sbtMintFloor;
        u256 burnedBefore = ledger.totalBurned(ledger.gtoken);
        for (int i = 0; i < 10'000; ++i) {
            Address sybil = derivedAddress("sybil-" + std::to_string(i));
            ledger.mint(ledger.gtoken, sybil, floor);
            REQUIRE(ledger.mintSbt(sybil, floor, 1).ok());
        }
        REQUIRE(ledger.totalBurned(ledger.gtoken) - burnedBefore == floor * 10'000);
        REQUIRE(ledger.sbtCount() == 10'000);
        REQUIRE(ledger.conservationHolds());
    }

    REQUIRE(sw.seconds() < 60.0);
}

TEST_CASE("criterion 7: goms constants and printed reductions") {
    using namespace aasim::goms;
    std::vector<size_t> totals;
    for (const auto& m : standardWorkflows()) totals.push_back(gomsCount(m).total);
    REQUIRE(totals == std::vector<size_t>{9, 4, 4, 2, 2});

    auto eoa = gomsCount(standardWorkflow(WorkflowLabel::EoaRecovery));
    REQUIRE(eoa.m == 4);
    REQUIRE(eoa.p == 4);
    REQUIRE(eoa.w == 1);

    std::string text = report::gomsReport();
    REQUIRE(text.find("= 9 operators") != std::string::npos);
    REQUIRE(text.find("vs PoaSteadyState: 50%") != std::string::npos);
    REQUIRE(text.find("vs EoaRecovery:    78%") != std::string::npos);
}

TEST_CASE("criterion 8: conservation and burn reconciliation after randomized campaigns") {
    for (u64 seed : {42ULL, 7ULL, 90210ULL}) {
        ScenarioSpec spec;
        spec.seed = seed;
        spec.noise = true;
        CampaignResult res = runGasCampaign(spec, 50);
        for (const auto& run : res.runs) {
            INFO(systemName(run.system) << " seed " << seed);
            REQUIRE(run.conservation);
            REQUIRE(run.ledgerGasTokenBurned == run.receiptGasTokenBurned);
        }
    }
}

TEST_CASE("criterion 9: desk-scale substitutions documented") {
    // Real L2 mainnet gas values, bundler PVG estimation behavior, L1 blob-fee
    // dynamics and the archived n=50 mainnet datasets are not reproducible
    // here; the calibrated-mode identities (criteria 1-2) and the randomized
    // property suites (criteria 3-8) stand in for them.
    GasCostTable t = GasCostTable::calibrated();
    BundlerProfile p = BundlerProfile::calibrated();
    REQUIRE(t.mode == GasMode::Calibrated);
    REQUIRE_FALSE(p.pvgTable.empty());
    REQUIRE(p.l1FeeShare == 0.08);
    std::printf("  note: mainnet gas, bundler PVG estimation and blob-fee dynamics are replaced by "
                "calibrated identities plus property suites\n");
}
