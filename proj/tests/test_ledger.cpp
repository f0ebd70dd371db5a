// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include "aasim/ledger.hpp"
#include "helpers.hpp"

using namespace aasim;
using aasim::test::Rng;

namespace {

const TokenId XPNTS{"xPNTs"};

struct LedgerFixture {
    TokenLedger ledger;
    Address governance = derivedAddress("test-governance");
    Address settlement = derivedAddress("test-settlement");
    Address spender = derivedAddress("test-spender");
    Address alice = derivedAddress("alice");
    Address bob = derivedAddress("bob");

    LedgerFixture() {
        ledger.governance = governance;
        ledger.superPaymasterAddr = settlement;
    }
};

} // namespace

TEST_CASE("transfer semantics") {
    LedgerFixture f;
    f.ledger.mint(XPNTS, f.alice, 100);

    SECTION("zero amount is a no-op success") {
        REQUIRE(f.ledger.transfer(XPNTS, f.alice, f.bob, 0).ok());
        REQUIRE(f.ledger.balance(XPNTS, f.alice) == 100);
        REQUIRE(f.ledger.balance(XPNTS, f.bob) == 0);
    }
    SECTION("full balance moves") {
        REQUIRE(f.ledger.transfer(XPNTS, f.alice, f.bob, 100).ok());
        REQUIRE(f.ledger.balance(XPNTS, f.alice) == 0);
        REQUIRE(f.ledger.balance(XPNTS, f.bob) == 100);
    }
    SECTION("overdraft rejected") {
        f.ledger.mint(XPNTS, f.bob, 0);
        TokenLedger before = f.ledger;
        auto st = f.ledger.transfer(XPNTS, f.bob, f.alice, 100);
        REQUIRE_FALSE(st.ok());
        REQUIRE(st.error() == Err::InsufficientBalance);
        REQUIRE(f.ledger.balance(XPNTS, f.alice) == 100);
    }
    SECTION("zero destination rejected") {
        auto st = f.ledger.transfer(XPNTS, f.alice, Address::zero(), 1);
        REQUIRE_FALSE(st.ok());
        REQUIRE(st.error() == Err::ZeroAddressDestination);
    }
    SECTION("supply unchanged by transfers") {
        REQUIRE(f.ledger.transfer(XPNTS, f.alice, f.bob, 40).ok());
        REQUIRE(f.ledger.totalSupply(XPNTS) == 100);
        REQUIRE(f.ledger.conservationHolds());
    }
}

TEST_CASE("allowance is virtual for auto-approved spenders") {
    LedgerFixture f;
    REQUIRE(f.ledger.setAutoApproved(f.governance, XPNTS, f.spender, true).ok());

    SECTION("auto-approved spender sees the max value") {
        REQUIRE(f.ledger.allowance(XPNTS, f.alice, f.spender) == U256_MAX);
    }
    SECTION("stranger defaults to zero") {
        REQUIRE(f.ledger.allowance(XPNTS, f.alice, f.bob) == 0);
    }
    SECTION("stored allowance round-trips") {
        REQUIRE(f.ledger.approve(XPNTS, f.alice, f.bob, 7).ok());
        REQUIRE(f.ledger.allowance(XPNTS, f.alice, f.bob) == 7);
    }
    SECTION("removal falls back to the stored value, never the virtual one") {
        REQUIRE(f.ledger.approve(XPNTS, f.alice, f.spender, 7).ok());
        REQUIRE(f.ledger.allowance(XPNTS, f.alice, f.spender) == U256_MAX);
        REQUIRE(f.ledger.setAutoApproved(f.governance, XPNTS, f.spender, false).ok());
        REQUIRE(f.ledger.allowance(XPNTS, f.alice, f.spender) == 7);
    }
}

TEST_CASE("transferFrom firewall") {
    LedgerFixture f;
    f.ledger.mint(XPNTS, f.alice, ether(20000));
    REQUIRE(f.ledger.setAutoApproved(f.governance, XPNTS, f.spender, true).ok());

    SECTION("pull to the settlement address at exactly the cap succeeds") {
        u256 cap = f.ledger.maxSingleTxLimit;
        REQUIRE(f.ledger.transferFrom(XPNTS, f.spender, f.alice, f.settlement, cap).ok());
        REQUIRE(f.ledger.balance(XPNTS, f.settlement) == cap);
    }
    SECTION("pull to itself succeeds without touching allowances") {
        REQUIRE(f.ledger.transferFrom(XPNTS, f.spender, f.alice, f.spender, 5).ok());
        REQUIRE(f.ledger.allowance(XPNTS, f.alice, f.spender) == U256_MAX);
    }
    SECTION("pull to an arbitrary third address is blocked") {
        auto st = f.ledger.transferFrom(XPNTS, f.spender, f.alice, f.bob, 5);
        REQUIRE_FALSE(st.ok());
        REQUIRE(st.error() == Err::UnauthorizedDestination);
        REQUIRE(f.ledger.balance(XPNTS, f.bob) == 0);
    }
    SECTION("one above the cap is blocked") {
        auto st = f.ledger.transferFrom(XPNTS, f.spender, f.alice, f.settlement, f.ledger.maxSingleTxLimit + 1);
        REQUIRE_FALSE(st.ok());
        REQUIRE(st.error() == Err::ExceedsCap);
    }
    SECTION("standard spender path decrements the stored allowance") {
        REQUIRE(f.ledger.approve(XPNTS, f.alice, f.bob, 10).ok());
        REQUIRE(f.ledger.transferFrom(XPNTS, f.bob, f.alice, f.bob, 4).ok());
        REQUIRE(f.ledger.allowance(XPNTS, f.alice, f.bob) == 6);
        auto st = f.ledger.transferFrom(XPNTS, f.bob, f.alice, f.bob, 7);
        REQUIRE(st.error() == Err::InsufficientAllowance);
    }
}

TEST_CASE("sbt mint is burn-gated and once per owner") {
    LedgerFixture f;
    u256 floor = f.ledger.sbtMintFloor;

    SECTION("floor-exact burn mints and reduces supply") {
        f.ledger.mint(f.ledger.gtoken, f.alice, floor);
        u256 supplyBefore = f.ledger.totalSupply(f.ledger.gtoken);
        auto rec = f.ledger.mintSbt(f.alice, floor, 7);
        REQUIRE(rec.ok());
        REQUIRE(rec.value().owner == f.alice);
        REQUIRE(rec.value().mintedAtBlock == 7);
        REQUIRE(rec.value().gtokenBurned == floor);
        REQUIRE(f.ledger.totalSupply(f.ledger.gtoken) == supplyBefore - floor);
    }
    SECTION("second mint by the same owner is rejected") {
        f.ledger.mint(f.ledger.gtoken, f.alice, floor * 2);
        REQUIRE(f.ledger.mintSbt(f.alice, floor, 1).ok());
        auto again = f.ledger.mintSbt(f.alice, floor, 2);
        REQUIRE_FALSE(again.ok());
        REQUIRE(again.error() == Err::AlreadyHoldsSbt);
    }
    SECTION("zero balance cannot mint") {
        auto rec = f.ledger.mintSbt(f.alice, floor, 1);
        REQUIRE(rec.error() == Err::InsufficientGToken);
    }
    SECTION("burn below floor rejected") {
        f.ledger.mint(f.ledger.gtoken, f.alice, floor);
        auto rec = f.ledger.mintSbt(f.alice, floor - 1, 1);
        REQUIRE(rec.error() == Err::BurnBelowFloor);
    }
}

TEST_CASE("governance gate on the trusted spender set") {
    LedgerFixture f;
    Address factory = derivedAddress("contract/factory");

    SECTION("governance adds a trusted contract") {
        REQUIRE(f.ledger.setAutoApproved(f.governance, XPNTS, factory, true).ok());
        REQUIRE(f.ledger.allowance(XPNTS, f.alice, factory) == U256_MAX);
    }
    SECTION("anyone else is rejected") {
        auto st = f.ledger.setAutoApproved(f.alice, XPNTS, factory, true);
        REQUIRE(st.error() == Err::NotGovernance);
    }
    SECTION("toggle round-trip") {
        REQUIRE(f.ledger.setAutoApproved(f.governance, XPNTS, factory, true).ok());
        REQUIRE(f.ledger.setAutoApproved(f.governance, XPNTS, factory, false).ok());
        REQUIRE(f.ledger.allowance(XPNTS, f.alice, factory) == 0);
    }
}

TEST_CASE("overflow is a hard error, never a wrap") {
    LedgerFixture f;
    f.ledger.mint(XPNTS, f.alice, U256_MAX);
    REQUIRE_THROWS_AS(f.ledger.mint(XPNTS, f.alice, 1), std::overflow_error);
}

TEST_CASE("property: conservation and firewall completeness over random op sequences") {
    auto holders = aasim::test::testActors(6);
    Address spender = derivedAddress("test-spender");
    Rng rng(20260809);
    for (int seq = 0; seq < 200; ++seq) {
        TokenLedger ledger = aasim::test::fuzzLedger(holders, spender, XPNTS);
        for (int step = 0; step < 30; ++step) {
            auto res = aasim::test::randomLedgerStep(ledger, rng, holders, spender, XPNTS);
            INFO(res.what);
            REQUIRE(res.ok);
        }
    }
}

TEST_CASE("property: sbt bindings are append-only") {
    auto holders = aasim::test::testActors(4);
    Address spender = derivedAddress("test-spender");
    Rng rng(99);
    TokenLedger ledger = aasim::test::fuzzLedger(holders, spender, XPNTS);
    size_t prevCount = 0;
    std::map<Address, u256> seenBurns;
    for (int step = 0; step < 500; ++step) {
        (void)aasim::test::randomLedgerStep(ledger, rng, holders, spender, XPNTS);
        REQUIRE(ledger.sbtRecords().size() >= prevCount);
        prevCount = ledger.sbtRecords().size();
        for (const auto& [owner, rec] : ledger.sbtRecords()) {
            REQUIRE(rec.owner == owner);
            auto it = seenBurns.find(owner);
            if (it == seenBurns.end())
                seenBurns.emplace(owner, rec.gtokenBurned);
            else
                REQUIRE(it->second == rec.gtokenBurned); // existing records never rewritten
        }
    }
}
