// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "aasim/common.hpp"
#include "aasim/ledger.hpp"

#include <random>
#include <string>
#include <vector>

namespace aasim::test {

// Hand-rolled property-test generators; seeded and deterministic.

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(u64 seed) : gen(seed) {}

    u64 next() { return gen(); }
    u64 below(u64 n) { return n == 0 ? 0 : gen() % n; }
    bool chance(u64 percent) { return below(100) < percent; }

    template <typename T>
    const T& pick(const std::vector<T>& xs) {
        return xs[below(xs.size())];
    }

    u256 amount(u64 maxWhole) { return u256(below(maxWhole * 1000)) * u256{"1000000000000000"}; }

    double real(double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(gen() >> 11) / 9007199254740992.0);
    }
};

inline std::vector<Address> testActors(size_t n, const std::string& tag = "test-actor") {
    std::vector<Address> out;
    for (size_t i = 0; i < n; ++i) out.push_back(derivedAddress(tag + "-" + std::to_string(i)));
    return out;
}

// One randomized ledger op-sequence step mixing transfers, approvals, firewall
// pulls, governance toggles and SBT mints. Returns false (and the description)
// if the step observed a safety violation: an auto-approved pull crediting a
// destination outside {caller, settlement address}, a pull above the per-tx
// cap, or a conservation break.
struct LedgerFuzzResult {
    bool ok = true;
    std::string what;
};

inline LedgerFuzzResult randomLedgerStep(TokenLedger& ledger, Rng& rng, const std::vector<Address>& holders,
                                         const Address& autoApprovedSpender, const TokenId& token) {
    const Address& a = rng.pick(holders);
    const Address& b = rng.pick(holders);
    switch (rng.below(6)) {
        case 0:
            (void)ledger.transfer(token, a, b, rng.amount(2));
            break;
        case 1:
            (void)ledger.approve(token, a, b, rng.amount(2));
            break;
        case 2: { // standard transferFrom
            (void)ledger.transferFrom(token, b, a, rng.pick(holders), rng.amount(1));
            break;
        }
        case 3: { // auto-approved pull at a random destination
            Address dest = rng.chance(50) ? rng.pick(holders)
                                          : (rng.chance(50) ? autoApprovedSpender : ledger.superPaymasterAddr);
            bool overCap = rng.chance(10);
            u256 amount = overCap ? ledger.maxSingleTxLimit + 1 : rng.amount(1);
            u256 destBefore = ledger.balance(token, dest);
            Status st = ledger.transferFrom(token, autoApprovedSpender, a, dest, amount);
            bool destAllowed = dest == autoApprovedSpender || dest == ledger.superPaymasterAddr;
            if (st.ok() && !destAllowed)
                return {false, "auto-approved pull credited " + dest.hex()};
            if (st.ok() && overCap) return {false, "auto-approved pull above per-tx cap"};
            if (!st.ok() && ledger.balance(token, dest) != destBefore)
                return {false, "failed pull moved funds"};
            break;
        }
        case 4: {
            (void)ledger.setAutoApproved(ledger.governance, token, rng.pick(holders), rng.chance(50));
            // keep the designated spender trusted so the firewall path stays hot
            (void)ledger.setAutoApproved(ledger.governance, token, autoApprovedSpender, true);
            break;
        }
        case 5: {
            ledger.mint(ledger.gtoken, a, ledger.sbtMintFloor);
            (void)ledger.mintSbt(a, ledger.sbtMintFloor, 1);
            break;
        }
    }
    if (!ledger.conservationHolds()) return {false, "conservation violated"};
    return {true, ""};
}

inline TokenLedger fuzzLedger(const std::vector<Address>& holders, const Address& spender, const TokenId& token) {
    TokenLedger ledger;
    ledger.governance = derivedAddress("test-governance");
    ledger.superPaymasterAddr = derivedAddress("test-settlement");
    for (const auto& h : holders) ledger.mint(token, h, ether(100));
    (void)ledger.setAutoApproved(ledger.governance, token, spender, true);
    return ledger;
}

} // namespace aasim::test
