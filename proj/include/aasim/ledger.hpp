// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "aasim/common.hpp"
#include "aasim/trace.hpp"

#include <map>
#include <set>

namespace aasim {

// Non-transferable gas-card record. There is deliberately no operation that
// changes the owner of an existing record.
struct SbtRecord {
    Address owner;
    std::set<Address> communityAssociations;
    u64 mintedAtBlock = 0;
    u256 gtokenBurned{0};
};

// In-memory multi-token ledger with ERC-20-style semantics, the
// auto-approved-spender firewall and burn-to-mint SBT issuance. Single-writer:
// the simulation driver serializes all mutations; snapshots are plain copies.
class TokenLedger {
public:
    // -- configuration -------------------------------------------------------
    u256 maxSingleTxLimit = ether(5000);
    Address superPaymasterAddr;
    Address governance;
    TokenId gtoken{"GTK"};
    u256 sbtMintFloor = ether(1);

    // Test hook for the adversarial suite: disables the auto-approved
    // destination firewall so the threat check can demonstrate a catch.
    bool firewallEnabled = true;

    void attachTracer(StorageTracer* t) { tracer_ = t; }

    // -- views ---------------------------------------------------------------

    u256 balance(const TokenId& token, const Address& holder) const {
        auto it = balances_.find({token.symbol, holder});
        return it == balances_.end() ? u256{0} : it->second;
    }

    u256 totalSupply(const TokenId& token) const {
        auto it = totalSupply_.find(token.symbol);
        return it == totalSupply_.end() ? u256{0} : it->second;
    }

    u256 totalBurned(const TokenId& token) const {
        auto it = totalBurned_.find(token.symbol);
        return it == totalBurned_.end() ? u256{0} : it->second;
    }

    bool isAutoApproved(const TokenId& token, const Address& spender) const {
        auto it = autoApproved_.find(token.symbol);
        return it != autoApproved_.end() && it->second.contains(spender);
    }

    // Virtual allowance: auto-approved spenders see 2^256-1; it is computed,
    // never stored, so removing a spender falls back to the stored value.
    u256 allowance(const TokenId& token, const Address& owner, const Address& spender) const {
        traceRead(tokenAddress(token), "autoApproved[" + spender.hex() + "]");
        if (isAutoApproved(token, spender)) return U256_MAX;
        traceRead(tokenAddress(token), allowanceSlot(owner, spender));
        auto it = allowances_.find({token.symbol, owner, spender});
        return it == allowances_.end() ? u256{0} : it->second;
    }

    const SbtRecord* sbtOf(const Address& owner) const {
        auto it = sbtRecords_.find(owner);
        return it == sbtRecords_.end() ? nullptr : &it->second;
    }

    size_t sbtCount() const { return sbtRecords_.size(); }

    const std::map<Address, SbtRecord>& sbtRecords() const { return sbtRecords_; }

    // Conservation: per token, the sum of balances over all holders equals
    // totalSupply (burns decrease both sides).
    bool conservationHolds() const {
        std::map<std::string, bigint> sums;
        for (const auto& [key, amount] : balances_) sums[key.first] += bigint(amount);
        for (const auto& [sym, supply] : totalSupply_)
            if (sums[sym] != bigint(supply)) return false;
        for (const auto& [sym, sum] : sums)
            if (sum != bigint(totalSupply(TokenId{sym}))) return false;
        return true;
    }

    // -- mutations ------------------------------------------------------------

    // Setup plumbing: mints never fail except on overflow.
    void mint(const TokenId& token, const Address& to, const u256& amount) {
        traceWrite(tokenAddress(token), balanceSlot(to));
        balances_[{token.symbol, to}] += amount;
        totalSupply_[token.symbol] += amount;
    }

    Status burn(const TokenId& token, const Address& from, const u256& amount) {
        u256 bal = balance(token, from);
        if (bal < amount) return fail(Err::InsufficientBalance, "burn of " + token.symbol);
        traceWrite(tokenAddress(token), balanceSlot(from));
        balances_[{token.symbol, from}] = bal - amount;
        totalSupply_[token.symbol] -= amount;
        totalBurned_[token.symbol] += amount;
        return okStatus();
    }

    Status transfer(const TokenId& token, const Address& from, const Address& to, const u256& amount) {
        if (to.isZero()) return fail(Err::ZeroAddressDestination);
        traceRead(tokenAddress(token), balanceSlot(from));
        u256 fromBal = balance(token, from);
        if (fromBal < amount) return fail(Err::InsufficientBalance, token.symbol + " transfer");
        traceWrite(tokenAddress(token), balanceSlot(from));
        traceWrite(tokenAddress(token), balanceSlot(to));
        balances_[{token.symbol, from}] = fromBal - amount;
        balances_[{token.symbol, to}] += amount;
        return okStatus();
    }

    Status approve(const TokenId& token, const Address& owner, const Address& spender, const u256& amount) {
        traceWrite(tokenAddress(token), allowanceSlot(owner, spender));
        allowances_[{token.symbol, owner, spender}] = amount;
        return okStatus();
    }

    // Auto-approved callers skip allowances but hit the destination firewall
    // and the per-transaction cap; everyone else takes the standard
    // allowance-decrementing path.
    Status transferFrom(const TokenId& token, const Address& caller, const Address& from, const Address& to,
                        const u256& amount) {
        if (to.isZero()) return fail(Err::ZeroAddressDestination);
        traceRead(tokenAddress(token), "autoApproved[" + caller.hex() + "]");
        if (isAutoApproved(token, caller)) {
            if (firewallEnabled && !(to == caller || to == superPaymasterAddr))
                return fail(Err::UnauthorizedDestination,
                            token.symbol + ": unauthorized destination " + to.hex());
            if (amount > maxSingleTxLimit) return fail(Err::ExceedsCap, token.symbol + ": exceeds cap");
            return moveBalance(token, from, to, amount);
        }
        traceRead(tokenAddress(token), allowanceSlot(from, caller));
        auto it = allowances_.find({token.symbol, from, caller});
        u256 allowed = it == allowances_.end() ? u256{0} : it->second;
        if (allowed < amount) return fail(Err::InsufficientAllowance);
        Status moved = moveBalance(token, from, to, amount);
        if (!moved.ok()) return moved;
        traceWrite(tokenAddress(token), allowanceSlot(from, caller));
        allowances_[{token.symbol, from, caller}] = allowed - amount;
        return okStatus();
    }

    // Burn-to-mint gas-card issuance. One record per owner, ever.
    Outcome<SbtRecord> mintSbt(const Address& minter, const u256& burnAmount, u64 nowBlock) {
        if (sbtRecords_.contains(minter)) return fail(Err::AlreadyHoldsSbt, minter.hex());
        if (balance(gtoken, minter) < burnAmount) return fail(Err::InsufficientGToken);
        if (burnAmount < sbtMintFloor) return fail(Err::BurnBelowFloor);
        Status burned = burn(gtoken, minter, burnAmount);
        if (!burned.ok()) return burned.failure();
        SbtRecord rec;
        rec.owner = minter;
        rec.mintedAtBlock = nowBlock;
        rec.gtokenBurned = burnAmount;
        traceWrite(derivedAddress("contract/mysbt"), "sbt[" + minter.hex() + "]");
        sbtRecords_.emplace(minter, rec);
        return rec;
    }

    Status associateSbtCommunity(const Address& owner, const Address& communityOperator) {
        auto it = sbtRecords_.find(owner);
        if (it == sbtRecords_.end()) return fail(Err::NoSbtRecord, owner.hex());
        it->second.communityAssociations.insert(communityOperator);
        return okStatus();
    }

    // Governance-gated change to the trusted spender set.
    Status setAutoApproved(const Address& caller, const TokenId& token, const Address& spender, bool enabled) {
        if (caller != governance) return fail(Err::NotGovernance, caller.hex());
        traceWrite(tokenAddress(token), "autoApproved[" + spender.hex() + "]");
        if (enabled)
            autoApproved_[token.symbol].insert(spender);
        else
            autoApproved_[token.symbol].erase(spender);
        return okStatus();
    }

private:
    Status moveBalance(const TokenId& token, const Address& from, const Address& to, const u256& amount) {
        traceRead(tokenAddress(token), balanceSlot(from));
        u256 fromBal = balance(token, from);
        if (fromBal < amount) return fail(Err::InsufficientBalance, token.symbol);
        traceWrite(tokenAddress(token), balanceSlot(from));
        traceWrite(tokenAddress(token), balanceSlot(to));
        balances_[{token.symbol, from}] = fromBal - amount;
        balances_[{token.symbol, to}] += amount;
        return okStatus();
    }

    static std::string balanceSlot(const Address& a) { return "balances[" + a.hex() + "]"; }
    static std::string allowanceSlot(const Address& o, const Address& s) {
        return "allowances[" + o.hex() + "][" + s.hex() + "]";
    }

    void traceRead(const Address& contract, std::string slot) const {
        if (tracer_) tracer_->onRead(contract, std::move(slot));
    }
    void traceWrite(const Address& contract, std::string slot) const {
        if (tracer_) tracer_->onWrite(contract, std::move(slot));
    }

    std::map<std::pair<std::string, Address>, u256> balances_;
    std::map<std::tuple<std::string, Address, Address>, u256> allowances_;
    std::map<std::string, std::set<Address>> autoApproved_;
    std::map<std::string, u256> totalSupply_;
    std::map<std::string, u256> totalBurned_;
    std::map<Address, SbtRecord> sbtRecords_;
    StorageTracer* tracer_ = nullptr;
};

} // namespace aasim
