// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "aasim/common.hpp"
#include "aasim/ledger.hpp"
#include "aasim/trace.hpp"

#include <algorithm>
#include <map>
#include <vector>

namespace aasim {

struct PaymasterInstance; // defined in paymaster.hpp

struct OperatorConfig {
    Address operatorAddr;
    std::vector<TokenId> supportedTokens;
    Ratio exchangeRate;        // xPNTs base units per 1 aPNTs base unit
    u256 perCardSpendingCap;   // base units per rate window
    u64 rateLimitWindow = 1;   // simulated blocks
    u256 depositBalance;       // simulated ETH, base units

    bool valid() const {
        return exchangeRate.positive() && rateLimitWindow >= 1 && !supportedTokens.empty();
    }
};

enum class PriceSource { PrimaryOracle, DvtFallback };

struct PriceCache {
    Ratio ethPerApnts;
    u64 updatedAtBlock = 0;
    PriceSource source = PriceSource::PrimaryOracle;
};

struct KeeperReport {
    Address keeper;
    Ratio reportedPrice;
    u64 atBlock = 0;
};

// Community/operator configuration hub and the only authorized writer of the
// paymasters' self-storage mirrors (sbtHolders, cachedPrice). Mirror writes
// happen outside any EntryPoint validation phase.
class Registry {
public:
    Address addr = derivedAddress("contract/registry");
    u64 stalenessThresholdBlocks = 300;
    u64 dvtFreshnessBlocks = 50;
    size_t dvtQuorum = 3;

    void attachTracer(StorageTracer* t) { tracer_ = t; }

    Status registerOperator(const OperatorConfig& config) {
        if (operators_.contains(config.operatorAddr))
            return fail(Err::DuplicateOperator, config.operatorAddr.hex());
        if (!config.valid()) return fail(Err::InvalidConfig);
        traceWrite("operators[" + config.operatorAddr.hex() + "]");
        operators_.emplace(config.operatorAddr, config);
        return okStatus();
    }

    const OperatorConfig* findOperator(const Address& op) const {
        auto it = operators_.find(op);
        return it == operators_.end() ? nullptr : &it->second;
    }

    const std::map<Address, OperatorConfig>& operators() const { return operators_; }

    // Primary path: accept the oracle feed only while fresh; stale feeds are a
    // signal to fall back to the DVT path, never a cache corruption.
    Outcome<PriceCache> updatePrice(const Ratio& feedPrice, u64 feedAgeBlocks, u64 nowBlock) {
        if (!feedPrice.positive()) return fail(Err::NonPositivePrice);
        if (feedAgeBlocks > stalenessThresholdBlocks)
            return fail(Err::StaleFeed, "feed age " + std::to_string(feedAgeBlocks));
        writeCache(PriceCache{feedPrice, nowBlock, PriceSource::PrimaryOracle});
        return cache_;
    }

    // Fallback path: quorum of keeper reports aggregated by median, so that a
    // minority of manipulated reports cannot move the cached price past the
    // honest order statistics.
    Outcome<PriceCache> updatePriceDVT(const std::vector<KeeperReport>& reports, u64 nowBlock) {
        std::vector<Address> seen;
        for (const auto& r : reports) {
            if (!r.reportedPrice.positive()) return fail(Err::NonPositivePrice, r.keeper.hex());
            if (std::find(seen.begin(), seen.end(), r.keeper) != seen.end())
                return fail(Err::DuplicateKeeper, r.keeper.hex());
            seen.push_back(r.keeper);
            u64 age = nowBlock >= r.atBlock ? nowBlock - r.atBlock : 0;
            if (age > dvtFreshnessBlocks)
                return fail(Err::StaleReports, r.keeper.hex() + " at block " + std::to_string(r.atBlock));
        }
        if (reports.size() < dvtQuorum)
            return fail(Err::QuorumNotMet, std::to_string(reports.size()) + " of " + std::to_string(dvtQuorum));
        writeCache(PriceCache{medianPrice(reports), nowBlock, PriceSource::DvtFallback});
        return cache_;
    }

    static Ratio medianPrice(std::vector<KeeperReport> reports) {
        std::sort(reports.begin(), reports.end(),
                  [](const KeeperReport& a, const KeeperReport& b) { return a.reportedPrice < b.reportedPrice; });
        size_t n = reports.size();
        if (n % 2 == 1) return reports[n / 2].reportedPrice;
        // even count: exact rational midpoint of the two middle reports
        const Ratio& lo = reports[n / 2 - 1].reportedPrice;
        const Ratio& hi = reports[n / 2].reportedPrice;
        bigint num = bigint(lo.num) * bigint(hi.den) + bigint(hi.num) * bigint(lo.den);
        bigint den = bigint(2) * bigint(lo.den) * bigint(hi.den);
        bigint g = boost::multiprecision::gcd(num, den);
        return Ratio{fitU256(num / g, "median"), fitU256(den / g, "median")};
    }

    const PriceCache& cache() const { return cache_; }

    // Declared here, defined with PaymasterInstance in paymaster.hpp.
    Status updateSBTStatus(const Address& registryCaller, PaymasterInstance& pm, const TokenLedger& ledger,
                           const Address& holder, bool eligible) const;
    Status pushPriceTo(const Address& registryCaller, PaymasterInstance& pm) const;

private:
    void writeCache(PriceCache next) {
        // updatedAtBlock never decreases
        if (next.updatedAtBlock < cache_.updatedAtBlock) next.updatedAtBlock = cache_.updatedAtBlock;
        traceWrite("priceCache");
        cache_ = next;
    }

    void traceWrite(std::string slot) const {
        if (tracer_) tracer_->onWrite(addr, std::move(slot));
    }

    std::map<Address, OperatorConfig> operators_;
    PriceCache cache_;
    StorageTracer* tracer_ = nullptr;
};

} // namespace aasim
