// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "aasim/common.hpp"

namespace aasim {

// Zero-fee constant-product pool backing the DEX-routed baseline. Just enough
// model to exhibit price impact and InsufficientLiquidity.
struct ConstantProductPool {
    TokenId token;
    u256 tokenReserve{0};
    u256 ethReserve{0};
    bool oracleAvailable = true;
    Address oracleAddr = derivedAddress("contract/dex-oracle");

    // Token input required for an exact ETH output, rounded against the taker:
    // in = ceil(tokenReserve * out / (ethReserve - out)).
    Outcome<u256> quoteTokenInForEthOut(const u256& ethOut) const {
        if (ethOut >= ethReserve)
            return fail(Err::InsufficientLiquidity, "pool eth reserve below requested output");
        if (ethOut == 0) return u256{0};
        u256 remaining = ethReserve - ethOut;
        return mulDivCeil(tokenReserve, ethOut, remaining);
    }

    Outcome<u256> swapTokenForExactEth(const u256& ethOut) {
        auto quote = quoteTokenInForEthOut(ethOut);
        if (!quote.ok()) return quote;
        tokenReserve += quote.value();
        ethReserve -= ethOut;
        return quote;
    }
};

} // namespace aasim
