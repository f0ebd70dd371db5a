// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "aasim/common.hpp"
#include "aasim/userop.hpp"

#include <set>

namespace aasim {

// Abstract signature scheme: a keyed digest that is unforgeable within the
// simulation because secrets never leave the holder. Verification cost comes
// from the gas tables, not from real cryptography.

struct KeyHandle {
    u64 secret = 0;
};

inline Signature signDigest(const KeyHandle& key, const Digest32& message) {
    ByteWriter w;
    w.str("sig.v1");
    w.u64le(key.secret);
    w.raw(message.bytes);
    return w.digest().bytes;
}

inline bool verifyDigest(const KeyHandle& key, const Digest32& message, const Signature& sig) {
    return signDigest(key, message) == sig;
}

// Off-chain signing service used by the process-oriented paymasters. One
// signature per request; when the service is offline or the sender is
// blacklisted, no signature exists and the operation cannot validate.
struct SignerService {
    bool online = true;
    std::set<Address> blacklist;
    KeyHandle signingKey{0x5157'4f4b'2d41'5049ULL};

    Outcome<Signature> requestSignature(const Digest32& userOpHash, const Address& sender) const {
        if (!online) return fail(Err::SignerOffline);
        if (blacklist.contains(sender)) return fail(Err::SenderBlacklisted, sender.hex());
        return signDigest(signingKey, userOpHash);
    }
};

} // namespace aasim
