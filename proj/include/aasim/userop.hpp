// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "aasim/common.hpp"

namespace aasim {

enum class ActionKind { Noop, Erc20Transfer };

struct Action {
    ActionKind kind = ActionKind::Noop;
    TokenId token;
    Address to;
    u256 amount{0};
};

using Signature = std::array<std::uint8_t, 32>;

// ERC-4337-style operation envelope. paymasterData layout: bytes [0, 20) bind
// the operator (AOA kinds); an optional 32-byte suffix carries a POA signature
// override. The hash covers the operator-binding prefix and excludes the
// signature suffix, mirroring how verifying paymasters pack paymasterAndData.
struct UserOperation {
    Address sender;
    u256 nonce{0};
    Action action;
    Address paymaster;
    std::vector<std::uint8_t> paymasterData;
    Signature accountSignature{};
    u256 maxCost{0};
    Digest32 userOpHash{};
};

inline Digest32 computeUserOpHash(const UserOperation& op) {
    ByteWriter w;
    w.str("userop.v1");
    w.address(op.sender);
    w.amount(op.nonce);
    w.u8(static_cast<std::uint8_t>(op.action.kind));
    w.str(op.action.token.symbol);
    w.address(op.action.to);
    w.amount(op.action.amount);
    w.address(op.paymaster);
    size_t staticLen = op.paymasterData.size() < 20 ? op.paymasterData.size() : size_t{20};
    w.u64le(staticLen);
    w.raw(std::span<const std::uint8_t>(op.paymasterData.data(), staticLen));
    w.amount(op.maxCost);
    return w.digest();
}

inline void bindOperator(UserOperation& op, const Address& operatorAddr) {
    op.paymasterData.assign(operatorAddr.bytes.begin(), operatorAddr.bytes.end());
}

inline std::optional<Address> boundOperator(const UserOperation& op) {
    if (op.paymasterData.size() < 20) return std::nullopt;
    Address a;
    std::copy_n(op.paymasterData.begin(), 20, a.bytes.begin());
    return a;
}

inline void setSignatureOverride(UserOperation& op, const Signature& sig) {
    op.paymasterData.resize(20 + sig.size());
    std::copy(sig.begin(), sig.end(), op.paymasterData.begin() + 20);
}

inline std::optional<Signature> signatureOverride(const UserOperation& op) {
    if (op.paymasterData.size() < 20 + 32) return std::nullopt;
    Signature s;
    std::copy_n(op.paymasterData.begin() + 20, 32, s.begin());
    return s;
}

} // namespace aasim
