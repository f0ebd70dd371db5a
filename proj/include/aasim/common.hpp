// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace aasim {

using u64 = std::uint64_t;

// Exact unsigned 256-bit amounts. The checked backend throws on overflow and
// on subtraction below zero, so arithmetic never wraps silently.
using u256 = boost::multiprecision::checked_uint256_t;
using bigint = boost::multiprecision::cpp_int;

inline const u256 U256_MAX = (std::numeric_limits<u256>::max)();

// 10^18 base units per whole token.
inline u256 ether(u64 whole) {
    u256 unit{"1000000000000000000"};
    return u256(whole) * unit;
}

// -----------------------------------------------------------------------------
// Address: opaque 20-byte identifier rendered as 40 hex digits.
// -----------------------------------------------------------------------------

struct Address {
    std::array<std::uint8_t, 20> bytes{};

    constexpr auto operator<=>(const Address&) const = default;

    bool isZero() const {
        for (auto b : bytes)
            if (b != 0) return false;
        return true;
    }

    std::string hex() const {
        static const char* digits = "0123456789abcdef";
        std::string out = "0x";
        out.reserve(42);
        for (auto b : bytes) {
            out.push_back(digits[b >> 4]);
            out.push_back(digits[b & 0xf]);
        }
        return out;
    }

    static Address zero() { return Address{}; }

    static std::optional<Address> fromHex(std::string_view s) {
        if (s.starts_with("0x") || s.starts_with("0X")) s.remove_prefix(2);
        if (s.size() != 40) return std::nullopt;
        Address a;
        for (size_t i = 0; i < 20; ++i) {
            auto nib = [](char c) -> int {
                if (c >= '0' && c <= '9') return c - '0';
                if (c >= 'a' && c <= 'f') return c - 'a' + 10;
                if (c >= 'A' && c <= 'F') return c - 'A' + 10;
                return -1;
            };
            int hi = nib(s[2 * i]), lo = nib(s[2 * i + 1]);
            if (hi < 0 || lo < 0) return std::nullopt;
            a.bytes[i] = static_cast<std::uint8_t>((hi << 4) | lo);
        }
        return a;
    }
};

// -----------------------------------------------------------------------------
// Token handle. Tokens are identified by symbol; the derived pseudo-address is
// used for storage-trace attribution.
// -----------------------------------------------------------------------------

struct TokenId {
    std::string symbol;

    auto operator<=>(const TokenId&) const = default;
    bool empty() const { return symbol.empty(); }
};

// -----------------------------------------------------------------------------
// 256-bit digests. Not cryptographic: a deterministic multi-lane mixer that is
// unforgeable within the simulation (keys never leave the chain driver).
// -----------------------------------------------------------------------------

struct Digest32 {
    std::array<std::uint8_t, 32> bytes{};

    constexpr auto operator<=>(const Digest32&) const = default;

    std::string hex() const {
        static const char* digits = "0123456789abcdef";
        std::string out;
        out.reserve(64);
        for (auto b : bytes) {
            out.push_back(digits[b >> 4]);
            out.push_back(digits[b & 0xf]);
        }
        return out;
    }
};

namespace detail {

inline u64 splitmix64(u64 x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace detail

inline Digest32 hashBytes(std::span<const std::uint8_t> data) {
    // Four FNV-style lanes with distinct offsets and multipliers; every lane
    // absorbs every byte, then an avalanche pass decorrelates them.
    static constexpr u64 MULT[4] = {0x100000001b3ULL, 0x9e3779b97f4a7c15ULL, 0xff51afd7ed558ccdULL,
                                    0xc4ceb9fe1a85ec53ULL};
    u64 lane[4];
    for (int i = 0; i < 4; ++i)
        lane[i] = 0xcbf29ce484222325ULL ^ detail::splitmix64(0x1000 + i);
    for (auto b : data) {
        for (int i = 0; i < 4; ++i) {
            lane[i] ^= b;
            lane[i] *= MULT[i];
        }
    }
    for (int i = 0; i < 4; ++i)
        lane[i] = detail::splitmix64(lane[i] ^ (u64(data.size()) << 1) ^ u64(i));
    Digest32 d;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 8; ++j)
            d.bytes[8 * i + j] = static_cast<std::uint8_t>(lane[i] >> (8 * j));
    return d;
}

// Append-only byte buffer for canonical serialization before hashing.
class ByteWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u64le(u64 v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void amount(const u256& v) {
        // 32 bytes little-endian
        bigint x = bigint(v);
        for (int i = 0; i < 32; ++i) {
            buf_.push_back(static_cast<std::uint8_t>(x & 0xff));
            x >>= 8;
        }
    }
    void address(const Address& a) { buf_.insert(buf_.end(), a.bytes.begin(), a.bytes.end()); }
    void str(std::string_view s) {
        u64le(s.size());
        buf_.insert(buf_.end(), s.begin(), s.end());
    }
    void raw(std::span<const std::uint8_t> s) { buf_.insert(buf_.end(), s.begin(), s.end()); }

    std::span<const std::uint8_t> view() const { return buf_; }
    Digest32 digest() const { return hashBytes(buf_); }

private:
    std::vector<std::uint8_t> buf_;
};

// Deterministic pseudo-address derived from a label (token contracts, actors
// created by scenario configs, etc.).
inline Address derivedAddress(std::string_view tag) {
    ByteWriter w;
    w.str("addr:");
    w.str(tag);
    Digest32 d = w.digest();
    Address a;
    std::memcpy(a.bytes.data(), d.bytes.data(), 20);
    return a;
}

inline Address tokenAddress(const TokenId& t) { return derivedAddress("token/" + t.symbol); }

// -----------------------------------------------------------------------------
// Positive rationals for prices and exchange rates. Conversions round in the
// paymaster's favor (up) via mulDivCeil.
// -----------------------------------------------------------------------------

struct Ratio {
    u256 num{1};
    u256 den{1};

    bool positive() const { return num > 0 && den > 0; }
    double toDouble() const { return num.convert_to<double>() / den.convert_to<double>(); }

    friend bool operator==(const Ratio& a, const Ratio& b) {
        return bigint(a.num) * bigint(b.den) == bigint(b.num) * bigint(a.den);
    }
    friend bool operator<(const Ratio& a, const Ratio& b) {
        return bigint(a.num) * bigint(b.den) < bigint(b.num) * bigint(a.den);
    }
};

inline u256 fitU256(const bigint& x, const char* what) {
    if (x < 0 || x > bigint(U256_MAX)) throw std::overflow_error(std::string("u256 overflow in ") + what);
    return x.convert_to<u256>();
}

inline u256 mulDivCeil(const u256& x, const u256& num, const u256& den) {
    if (den == 0) throw std::domain_error("mulDivCeil: zero denominator");
    bigint w = bigint(x) * bigint(num);
    bigint q = (w + bigint(den) - 1) / bigint(den);
    return fitU256(q, "mulDivCeil");
}

inline u256 mulDivFloor(const u256& x, const u256& num, const u256& den) {
    if (den == 0) throw std::domain_error("mulDivFloor: zero denominator");
    bigint w = (bigint(x) * bigint(num)) / bigint(den);
    return fitU256(w, "mulDivFloor");
}

// -----------------------------------------------------------------------------
// Domain errors. Rejections are ordinary data in this simulator (they get
// tallied and reported), so operations return Outcome instead of throwing.
// -----------------------------------------------------------------------------

enum class Err {
    // ledger
    InsufficientBalance,
    ZeroAddressDestination,
    UnauthorizedDestination,
    ExceedsCap,
    InsufficientAllowance,
    AlreadyHoldsSbt,
    InsufficientGToken,
    BurnBelowFloor,
    NotGovernance,
    // registry
    DuplicateOperator,
    InvalidConfig,
    NotRegistry,
    NoSbtRecord,
    StaleFeed,
    NonPositivePrice,
    QuorumNotMet,
    DuplicateKeeper,
    StaleReports,
    // paymasters
    NoSbt,
    UnknownOperator,
    RateLimited,
    InsufficientGasToken,
    StalePrice,
    SignerOffline,
    SenderBlacklisted,
    BadSignature,
    NoAllowance,
    InsufficientLiquidity,
    OracleUnavailable,
    NotEntryPoint,
    HashMismatch,
    CostExceedsCap,
    FirewallViolation,
    // entrypoint
    InvalidAccountSig,
    NonceReplay,
    PaymasterRejected,
    ExecutionFailed,
    PostOpFailed,
    // gas model
    UnknownComponent,
    UnknownStack,
    InvalidShare,
    // stats
    EmptySample,
    DegenerateSample,
    // cli
    ConfigParseError,
    ScenarioInvalid,
    IoError,
};

inline std::string_view errName(Err e) {
    switch (e) {
        case Err::InsufficientBalance: return "InsufficientBalance";
        case Err::ZeroAddressDestination: return "ZeroAddressDestination";
        case Err::UnauthorizedDestination: return "UnauthorizedDestination";
        case Err::ExceedsCap: return "ExceedsCap";
        case Err::InsufficientAllowance: return "InsufficientAllowance";
        case Err::AlreadyHoldsSbt: return "AlreadyHoldsSbt";
        case Err::InsufficientGToken: return "InsufficientGToken";
        case Err::BurnBelowFloor: return "BurnBelowFloor";
        case Err::NotGovernance: return "NotGovernance";
        case Err::DuplicateOperator: return "DuplicateOperator";
        case Err::InvalidConfig: return "InvalidConfig";
        case Err::NotRegistry: return "NotRegistry";
        case Err::NoSbtRecord: return "NoSbtRecord";
        case Err::StaleFeed: return "StaleFeed";
        case Err::NonPositivePrice: return "NonPositivePrice";
        case Err::QuorumNotMet: return "QuorumNotMet";
        case Err::DuplicateKeeper: return "DuplicateKeeper";
        case Err::StaleReports: return "StaleReports";
        case Err::NoSbt: return "NoSbt";
        case Err::UnknownOperator: return "UnknownOperator";
        case Err::RateLimited: return "RateLimited";
        case Err::InsufficientGasToken: return "InsufficientGasToken";
        case Err::StalePrice: return "StalePrice";
        case Err::SignerOffline: return "SignerOffline";
        case Err::SenderBlacklisted: return "SenderBlacklisted";
        case Err::BadSignature: return "BadSignature";
        case Err::NoAllowance: return "NoAllowance";
        case Err::InsufficientLiquidity: return "InsufficientLiquidity";
        case Err::OracleUnavailable: return "OracleUnavailable";
        case Err::NotEntryPoint: return "NotEntryPoint";
        case Err::HashMismatch: return "HashMismatch";
        case Err::CostExceedsCap: return "CostExceedsCap";
        case Err::FirewallViolation: return "FirewallViolation";
        case Err::InvalidAccountSig: return "InvalidAccountSig";
        case Err::NonceReplay: return "NonceReplay";
        case Err::PaymasterRejected: return "PaymasterRejected";
        case Err::ExecutionFailed: return "ExecutionFailed";
        case Err::PostOpFailed: return "PostOpFailed";
        case Err::UnknownComponent: return "UnknownComponent";
        case Err::UnknownStack: return "UnknownStack";
        case Err::InvalidShare: return "InvalidShare";
        case Err::EmptySample: return "EmptySample";
        case Err::DegenerateSample: return "DegenerateSample";
        case Err::ConfigParseError: return "ConfigParseError";
        case Err::ScenarioInvalid: return "ScenarioInvalid";
        case Err::IoError: return "IoError";
    }
    return "Unknown";
}

struct Failure {
    Err code;
    std::string detail;

    std::string describe() const {
        std::string s{errName(code)};
        if (!detail.empty()) {
            s += ": ";
            s += detail;
        }
        return s;
    }
};

inline Failure fail(Err code, std::string detail = {}) { return Failure{code, std::move(detail)}; }

template <typename T>
class [[nodiscard]] Outcome {
public:
    Outcome(T value) : data_(std::move(value)) {}
    Outcome(Failure f) : data_(std::move(f)) {}

    bool ok() const { return std::holds_alternative<T>(data_); }
    explicit operator bool() const { return ok(); }

    const T& value() const& { return std::get<T>(data_); }
    T& value() & { return std::get<T>(data_); }
    T&& value() && { return std::get<T>(std::move(data_)); }

    const Failure& failure() const { return std::get<Failure>(data_); }
    Err error() const { return failure().code; }

private:
    std::variant<T, Failure> data_;
};

struct Unit {};
using Status = Outcome<Unit>;

inline Status okStatus() { return Status(Unit{}); }

// -----------------------------------------------------------------------------
// Shared enums.
// -----------------------------------------------------------------------------

enum class PaymasterKind { AoaSuper, AoaV4, PoaVerifying, PoaDexErc20 };

inline std::string_view kindName(PaymasterKind k) {
    switch (k) {
        case PaymasterKind::AoaSuper: return "AoaSuper";
        case PaymasterKind::AoaV4: return "AoaV4";
        case PaymasterKind::PoaVerifying: return "PoaVerifying";
        case PaymasterKind::PoaDexErc20: return "PoaDexErc20";
    }
    return "Unknown";
}

inline bool isAoa(PaymasterKind k) { return k == PaymasterKind::AoaSuper || k == PaymasterKind::AoaV4; }

// Campaign systems: the four paymaster stacks plus the EOA direct-transfer
// baseline that bypasses the EntryPoint entirely.
enum class SystemKind { EoaDirect, AoaV4, AoaSuper, PoaVerifying, PoaDexErc20 };

inline std::string_view systemName(SystemKind s) {
    switch (s) {
        case SystemKind::EoaDirect: return "EoaDirect";
        case SystemKind::AoaV4: return "AoaV4";
        case SystemKind::AoaSuper: return "AoaSuper";
        case SystemKind::PoaVerifying: return "PoaVerifying";
        case SystemKind::PoaDexErc20: return "PoaDexErc20";
    }
    return "Unknown";
}

inline std::optional<SystemKind> systemFromName(std::string_view s) {
    if (s == "EoaDirect") return SystemKind::EoaDirect;
    if (s == "AoaV4") return SystemKind::AoaV4;
    if (s == "AoaSuper") return SystemKind::AoaSuper;
    if (s == "PoaVerifying") return SystemKind::PoaVerifying;
    if (s == "PoaDexErc20") return SystemKind::PoaDexErc20;
    return std::nullopt;
}

inline std::optional<PaymasterKind> paymasterKindOf(SystemKind s) {
    switch (s) {
        case SystemKind::EoaDirect: return std::nullopt;
        case SystemKind::AoaV4: return PaymasterKind::AoaV4;
        case SystemKind::AoaSuper: return PaymasterKind::AoaSuper;
        case SystemKind::PoaVerifying: return PaymasterKind::PoaVerifying;
        case SystemKind::PoaDexErc20: return PaymasterKind::PoaDexErc20;
    }
    return std::nullopt;
}

} // namespace aasim
