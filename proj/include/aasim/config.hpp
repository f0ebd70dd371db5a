// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "aasim/campaign.hpp"
#include "aasim/scenario.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <string>

namespace aasim::config {

using nlohmann::json;

// Scenario files are JSON; every field is optional and falls back to the
// embedded defaults, so a config can override just what an experiment needs.
// Amounts are decimal strings (base units), addresses are 40-digit hex.

inline Outcome<u256> parseAmount(const json& j, const char* what) {
    try {
        if (j.is_string()) return u256(j.get<std::string>());
        if (j.is_number_unsigned()) return u256(j.get<u64>());
    } catch (const std::exception& e) {
        return fail(Err::ConfigParseError, std::string(what) + ": " + e.what());
    }
    return fail(Err::ConfigParseError, std::string(what) + ": expected amount string");
}

inline Outcome<Address> parseAddress(const json& j, const char* what) {
    if (!j.is_string()) return fail(Err::ConfigParseError, std::string(what) + ": expected hex address string");
    auto a = Address::fromHex(j.get<std::string>());
    if (!a) return fail(Err::ConfigParseError, std::string(what) + ": bad address " + j.get<std::string>());
    return *a;
}

inline Outcome<Ratio> parseRatio(const json& j, const char* what) {
    if (!j.is_object()) return fail(Err::ConfigParseError, std::string(what) + ": expected {num, den}");
    auto num = parseAmount(j.value("num", json("1")), what);
    if (!num.ok()) return num.failure();
    auto den = parseAmount(j.value("den", json("1")), what);
    if (!den.ok()) return den.failure();
    Ratio r{num.value(), den.value()};
    if (!r.positive()) return fail(Err::ConfigParseError, std::string(what) + ": ratio must be positive");
    return r;
}

#define AASIM_TRY(var, expr)                                                                                      \
    auto var##_out = (expr);                                                                                      \
    if (!var##_out.ok()) return var##_out.failure();                                                              \
    auto var = std::move(var##_out).value();

inline Outcome<ScenarioSpec> scenarioFromJson(const json& j) {
    ScenarioSpec spec;
    if (!j.is_object()) return fail(Err::ConfigParseError, "top level must be an object");
    spec.name = j.value("name", spec.name);
    spec.seed = j.value("seed", spec.seed);

    if (j.contains("chain")) {
        const json& c = j.at("chain");
        if (c.contains("gasPriceWei")) {
            AASIM_TRY(v, parseAmount(c.at("gasPriceWei"), "chain.gasPriceWei"));
            spec.gasPriceWei = v;
        }
        if (c.contains("protocolHardCapWei")) {
            AASIM_TRY(v, parseAmount(c.at("protocolHardCapWei"), "chain.protocolHardCapWei"));
            spec.protocolHardCapWei = v;
        }
        if (c.contains("maxSingleTxLimit")) {
            AASIM_TRY(v, parseAmount(c.at("maxSingleTxLimit"), "chain.maxSingleTxLimit"));
            spec.maxSingleTxLimit = v;
        }
        if (c.contains("sbtMintFloor")) {
            AASIM_TRY(v, parseAmount(c.at("sbtMintFloor"), "chain.sbtMintFloor"));
            spec.sbtMintFloor = v;
        }
        spec.stalenessThresholdBlocks = c.value("stalenessThresholdBlocks", spec.stalenessThresholdBlocks);
        spec.dvtFreshnessBlocks = c.value("dvtFreshnessBlocks", spec.dvtFreshnessBlocks);
        spec.dvtQuorum = c.value("dvtQuorum", spec.dvtQuorum);
        spec.startBlock = c.value("startBlock", spec.startBlock);
        if (c.contains("priceEthPerApnts")) {
            AASIM_TRY(v, parseRatio(c.at("priceEthPerApnts"), "chain.priceEthPerApnts"));
            spec.priceEthPerApnts = v;
        }
        if (c.contains("feeToken")) spec.feeToken = TokenId{c.at("feeToken").get<std::string>()};
        if (c.contains("pool")) {
            const json& p = c.at("pool");
            if (p.contains("tokenReserve")) {
                AASIM_TRY(v, parseAmount(p.at("tokenReserve"), "pool.tokenReserve"));
                spec.poolTokenReserve = v;
            }
            if (p.contains("ethReserve")) {
                AASIM_TRY(v, parseAmount(p.at("ethReserve"), "pool.ethReserve"));
                spec.poolEthReserve = v;
            }
        }
        if (c.contains("operators")) {
            spec.operators.clear();
            for (const auto& o : c.at("operators")) {
                OperatorSetup op;
                if (o.contains("address")) {
                    AASIM_TRY(a, parseAddress(o.at("address"), "operator.address"));
                    op.addr = a;
                }
                if (o.contains("gasToken")) op.gasToken = TokenId{o.at("gasToken").get<std::string>()};
                if (o.contains("exchangeRate")) {
                    AASIM_TRY(r, parseRatio(o.at("exchangeRate"), "operator.exchangeRate"));
                    op.exchangeRate = r;
                }
                if (o.contains("perCardSpendingCap")) {
                    AASIM_TRY(v, parseAmount(o.at("perCardSpendingCap"), "operator.perCardSpendingCap"));
                    op.perCardSpendingCap = v;
                }
                op.rateLimitWindow = o.value("rateLimitWindowBlocks", op.rateLimitWindow);
                if (o.contains("depositEth")) {
                    AASIM_TRY(v, parseAmount(o.at("depositEth"), "operator.depositEth"));
                    op.depositBalance = v;
                }
                if (o.contains("apnts")) {
                    AASIM_TRY(v, parseAmount(o.at("apnts"), "operator.apnts"));
                    op.apntsBalance = v;
                }
                spec.operators.push_back(op);
            }
        }
        if (c.contains("users")) {
            spec.users.clear();
            for (const auto& u : c.at("users")) {
                UserSetup user;
                if (u.contains("address")) {
                    AASIM_TRY(a, parseAddress(u.at("address"), "user.address"));
                    user.addr = a;
                }
                if (u.contains("gtoken")) {
                    AASIM_TRY(v, parseAmount(u.at("gtoken"), "user.gtoken"));
                    user.gtokenBalance = v;
                }
                if (u.contains("gasToken")) {
                    AASIM_TRY(v, parseAmount(u.at("gasToken"), "user.gasToken"));
                    user.gasTokenBalance = v;
                }
                if (u.contains("feeToken")) {
                    AASIM_TRY(v, parseAmount(u.at("feeToken"), "user.feeToken"));
                    user.feeTokenBalance = v;
                }
                if (u.contains("payload")) {
                    AASIM_TRY(v, parseAmount(u.at("payload"), "user.payload"));
                    user.payloadBalance = v;
                }
                user.holdsSbt = u.value("sbt", user.holdsSbt);
                spec.users.push_back(user);
            }
        }
    }

    if (j.contains("faults")) {
        const json& f = j.at("faults");
        if (f.contains("signerOfflineAtBlock") && !f.at("signerOfflineAtBlock").is_null())
            spec.faults.signerOfflineAtBlock = f.at("signerOfflineAtBlock").get<u64>();
        if (f.contains("blacklist"))
            for (const auto& b : f.at("blacklist")) {
                AASIM_TRY(a, parseAddress(b, "faults.blacklist"));
                spec.faults.blacklistSenders.push_back(a);
            }
        spec.faults.blacklistAtBlock = f.value("blacklistAtBlock", spec.faults.blacklistAtBlock);
        if (f.contains("priceFeedStaleAtBlock") && !f.at("priceFeedStaleAtBlock").is_null())
            spec.faults.priceFeedStaleAtBlock = f.at("priceFeedStaleAtBlock").get<u64>();
        if (f.contains("dvtRecoveryAtBlock") && !f.at("dvtRecoveryAtBlock").is_null())
            spec.faults.dvtRecoveryAtBlock = f.at("dvtRecoveryAtBlock").get<u64>();
        spec.faults.dvtRecoveryKeepers = f.value("dvtRecoveryKeepers", spec.faults.dvtRecoveryKeepers);
    }

    if (j.contains("workload")) {
        const json& w = j.at("workload");
        spec.workload.opsPerSystem = w.value("opsPerSystem", spec.workload.opsPerSystem);
        if (w.contains("action")) {
            std::string a = w.at("action").get<std::string>();
            if (a == "noop")
                spec.workload.action = ActionKind::Noop;
            else if (a == "erc20Transfer")
                spec.workload.action = ActionKind::Erc20Transfer;
            else
                return fail(Err::ConfigParseError, "workload.action: unknown action " + a);
        }
        if (w.contains("payloadToken")) spec.workload.payloadToken = TokenId{w.at("payloadToken").get<std::string>()};
        if (w.contains("transferAmount")) {
            AASIM_TRY(v, parseAmount(w.at("transferAmount"), "workload.transferAmount"));
            spec.workload.transferAmount = v;
        }
        if (w.contains("maxCostWei")) {
            AASIM_TRY(v, parseAmount(w.at("maxCostWei"), "workload.maxCostWei"));
            spec.workload.maxCostWei = v;
        }
        spec.workload.userCount = w.value("userCount", spec.workload.userCount);
    }

    if (j.contains("systems")) {
        spec.systems.clear();
        for (const auto& s : j.at("systems")) {
            auto k = systemFromName(s.get<std::string>());
            if (!k) return fail(Err::ConfigParseError, "systems: unknown system " + s.get<std::string>());
            spec.systems.push_back(*k);
        }
    }

    if (j.contains("gas")) {
        const json& g = j.at("gas");
        if (g.contains("mode")) {
            std::string m = g.at("mode").get<std::string>();
            if (m == "calibrated")
                spec.gasMode = GasMode::Calibrated;
            else if (m == "micro")
                spec.gasMode = GasMode::Micro;
            else
                return fail(Err::ConfigParseError, "gas.mode: unknown mode " + m);
        }
        spec.noise = g.value("noise", spec.noise);
    }

    if (spec.operators.empty()) return fail(Err::ScenarioInvalid, "at least one operator required");
    for (const auto& op : spec.operators)
        if (!op.exchangeRate.positive()) return fail(Err::ScenarioInvalid, "operator exchange rate must be > 0");
    if (spec.workload.userCount == 0 && spec.users.empty())
        return fail(Err::ScenarioInvalid, "scenario needs at least one user");
    return spec;
}

inline Outcome<AdversarialSpec> adversarialFromJson(const json& j, const ScenarioSpec& base) {
    AdversarialSpec adv;
    adv.base = base;
    if (j.contains("adversarial")) {
        const json& a = j.at("adversarial");
        adv.adversariesEnabled = a.value("enabled", adv.adversariesEnabled);
        adv.replayCopies = a.value("replayCopies", adv.replayCopies);
        adv.drainOps = a.value("drainOps", adv.drainOps);
        adv.directPostOpAttempts = a.value("directPostOpAttempts", adv.directPostOpAttempts);
        adv.sybilMints = a.value("sybilMints", adv.sybilMints);
        adv.firewallAttempts = a.value("firewallAttempts", adv.firewallAttempts);
        adv.disableFirewall = a.value("disableFirewall", adv.disableFirewall);
    }
    return adv;
}

inline Outcome<json> loadJsonFile(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) return fail(Err::ConfigParseError, "cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        return fail(Err::ConfigParseError, path.string() + ": " + e.what());
    }
    return j;
}

inline Outcome<ScenarioSpec> loadScenario(const std::filesystem::path& path) {
    auto j = loadJsonFile(path);
    if (!j.ok()) return j.failure();
    return scenarioFromJson(j.value());
}

#undef AASIM_TRY

} // namespace aasim::config
