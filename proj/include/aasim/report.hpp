// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "aasim/campaign.hpp"
#include "aasim/goms.hpp"
#include "aasim/stats.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace aasim::report {

// Locale-independent number formatting. CSV cells use a period decimal
// separator and no grouping; the text report groups thousands like the
// reference tables.

inline std::string fmtDouble(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 3);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, ptr);
}

inline std::string grouped(u64 v) {
    std::string digits = std::to_string(v);
    std::string out;
    int count = 0;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
        if (count != 0 && count % 3 == 0) out.push_back(',');
        out.push_back(*it);
        ++count;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

inline std::string groupedDouble(double v) { return grouped(static_cast<u64>(std::llround(v))); }

inline Status atomicWrite(const std::filesystem::path& path, const std::string& content) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) return fail(Err::IoError, "cannot open " + tmp.string());
        out << content;
        if (!out) return fail(Err::IoError, "write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) return fail(Err::IoError, "rename failed for " + path.string());
    return okStatus();
}

// -----------------------------------------------------------------------------
// CSV emission. Fixed column order; every receipt is re-validated against the
// receipt identity at write time.
// -----------------------------------------------------------------------------

inline const char* RECEIPTS_HEADER =
    "system,opIndex,txGasUsed,pvg,actualGasUsed,l1FeeShare,"
    "accountValidation,paymasterValidation,execution,entryPointOverhead,postOpSwap\n";

struct CsvBundle {
    std::string receipts;
    std::string exclusions;
    bool identitiesHold = true;
};

inline CsvBundle receiptsCsv(const CampaignResult& campaign) {
    CsvBundle out;
    std::ostringstream recs, excl;
    recs << RECEIPTS_HEADER;
    excl << "system,opIndex,reason\n";
    for (const auto& run : campaign.runs) {
        for (const auto& rec : run.records) {
            if (!rec.accepted) {
                excl << systemName(run.system) << ',' << rec.opIndex << ',' << rec.exclusionReason << '\n';
                continue;
            }
            const GasReceipt& r = rec.receipt;
            if (!r.identityHolds()) out.identitiesHold = false;
            recs << systemName(run.system) << ',' << rec.opIndex << ',' << r.txGasUsed << ',' << r.pvg << ','
                 << r.actualGasUsed << ',' << fmtDouble(r.l1FeeShare) << ','
                 << r.component(GasComponent::AccountValidation) << ','
                 << r.component(GasComponent::PaymasterValidation) << ',' << r.component(GasComponent::Execution)
                 << ',' << r.component(GasComponent::EntryPointOverhead) << ','
                 << r.component(GasComponent::PostOpSwap) << '\n';
        }
    }
    out.receipts = recs.str();
    out.exclusions = excl.str();
    return out;
}

inline std::string summaryCsv(const stats::SummaryTable& table) {
    std::ostringstream out;
    out << "system,n,txMean,txCi95Lo,txCi95Hi,txSigma,txMedian,txSkewness,txExcessKurtosis,"
           "actualMean,actualCi95Lo,actualCi95Hi\n";
    for (const auto& row : table.rows) {
        out << row.system << ',' << row.txGas.n << ',' << fmtDouble(row.txGas.mean) << ','
            << fmtDouble(row.txGas.ci95.first) << ',' << fmtDouble(row.txGas.ci95.second) << ','
            << fmtDouble(row.txGas.sigma) << ',' << fmtDouble(row.txGas.median) << ','
            << (row.txGas.skewness ? fmtDouble(*row.txGas.skewness) : std::string("undefined")) << ','
            << (row.txGas.excessKurtosis ? fmtDouble(*row.txGas.excessKurtosis) : std::string("undefined")) << ','
            << fmtDouble(row.actualGas.mean) << ',' << fmtDouble(row.actualGas.ci95.first) << ','
            << fmtDouble(row.actualGas.ci95.second) << '\n';
    }
    return out.str();
}

inline std::string deltasCsv(const stats::SummaryTable& table) {
    std::ostringstream out;
    out << "first,second,delta,magnitude\n";
    for (const auto& cell : table.deltas)
        out << cell.first << ',' << cell.second << ',' << fmtDouble(cell.result.delta) << ','
            << stats::magnitudeName(cell.result.magnitude) << '\n';
    return out.str();
}

// -----------------------------------------------------------------------------
// Text report mirroring the reference table layout: per-system execution gas
// with bootstrap CIs, then the billed-gas decomposition, then the delta matrix.
// -----------------------------------------------------------------------------

inline std::string textReport(const stats::SummaryTable& table) {
    std::ostringstream out;
    out << "L2 execution gas (txGasUsed) per system\n";
    out << "----------------------------------------\n";
    for (const auto& row : table.rows) {
        double hw = (row.txGas.ci95.second - row.txGas.ci95.first) / 2.0;
        out << "  " << row.system << "  n=" << row.txGas.n << "  txGasUsed " << groupedDouble(row.txGas.mean)
            << " +/- " << fmtDouble(hw) << "  sigma " << fmtDouble(row.txGas.sigma) << '\n';
    }
    out << '\n';
    out << "Gas decomposition (actualGasUsed = txGasUsed + PVG)\n";
    out << "---------------------------------------------------\n";
    for (const auto& row : table.rows) {
        double pvg = row.actualGas.mean - row.txGas.mean;
        out << "  " << row.system << "  billed " << groupedDouble(row.actualGas.mean) << "  execution "
            << groupedDouble(row.txGas.mean) << "  pvg " << groupedDouble(pvg) << '\n';
    }
    out << '\n';
    out << "Pairwise Cliff's delta over txGasUsed (positive: first system lower)\n";
    out << "---------------------------------------------------------------------\n";
    for (const auto& cell : table.deltas)
        out << "  delta(" << cell.first << ", " << cell.second << ") = " << fmtDouble(cell.result.delta) << " ("
            << stats::magnitudeName(cell.result.magnitude) << ")\n";
    return out.str();
}

inline std::string gomsReport() {
    std::ostringstream out;
    out << "GOMS operator counts per workflow model\n";
    out << "---------------------------------------\n";
    for (const auto& model : goms::standardWorkflows()) {
        auto c = goms::gomsCount(model);
        out << "  " << goms::workflowName(model.label) << ": " << c.m << "M + " << c.p << "P + " << c.w
            << "W = " << c.total << " operators\n";
    }
    auto aoa = goms::gomsCount(goms::standardWorkflow(goms::WorkflowLabel::AoaSteadyState));
    auto poa = goms::gomsCount(goms::standardWorkflow(goms::WorkflowLabel::PoaSteadyState));
    auto eoa = goms::gomsCount(goms::standardWorkflow(goms::WorkflowLabel::EoaRecovery));
    out << '\n';
    out << "Steady-state per-transaction reductions\n";
    out << "  vs PoaSteadyState: " << goms::reductionPercent(aoa.total, poa.total) << "%\n";
    out << "  vs EoaRecovery:    " << goms::reductionPercent(aoa.total, eoa.total) << "%\n";
    return out.str();
}

} // namespace aasim::report
