#include "warpcheck/report.hpp"

#include <algorithm>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "warpcheck/manifest.hpp"

namespace warpcheck {
namespace {

using json = nlohmann::ordered_json;

json line_json(const CheckLine& l) {
    json j;
    j["name"] = l.name;
    j["role"] = to_string(l.role);
    if (l.text.empty()) {
        j["value"] = l.value;
    } else {
        j["text"] = l.text;
    }
    if (!l.criterion.empty()) {
        j["criterion"] = l.criterion;
        j["passed"] = l.passed;
    }
    if (l.skipped) j["skipped"] = true;
    if (!l.note.empty()) j["note"] = l.note;
    return j;
}

std::string fmt(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.6g", v);
    return b;
}

}  // namespace

std::string report_json(const RunMeta& meta, const std::vector<CheckResult>& checks) {
    json j;
    j["schema"] = kReportSchema;
    j["engine_version"] = kEngineVersion;
    j["manifest"] = meta.manifest;
    j["plan"] = {{"count", meta.plan.count},
                 {"seed", meta.plan.seed},
                 {"margin", meta.plan.margin}};
    j["diff"] = meta.diff;
    j["tolerances"] = {{"algebraic", meta.tol.algebraic},
                       {"lie_agreement", meta.tol.lie_agreement},
                       {"exact", meta.tol.exact},
                       {"curvature", meta.tol.curvature},
                       {"fit", meta.tol.fit},
                       {"mixed_ricci", meta.tol.mixed_ricci},
                       {"soliton_reject", meta.tol.soliton_reject},
                       {"steady_eps", meta.tol.steady_eps}};

    json arr = json::array();
    int npass = 0, nfail = 0, ndisc = 0, nerror = 0;
    for (const CheckResult& r : checks) {
        json c;
        c["id"] = r.id;
        c["kind"] = r.kind;
        c["target"] = r.target;
        c["samples"] = r.samples;
        c["status"] = to_string(r.status);
        c["paper_discrepancy"] = r.paper_discrepancy;
        if (!r.error.empty()) c["error"] = r.error;
        json lines = json::array();
        for (const CheckLine& l : r.lines) lines.push_back(line_json(l));
        c["lines"] = std::move(lines);
        arr.push_back(std::move(c));
        switch (r.status) {
            case CheckStatus::pass: ++npass; break;
            case CheckStatus::fail: ++nfail; break;
            case CheckStatus::discrepancy: ++ndisc; break;
            case CheckStatus::error: ++nerror; break;
        }
    }
    j["checks"] = std::move(arr);
    j["summary"] = {{"pass", npass},
                    {"fail", nfail},
                    {"discrepancy", ndisc},
                    {"error", nerror},
                    {"exit_code", exit_status(checks)}};
    return j.dump(2) + "\n";
}

std::string report_table(const std::vector<CheckResult>& checks) {
    std::string out;
    char buf[256];
    for (const CheckResult& r : checks) {
        std::string head = r.kind;
        if (r.paper_discrepancy) head += "  [paper-discrepancy]";
        std::snprintf(buf, sizeof buf, "%-28s %-24s %-11s %d samples\n", r.id.c_str(),
                      head.c_str(), to_string(r.status), r.samples);
        out += buf;
        if (!r.error.empty()) {
            out += "    error: " + r.error + "\n";
            continue;
        }
        for (const CheckLine& l : r.lines) {
            const char* role = l.role == LineRole::hypothesis ? "hyp "
                               : l.role == LineRole::conclusion ? "conc"
                                                                : "info";
            const std::string value = l.text.empty() ? fmt(l.value) : l.text;
            std::string verdict;
            if (l.skipped) {
                verdict = "skipped";
            } else if (!l.criterion.empty()) {
                verdict = l.passed ? "ok" : "FAIL";
            }
            std::snprintf(buf, sizeof buf, "    [%s] %-28s %-13s %-22s %s\n", role,
                          l.name.c_str(), value.c_str(), l.criterion.c_str(), verdict.c_str());
            out += buf;
            if (!l.note.empty()) out += "           note: " + l.note + "\n";
        }
    }
    int npass = 0, nfail = 0, ndisc = 0, nerror = 0;
    for (const CheckResult& r : checks) {
        switch (r.status) {
            case CheckStatus::pass: ++npass; break;
            case CheckStatus::fail: ++nfail; break;
            case CheckStatus::discrepancy: ++ndisc; break;
            case CheckStatus::error: ++nerror; break;
        }
    }
    std::snprintf(buf, sizeof buf, "summary: %d pass, %d fail, %d discrepancy, %d error\n", npass,
                  nfail, ndisc, nerror);
    out += buf;
    return out;
}

}  // namespace warpcheck
