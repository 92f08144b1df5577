#include "qprep_cli/commands.hpp"

#include <fstream>
#include <future>
#include <iomanip>
#include <map>
#include <ostream>
#include <regex>
#include <sstream>

#include "json.hpp"
#include "qprep_cli/config.hpp"

namespace qprep::cli {
namespace {

using nlohmann::json;

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotPowerOfTwo:
        case ErrorCode::ProbabilityNotNormalized:
        case ErrorCode::EtaConstraintViolated:
        case ErrorCode::EtaOutOfRange:
        case ErrorCode::InvalidArgument:
        case ErrorCode::DomainTooLarge:
            return kExitValidation;
        case ErrorCode::IoError:
            return kExitIo;
        default:
            return kExitInternal;
    }
}

// Runs body and maps escaping exceptions to exit codes with a message on err.
template <class Body>
int guarded(std::ostream& err, Body&& body) {
    try {
        return body();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
}

std::filesystem::path base_dir_of(const std::filesystem::path& config_path) {
    return config_path.has_parent_path() ? config_path.parent_path() : std::filesystem::path(".");
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    auto out = open_output(path);
    out << text;
    if (!out.flush()) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::string summary_line(const RunReport& report) {
    int holds = 0;
    int not_applicable = 0;
    std::vector<std::string> violated;
    for (const auto& c : report.all_checks()) {
        switch (c.status) {
            case BoundStatus::Holds: ++holds; break;
            case BoundStatus::NotApplicable: ++not_applicable; break;
            case BoundStatus::Violated: violated.push_back(c.name); break;
        }
    }
    std::ostringstream os;
    if (violated.empty()) {
        os << "PASS " << holds << " bounds hold, " << not_applicable << " not applicable";
    } else {
        os << "FAIL " << violated.size() << " violated:";
        for (const auto& name : violated) os << ' ' << name;
    }
    return os.str();
}

struct SweepRange {
    std::string param;
    int lo = 0;
    int hi = 0;
};

SweepRange parse_vary(const std::string& vary) {
    static const std::regex pattern(R"(^(a|tprime)=(\d+)\.\.(\d+)$)");
    std::smatch m;
    if (!std::regex_match(vary, m, pattern)) {
        throw Error(ErrorCode::InvalidArgument,
                    "--vary must look like a=8..16 or tprime=1..6, got `" + vary + "`");
    }
    SweepRange range{m[1].str(), std::stoi(m[2].str()), std::stoi(m[3].str())};
    if (range.lo > range.hi) throw Error(ErrorCode::InvalidArgument, "empty sweep range");
    return range;
}

struct SweepRow {
    int value = 0;
    double fid_total = 0.0;
    double bound_total = 0.0;
    double p_fail = 0.0;
    double bound_p_fail = 0.0;
    std::uint64_t oracle_calls = 0;
    double budget_bound = 0.0;
};

SweepRow sweep_point(InstanceConfig config, const SweepRange& range, int value,
                     const std::filesystem::path& base_dir) {
    if (range.param == "a") {
        config.aux_qubits = value;
    } else {
        config.phase_bits = value;
    }
    const RunReport report = run_report(to_run_config(config, base_dir));
    const auto budget = oracle_call_budget(report.artifacts.plan, report.config.spec.phase_bits);
    return {value,
            report.bounds.fid_total,
            report.bounds.bound_total,
            report.bounds.p_fail,
            report.bounds.bound_p_fail,
            budget.calls,
            budget.bound};
}

}  // namespace

int cmd_plan(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig run = to_run_config(load_config(config_path), base_dir_of(config_path));
        const OraclePack pack = count_classes(run.spec, run.max_amplitudes);
        out << plan_to_json(compute_schedule(pack, run.spec, run.schedule)) << '\n';
        return kExitOk;
    });
}

int cmd_run(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
            std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig run = to_run_config(load_config(config_path), base_dir_of(config_path));
        const RunReport report = run_report(run);

        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        if (ec) throw Error(ErrorCode::IoError, "cannot create " + out_dir.string() + ": " + ec.message());
        write_text(out_dir / "report.json", run_report_to_json(report) + "\n");
        {
            auto csv = open_output(out_dir / "amplitudes.csv");
            write_amplitudes_csv(csv, report.artifacts.psi_tilde);
            if (!csv.flush()) throw Error(ErrorCode::IoError, "write failed for amplitudes.csv");
        }
        out << summary_line(report) << '\n';
        return report.any_violated() ? kExitBoundViolated : kExitOk;
    });
}

int cmd_verify(const std::filesystem::path& report_path, std::ostream& out, std::ostream& err) {
    return guarded(err, [&]() -> int {
        std::ifstream in(report_path);
        if (!in) throw Error(ErrorCode::IoError, "cannot open " + report_path.string());
        json doc;
        try {
            doc = json::parse(in);
        } catch (const json::parse_error& e) {
            throw Error(ErrorCode::InvalidArgument, std::string("report is not valid JSON: ") + e.what());
        }
        if (!doc.contains("checks") || !doc["checks"].is_array()) {
            throw Error(ErrorCode::InvalidArgument, "report has no `checks` array");
        }

        const std::map<std::string, Relation> relations = {{"<", Relation::Less},
                                                           {"<=", Relation::LessEqual},
                                                           {">", Relation::Greater},
                                                           {">=", Relation::GreaterEqual}};
        int holds = 0, violated = 0, not_applicable = 0, inconsistent = 0;
        for (const auto& c : doc["checks"]) {
            const auto name = c.at("name").get<std::string>();
            const auto status = c.at("status").get<std::string>();
            if (status == "not_applicable") {
                ++not_applicable;
                continue;
            }
            const auto rel = relations.find(c.at("relation").get<std::string>());
            if (rel == relations.end() || !c.at("measured").is_number() ||
                !c.at("bound").is_number()) {
                err << "check " << name << ": unreadable entry\n";
                ++inconsistent;
                continue;
            }
            const bool ok = relation_holds(rel->second, c["measured"].get<double>(),
                                           c["bound"].get<double>());
            if (std::string(to_string(ok ? BoundStatus::Holds : BoundStatus::Violated)) != status) {
                err << "check " << name << ": recorded " << status << " but re-evaluates to "
                    << (ok ? "holds" : "violated") << '\n';
                ++inconsistent;
            }
            ok ? ++holds : ++violated;
            if (!ok) out << "violated: " << name << '\n';
        }
        const std::string verdict = violated == 0 ? "PASS" : "FAIL";
        if (doc.value("verdict", verdict) != verdict) {
            err << "recorded verdict disagrees with the checks\n";
            ++inconsistent;
        }
        out << verdict << ' ' << holds << " hold, " << violated << " violated, " << not_applicable
            << " not applicable\n";
        if (inconsistent > 0) return kExitInternal;
        return violated > 0 ? kExitBoundViolated : kExitOk;
    });
}

int cmd_sweep(const std::filesystem::path& config_path, const std::string& vary,
              const std::filesystem::path& out_csv, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const SweepRange range = parse_vary(vary);
        const InstanceConfig base = load_config(config_path);
        const auto base_dir = base_dir_of(config_path);

        std::vector<std::future<SweepRow>> points;
        for (int v = range.lo; v <= range.hi; ++v) {
            points.push_back(std::async(std::launch::async, sweep_point, base, range, v, base_dir));
        }
        std::vector<SweepRow> rows;
        for (auto& p : points) rows.push_back(p.get());

        auto csv = open_output(out_csv);
        csv << std::setprecision(17);
        csv << range.param << ",fid_total,bound_total,p_fail,bound_p_fail,oracle_calls,budget_bound\n";
        int below_bound = 0;
        for (const auto& r : rows) {
            csv << r.value << ',' << r.fid_total << ',' << r.bound_total << ',' << r.p_fail << ','
                << r.bound_p_fail << ',' << r.oracle_calls << ',' << r.budget_bound << '\n';
            if (r.bound_total > 0.0 && !(r.fid_total > r.bound_total)) {
                err << range.param << '=' << r.value << ": fid_total " << r.fid_total
                    << " not above bound_total " << r.bound_total << '\n';
                ++below_bound;
            }
        }
        if (!csv.flush()) throw Error(ErrorCode::IoError, "write failed for " + out_csv.string());
        out << rows.size() << " points written to " << out_csv.string() << '\n';
        return below_bound > 0 ? kExitBoundViolated : kExitOk;
    });
}

}  // namespace qprep::cli
