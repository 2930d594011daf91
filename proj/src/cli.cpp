// Copyright 2025 the mmc authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mmc/cli.hpp"

#include <chrono>
#include <iostream>
#include <map>
#include <set>

#include <CLI11.hpp>

#include "mmc/io.hpp"

namespace mmc {

namespace {

constexpr int kExitPass = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitCapacity = 3;

struct CommonArgs {
    std::string market_path;
    std::string out_path;
    bool allow_large = false;
    bool timings = false;
    std::uint64_t profile_cap = 1'000'000;
    std::size_t set_cap = 12;
    std::size_t seq_cap = 8;
    std::int64_t sample = -1;
    std::uint64_t seed = 0;

    Caps caps() const {
        Caps c;
        c.set_cap = set_cap;
        c.seq_cap = seq_cap;
        c.profile_cap = profile_cap;
        c.allow_large = allow_large;
        return c;
    }
    ScanOptions scan() const {
        ScanOptions options;
        options.caps = caps();
        if (sample >= 0)
            options.sample = SampleSpec{static_cast<std::size_t>(sample), seed};
        return options;
    }
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_market = true) {
    if (with_market)
        cmd->add_option("--market", args.market_path, "market file (JSON)")->required();
    cmd->add_option("--out", args.out_path, "write the report here instead of stdout");
    cmd->add_flag("--allow-large", args.allow_large, "lift the enumeration caps");
    cmd->add_flag("--timings", args.timings, "include wall-clock timings in the report");
    cmd->add_option("--profile-cap", args.profile_cap, "profile-product cap");
    cmd->add_option("--set-cap", args.set_cap, "per-college cap for set axioms");
    cmd->add_option("--seq-cap", args.seq_cap, "per-college cap for sequence axioms");
}

void add_sampling(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--sample", args.sample, "check this many sampled profiles instead");
    cmd->add_option("--seed", args.seed, "sampling seed");
}

Json input_entry(const std::string& role, const std::string& path) {
    return Json{{"role", role}, {"path", path}, {"digest", file_digest(path)}};
}

void emit(const CommonArgs& args, Json report, std::ostream& out,
          std::chrono::steady_clock::time_point started) {
    if (args.timings) {
        auto elapsed = std::chrono::steady_clock::now() - started;
        report["timing_ms"] =
            std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
    }
    std::string text = report.dump(2) + "\n";
    if (args.out_path.empty())
        out << text;
    else
        write_file(args.out_path, text);
}

std::vector<AuditReport> run_audits(const Market& market, const std::string& check,
                                    const Caps& caps) {
    std::vector<std::pair<std::string, AuditReport (*)(const ChoiceFunction&, const TermOrder&,
                                                       const Caps&)>>
        checks = {{"irc", check_irc},
                  {"subs", check_substitutes},
                  {"lad", check_lad},
                  {"obs-subs", check_observable_substitutes},
                  {"obs-lad", check_observable_lad},
                  {"monotone", check_monotone_choice},
                  {"demand-inv", check_demand_invariance}};
    bool known = check == "all";
    for (const auto& [name, fn] : checks)
        known = known || check == name;
    if (!known)
        throw ValidationError("unknown check '" + check +
                              "' (irc|subs|lad|obs-subs|obs-lad|monotone|demand-inv|all)");
    std::vector<AuditReport> reports;
    for (const auto& college : market.colleges()) {
        for (const auto& [name, fn] : checks) {
            if (check != "all" && check != name)
                continue;
            reports.push_back(fn(market.choice_of(college), market.order(), caps));
        }
    }
    return reports;
}

int replay_report(const Json& report, std::ostream& err);

} // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"many-to-one matching with contracts under monotone student preferences"};
    app.require_subcommand(1);

    CommonArgs common;
    std::string prefs_path, against_path, check = "all", report_path;
    bool group = false, verify = false;
    std::size_t max_coalition = 1;

    auto* cmd_run_da = app.add_subcommand("run-da", "run deferred acceptance and print the trace");
    add_common(cmd_run_da, common);
    cmd_run_da->add_option("--prefs", prefs_path, "preference file (JSON)")->required();

    auto* cmd_audit = app.add_subcommand("audit", "audit choice-function axioms");
    add_common(cmd_audit, common);
    cmd_audit->add_option("--check", check,
                          "irc|subs|lad|obs-subs|obs-lad|monotone|demand-inv|all");

    auto* cmd_virtualize =
        app.add_subcommand("virtualize", "replace every college by its virtual choice function");
    add_common(cmd_virtualize, common);

    auto* cmd_equiv = app.add_subcommand("equiv", "check deferred-acceptance equivalence");
    add_common(cmd_equiv, common);
    cmd_equiv->add_option("--against", against_path, "second market file")->required();
    add_sampling(cmd_equiv, common);

    auto* cmd_da_stable =
        app.add_subcommand("da-stable", "check stability of deferred acceptance on every profile");
    add_common(cmd_da_stable, common);
    add_sampling(cmd_da_stable, common);

    auto* cmd_sp = app.add_subcommand("sp", "verify (group) strategy-proofness by brute force");
    add_common(cmd_sp, common);
    cmd_sp->add_flag("--group", group, "scan coalitions");
    cmd_sp->add_option("--max-coalition", max_coalition, "largest coalition size");
    add_sampling(cmd_sp, common);

    auto* cmd_classify =
        app.add_subcommand("classify", "domain membership: observable substitutes + observable "
                                       "aggregate-demand monotonicity");
    add_common(cmd_classify, common);
    cmd_classify->add_flag("--verify", verify,
                           "also discharge equivalence and stability exhaustively");
    add_sampling(cmd_classify, common);

    auto* cmd_embed = app.add_subcommand("embed", "embed into a Kelso-Crawford economy");
    add_common(cmd_embed, common);
    cmd_embed->add_option("--prefs", prefs_path, "preference file (JSON)")->required();

    auto* cmd_rural = app.add_subcommand("rural", "matched students and per-college counts "
                                                  "across all stable allocations");
    add_common(cmd_rural, common);
    cmd_rural->add_option("--prefs", prefs_path, "preference file (JSON)")->required();

    auto* cmd_replay = app.add_subcommand("replay", "re-run the witness of a failed report");
    add_common(cmd_replay, common, false);
    cmd_replay->add_option("--report", report_path, "report file (JSON)")->required();

    std::vector<char*> argv;
    std::vector<std::string> storage = args;
    storage.insert(storage.begin(), "mmc");
    argv.reserve(storage.size());
    for (auto& s : storage)
        argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help
            out << app.help();
            return kExitPass;
        }
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    const auto started = std::chrono::steady_clock::now();
    try {
        if (cmd_replay->parsed()) {
            Json report;
            try {
                report = Json::parse(read_file(report_path));
            } catch (const Json::exception& e) {
                throw ValidationError(report_path + ": " + e.what());
            }
            return replay_report(report, err);
        }

        Market market = load_market(common.market_path);
        Json report;
        report["inputs"] = Json::array({input_entry("market", common.market_path)});
        int exit_code = kExitPass;

        if (cmd_run_da->parsed()) {
            auto profile = load_profile(prefs_path, market);
            report["inputs"].push_back(input_entry("prefs", prefs_path));
            report["command"] = "run-da";
            report["trace"] = da_trace_to_json(run_da(market, profile));
        } else if (cmd_audit->parsed()) {
            report["command"] = "audit";
            report["check"] = check;
            Json list = Json::array();
            bool all_pass = true;
            for (const auto& r : run_audits(market, check, common.caps())) {
                all_pass = all_pass && r.pass;
                list.push_back(audit_report_to_json(r));
            }
            report["reports"] = std::move(list);
            report["pass"] = all_pass;
            exit_code = all_pass ? kExitPass : kExitViolation;
        } else if (cmd_virtualize->parsed()) {
            report["command"] = "virtualize";
            Market virtual_market = virtualize(market, common.caps());
            report["market"] = market_to_json(virtual_market, common.caps());
        } else if (cmd_equiv->parsed()) {
            Market against = load_market(against_path);
            report["inputs"].push_back(input_entry("against", against_path));
            report["command"] = "equiv";
            auto r = check_da_equivalence(market, against, common.scan());
            if (common.sample >= 0)
                report["seed"] = common.seed;
            report["result"] = equivalence_report_to_json(r);
            exit_code = r.equivalent ? kExitPass : kExitViolation;
        } else if (cmd_da_stable->parsed()) {
            report["command"] = "da-stable";
            auto r = check_da_stability(market, common.scan());
            if (common.sample >= 0)
                report["seed"] = common.seed;
            report["result"] = da_stability_report_to_json(r);
            exit_code = r.pass ? kExitPass : kExitViolation;
        } else if (cmd_sp->parsed()) {
            report["command"] = "sp";
            if (!group)
                max_coalition = 1;
            auto r = check_group_strategy_proofness(market, max_coalition, common.scan());
            if (common.sample >= 0)
                report["seed"] = common.seed;
            report["result"] = sp_report_to_json(r);
            exit_code = r.pass ? kExitPass : kExitViolation;
        } else if (cmd_classify->parsed()) {
            report["command"] = "classify";
            auto r = classify_profile(market, verify, common.scan());
            report["result"] = membership_report_to_json(r);
            exit_code = r.member ? kExitPass : kExitViolation;
        } else if (cmd_embed->parsed()) {
            auto profile = load_profile(prefs_path, market);
            report["inputs"].push_back(input_entry("prefs", prefs_path));
            report["command"] = "embed";
            Market virtual_market = virtualize(market, common.caps());
            auto [economy, iso] = build_kc_economy(virtual_market, profile, common.caps());
            auto r = verify_isomorphism(virtual_market, profile, economy, iso);
            report["economy"] = economy_to_json(economy);
            report["isomorphism"] = isomorphism_to_json(iso);
            report["result"] = isomorphism_report_to_json(r);
            exit_code = r.pass ? kExitPass : kExitViolation;
        } else if (cmd_rural->parsed()) {
            auto profile = load_profile(prefs_path, market);
            report["inputs"].push_back(input_entry("prefs", prefs_path));
            report["command"] = "rural";
            auto r = check_rural_hospitals(market, profile, common.caps());
            report["result"] = rural_hospitals_report_to_json(r);
            exit_code = r.pass ? kExitPass : kExitViolation;
        }

        report["exit"] = exit_code;
        emit(common, std::move(report), out, started);
        return exit_code;
    } catch (const CapacityError& e) {
        err << "capacity error: " << e.what() << "\n";
        return kExitCapacity;
    } catch (const AmbiguityError& e) {
        err << "ambiguity: " << e.what() << "\n";
        return kExitViolation;
    } catch (const RationalizationError& e) {
        err << "rationalization error: " << e.what() << "\n";
        return kExitViolation;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Json::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

namespace {

// exit 0 when the recorded witness still reproduces its violation
int replay_report(const Json& report, std::ostream& err) {
    if (!report.contains("command") || !report.contains("inputs"))
        throw ValidationError("replay: report is missing command or inputs");
    const std::string command = report.at("command").get<std::string>();

    std::string market_path, prefs_path, against_path;
    for (const auto& input : report.at("inputs")) {
        const std::string role = input.at("role").get<std::string>();
        const std::string path = input.at("path").get<std::string>();
        if (file_digest(path) != input.at("digest").get<std::string>())
            throw ValidationError("replay: '" + path + "' changed since the report was written");
        if (role == "market")
            market_path = path;
        else if (role == "prefs")
            prefs_path = path;
        else if (role == "against")
            against_path = path;
    }
    if (market_path.empty())
        throw ValidationError("replay: report has no market input");
    Market market = load_market(market_path);

    if (command == "audit") {
        bool any = false, all = true;
        for (const auto& entry : report.at("reports")) {
            if (entry.at("pass").get<bool>())
                continue;
            any = true;
            auto witness = audit_witness_from_json(entry.at("witness"));
            const auto& cf = market.choice_of(entry.at("college").get<std::string>());
            all = all && replay_witness(cf, witness, market.order());
        }
        if (!any)
            throw ValidationError("replay: nothing to replay, every audit passed");
        return all ? kExitPass : kExitViolation;
    }
    if (command == "da-stable") {
        const auto& witness = report.at("result").at("witness");
        auto profile = parse_profile(witness.at("profile"), market);
        auto trace = run_da(market, profile);
        if (contracts_to_json(trace.outcome) != witness.at("outcome"))
            return kExitViolation;
        return stability_verdict(trace.outcome, market, profile).stable() ? kExitViolation
                                                                          : kExitPass;
    }
    if (command == "equiv") {
        Market against = load_market(against_path);
        const auto& witness = report.at("result").at("witness");
        auto profile = parse_profile(witness.at("profile"), market);
        auto a = run_da(market, profile).outcome;
        auto b = run_da(against, profile).outcome;
        return a != b ? kExitPass : kExitViolation;
    }
    if (command == "sp") {
        const auto& witness = report.at("result").at("witness");
        ManipulationWitness w;
        w.coalition = witness.at("coalition").get<std::vector<std::string>>();
        w.truthful_profile = parse_profile(witness.at("truthful_profile"), market);
        w.manipulated_profile = parse_profile(witness.at("manipulated_profile"), market);
        w.truthful_outcome = contracts_from_json(witness.at("truthful_outcome"));
        w.manipulated_outcome = contracts_from_json(witness.at("manipulated_outcome"));
        return replay_manipulation(market, w) ? kExitPass : kExitViolation;
    }
    if (command == "rural") {
        auto profile = load_profile(prefs_path, market);
        const auto& witness = report.at("result").at("witness");
        auto first = contracts_from_json(witness.at("first"));
        auto second = contracts_from_json(witness.at("second"));
        if (!stability_verdict(first, market, profile).stable() ||
            !stability_verdict(second, market, profile).stable())
            return kExitViolation;
        std::multiset<std::string> sa, sb;
        for (const auto& c : first)
            sa.insert(c.student);
        for (const auto& c : second)
            sb.insert(c.student);
        std::map<std::string, int> ca, cb;
        for (const auto& c : first)
            ++ca[c.college];
        for (const auto& c : second)
            ++cb[c.college];
        return (sa != sb || ca != cb) ? kExitPass : kExitViolation;
    }
    err << "replay: command '" << command << "' has no replayable witness\n";
    return kExitUsage;
}

} // namespace

} // namespace mmc
