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

#include "mmc/io.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

namespace mmc {

Contract parse_contract_id(const std::string& id) {
    auto first = id.find(':');
    auto second = first == std::string::npos ? std::string::npos : id.find(':', first + 1);
    if (first == std::string::npos || second == std::string::npos ||
        id.find(':', second + 1) != std::string::npos)
        throw ValidationError("contract id '" + id + "' is not college:student:term");
    Contract c{id.substr(0, first), id.substr(first + 1, second - first - 1),
               id.substr(second + 1)};
    if (c.college.empty() || c.student.empty() || c.term.empty())
        throw ValidationError("contract id '" + id + "' has an empty component");
    return c;
}

std::vector<Contract> contracts_from_json(const Json& arr) {
    if (!arr.is_array())
        throw ValidationError("expected an array of contract ids");
    std::vector<Contract> out;
    for (const auto& entry : arr)
        out.push_back(parse_contract_id(entry.get<std::string>()));
    return out;
}

Json contracts_to_json(std::span<const Contract> contracts) {
    Json arr = Json::array();
    for (const auto& c : contracts)
        arr.push_back(c.id());
    return arr;
}

namespace {

Rational rational_from_json(const Json& value) {
    if (value.is_number_integer())
        return Rational(value.get<long long>());
    if (value.is_string()) {
        const std::string s = value.get<std::string>();
        auto slash = s.find('/');
        try {
            if (slash == std::string::npos)
                return Rational(std::stoll(s));
            return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
        } catch (const std::exception&) {
            throw ValidationError("bad rational '" + s + "'");
        }
    }
    throw ValidationError("rationals must be integers or 'p/q' strings");
}

ChoiceFunction parse_choice_spec(const std::string& college, const Json& spec,
                                 std::vector<Contract> domain, const TermOrder& order) {
    if (!spec.is_object() || !spec.contains("family"))
        throw ValidationError("choice spec of '" + college + "' needs a \"family\"");
    const std::string family = spec.at("family").get<std::string>();
    if (family == "table") {
        auto tmp = ChoiceFunction(college, domain, order, [](LocalSet) { return 0; }, "zero");
        const auto& sorted = tmp.domain();
        std::vector<LocalSet> table(std::size_t{1} << sorted.size(),
                                    std::numeric_limits<LocalSet>::max());
        for (const auto& entry : spec.at("entries")) {
            LocalSet offered = tmp.mask_of(contracts_from_json(entry.at("offered")));
            LocalSet chosen = tmp.mask_of(contracts_from_json(entry.at("chosen")));
            if (table[offered] != std::numeric_limits<LocalSet>::max())
                throw ValidationError("choice table of '" + college +
                                      "' lists a subset twice");
            table[offered] = chosen;
        }
        for (std::size_t y = 0; y < table.size(); ++y)
            if (table[y] == std::numeric_limits<LocalSet>::max())
                throw ValidationError("choice table of '" + college +
                                      "' is missing a subset; tables must be total");
        return TabulatedChoice(college, sorted, std::move(table), order).to_choice(order);
    }
    if (family == "unit_demand")
        return make_unit_demand(contracts_from_json(spec.at("priority")), std::move(domain),
                                order);
    if (family == "merit_over_need") {
        std::map<std::string, int> quotas;
        for (const auto& [term, q] : spec.at("quotas").items())
            quotas[term] = q.get<int>();
        return make_merit_over_need(spec.at("merit").get<std::vector<std::string>>(),
                                    std::move(quotas), std::move(domain), order);
    }
    if (family == "bfyc")
        return make_bfyc(spec.at("merit").get<std::vector<std::string>>(),
                         spec.at("q1").get<int>(), spec.at("q2").get<int>(), std::move(domain),
                         order);
    if (family == "quasilinear") {
        QuasiLinearValuation valuation;
        for (const auto& entry : spec.at("values")) {
            auto students = entry.at("students").get<std::vector<std::string>>();
            std::sort(students.begin(), students.end());
            valuation.values[students] = rational_from_json(entry.at("value"));
        }
        for (const auto& [term, salary] : spec.at("salaries").items())
            valuation.salaries[term] = rational_from_json(salary);
        return make_quasilinear(valuation, std::move(domain), order);
    }
    if (family == "ranked_sets") {
        std::vector<std::vector<Contract>> ranking;
        for (const auto& entry : spec.at("ranking"))
            ranking.push_back(contracts_from_json(entry));
        return make_ranked_sets(std::move(ranking), std::move(domain), order);
    }
    throw ValidationError("unknown choice family '" + family + "' for college '" + college +
                          "'");
}

} // namespace

Market parse_market(const Json& doc) {
    if (!doc.is_object())
        throw ValidationError("market file: expected a JSON object");
    for (const auto& key : {"terms", "colleges", "students", "contracts", "choice"})
        if (!doc.contains(key))
            throw ValidationError(std::string("market file: missing \"") + key + "\"");
    TermOrder order(doc.at("terms").get<std::vector<std::string>>());
    auto colleges = doc.at("colleges").get<std::vector<std::string>>();
    auto students = doc.at("students").get<std::vector<std::string>>();
    auto universe = contracts_from_json(doc.at("contracts"));
    for (const auto& name : colleges)
        if (name.find(':') != std::string::npos)
            throw ValidationError("college id '" + name + "' may not contain ':'");
    for (const auto& name : students)
        if (name.find(':') != std::string::npos)
            throw ValidationError("student id '" + name + "' may not contain ':'");
    for (const auto& term : order.labels())
        if (term.find(':') != std::string::npos)
            throw ValidationError("term label '" + term + "' may not contain ':'");

    std::vector<ChoiceFunction> profile;
    const auto& choice = doc.at("choice");
    for (const auto& [name, spec] : choice.items())
        if (std::find(colleges.begin(), colleges.end(), name) == colleges.end())
            throw ValidationError("market file: choice spec for undeclared college '" + name +
                                  "'");
    for (const auto& college : colleges) {
        if (!choice.contains(college))
            throw ValidationError("market file: no choice spec for college '" + college + "'");
        std::vector<Contract> domain;
        for (const auto& c : universe)
            if (c.college == college)
                domain.push_back(c);
        profile.push_back(parse_choice_spec(college, choice.at(college), std::move(domain),
                                            order));
    }
    return Market(order, std::move(colleges), std::move(students), std::move(universe),
                  std::move(profile));
}

Market load_market(const std::string& path) {
    Json doc;
    try {
        doc = Json::parse(read_file(path));
    } catch (const Json::exception& e) {
        throw ValidationError(path + ": " + e.what());
    }
    try {
        return parse_market(doc);
    } catch (const Json::exception& e) {
        throw ValidationError(path + ": " + e.what());
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

Json market_to_json(const Market& market, const Caps& caps) {
    Json doc;
    doc["terms"] = market.order().labels();
    doc["colleges"] = market.colleges();
    doc["students"] = market.students();
    doc["contracts"] = contracts_to_json(market.universe());
    Json choice = Json::object();
    for (const auto& college : market.colleges()) {
        auto tab = tabulate(market.choice_of(college), market.order(), caps);
        Json entries = Json::array();
        const auto& cf = market.choice_of(college);
        for (std::size_t y = 0; y < tab.table().size(); ++y) {
            Json entry;
            entry["offered"] = contracts_to_json(cf.contracts_of(static_cast<LocalSet>(y)));
            entry["chosen"] = contracts_to_json(cf.contracts_of(tab.table()[y]));
            entries.push_back(std::move(entry));
        }
        choice[college] = Json{{"family", "table"}, {"entries", std::move(entries)}};
    }
    doc["choice"] = std::move(choice);
    return doc;
}

PreferenceProfile parse_profile(const Json& doc, const Market& market) {
    if (!doc.is_object() || !doc.contains("preferences"))
        throw ValidationError("preference file: missing \"preferences\"");
    std::map<std::string, std::vector<Contract>> lists;
    for (const auto& [student, arr] : doc.at("preferences").items())
        lists[student] = contracts_from_json(arr);
    auto profile = make_profile(market, lists);
    validate_profile(market, profile);
    return profile;
}

PreferenceProfile load_profile(const std::string& path, const Market& market) {
    Json doc;
    try {
        doc = Json::parse(read_file(path));
    } catch (const Json::exception& e) {
        throw ValidationError(path + ": " + e.what());
    }
    try {
        return parse_profile(doc, market);
    } catch (const Json::exception& e) {
        throw ValidationError(path + ": " + e.what());
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

Json profile_to_json(const PreferenceProfile& profile) {
    Json prefs = Json::object();
    for (const auto& p : profile.prefs)
        prefs[p.student] = contracts_to_json(p.acceptable);
    return Json{{"preferences", std::move(prefs)}};
}

namespace {

struct WitnessToJson {
    Json operator()(const IrcWitness& w) const {
        return Json{{"type", "irc"},
                    {"base", contracts_to_json(w.base)},
                    {"added", w.added.id()},
                    {"choice_base", contracts_to_json(w.choice_base)},
                    {"choice_with", contracts_to_json(w.choice_with)}};
    }
    Json operator()(const SubstitutesWitness& w) const {
        return Json{{"type", "substitutes"},
                    {"base", contracts_to_json(w.base)},
                    {"retained", w.retained.id()},
                    {"removed", w.removed.id()},
                    {"choice_large", contracts_to_json(w.choice_large)},
                    {"choice_small", contracts_to_json(w.choice_small)}};
    }
    Json operator()(const LadWitness& w) const {
        return Json{{"type", "lad"},
                    {"subset", contracts_to_json(w.subset)},
                    {"superset", contracts_to_json(w.superset)},
                    {"chosen_subset", w.chosen_subset},
                    {"chosen_superset", w.chosen_superset}};
    }
    Json operator()(const SequenceWitness& w) const {
        return Json{{"type", "sequence"},
                    {"axiom", w.axiom},
                    {"sequence", contracts_to_json(w.sequence)},
                    {"rejected_before", contracts_to_json(w.rejected_before)},
                    {"rejected_after", contracts_to_json(w.rejected_after)},
                    {"chosen_before", w.chosen_before},
                    {"chosen_after", w.chosen_after}};
    }
    Json operator()(const MonotoneChoiceWitness& w) const {
        return Json{{"type", "monotone_choice"},
                    {"offered", contracts_to_json(w.offered)},
                    {"chosen", contracts_to_json(w.chosen)},
                    {"floor", contracts_to_json(w.floor)}};
    }
    Json operator()(const DemandInvarianceWitness& w) const {
        return Json{{"type", "demand_invariance"},
                    {"subset", contracts_to_json(w.subset)},
                    {"superset", contracts_to_json(w.superset)},
                    {"students_subset", w.students_subset},
                    {"students_superset", w.students_superset}};
    }
};

} // namespace

Json audit_report_to_json(const AuditReport& report) {
    Json doc{{"axiom", report.axiom}, {"college", report.college}, {"pass", report.pass}};
    if (report.witness)
        doc["witness"] = std::visit(WitnessToJson{}, *report.witness);
    if (!report.notes.empty())
        doc["notes"] = report.notes;
    return doc;
}

AuditWitness audit_witness_from_json(const Json& doc) {
    const std::string type = doc.at("type").get<std::string>();
    if (type == "irc")
        return IrcWitness{contracts_from_json(doc.at("base")),
                          parse_contract_id(doc.at("added").get<std::string>()),
                          contracts_from_json(doc.at("choice_base")),
                          contracts_from_json(doc.at("choice_with"))};
    if (type == "substitutes")
        return SubstitutesWitness{contracts_from_json(doc.at("base")),
                                  parse_contract_id(doc.at("retained").get<std::string>()),
                                  parse_contract_id(doc.at("removed").get<std::string>()),
                                  contracts_from_json(doc.at("choice_large")),
                                  contracts_from_json(doc.at("choice_small"))};
    if (type == "lad")
        return LadWitness{contracts_from_json(doc.at("subset")),
                          contracts_from_json(doc.at("superset")),
                          doc.at("chosen_subset").get<std::size_t>(),
                          doc.at("chosen_superset").get<std::size_t>()};
    if (type == "sequence")
        return SequenceWitness{doc.at("axiom").get<std::string>(),
                               contracts_from_json(doc.at("sequence")),
                               contracts_from_json(doc.at("rejected_before")),
                               contracts_from_json(doc.at("rejected_after")),
                               doc.at("chosen_before").get<std::size_t>(),
                               doc.at("chosen_after").get<std::size_t>()};
    if (type == "monotone_choice")
        return MonotoneChoiceWitness{contracts_from_json(doc.at("offered")),
                                     contracts_from_json(doc.at("chosen")),
                                     contracts_from_json(doc.at("floor"))};
    if (type == "demand_invariance")
        return DemandInvarianceWitness{contracts_from_json(doc.at("subset")),
                                       contracts_from_json(doc.at("superset")),
                                       doc.at("students_subset").get<std::vector<std::string>>(),
                                       doc.at("students_superset").get<std::vector<std::string>>()};
    throw ValidationError("unknown witness type '" + type + "'");
}

Json stability_verdict_to_json(const StabilityVerdict& verdict) {
    Json doc;
    switch (verdict.kind) {
    case StabilityVerdict::Kind::stable:
        doc["kind"] = "stable";
        break;
    case StabilityVerdict::Kind::ir_violation: {
        doc["kind"] = "ir_violation";
        Json ir{{"kind", verdict.ir->kind}, {"college", verdict.ir->college}};
        if (verdict.ir->contract)
            ir["contract"] = verdict.ir->contract->id();
        ir["held"] = contracts_to_json(verdict.ir->held);
        ir["chosen"] = contracts_to_json(verdict.ir->chosen);
        doc["ir"] = std::move(ir);
        break;
    }
    case StabilityVerdict::Kind::blocked:
        doc["kind"] = "blocked";
        doc["block"] = Json{{"college", verdict.block->college},
                            {"coalition", contracts_to_json(verdict.block->coalition)}};
        break;
    }
    return doc;
}

Json da_trace_to_json(const DATrace& trace) {
    Json rounds = Json::array();
    for (const auto& round : trace.rounds) {
        Json held = Json::object(), rejected = Json::object();
        for (const auto& [college, contracts] : round.held)
            held[college] = contracts_to_json(contracts);
        for (const auto& [college, contracts] : round.rejected)
            rejected[college] = contracts_to_json(contracts);
        rounds.push_back(Json{{"proposals", contracts_to_json(round.proposals)},
                              {"held", std::move(held)},
                              {"rejected", std::move(rejected)}});
    }
    return Json{{"rounds", std::move(rounds)}, {"outcome", contracts_to_json(trace.outcome)}};
}

Json da_stability_report_to_json(const DAStabilityReport& report) {
    Json doc{{"pass", report.pass},
             {"profiles_checked", report.profiles_checked},
             {"exhaustive", report.exhaustive}};
    if (!report.pass && report.witness_profile) {
        doc["witness"] = Json{{"profile", profile_to_json(*report.witness_profile)},
                              {"outcome", contracts_to_json(*report.witness_outcome)},
                              {"verdict", stability_verdict_to_json(*report.witness_verdict)}};
    }
    return doc;
}

Json rural_hospitals_report_to_json(const RuralHospitalsReport& report) {
    Json doc{{"pass", report.pass}, {"stable_count", report.stable_count}};
    if (!report.notes.empty())
        doc["notes"] = report.notes;
    if (report.witness)
        doc["witness"] = Json{{"first", contracts_to_json(report.witness->first)},
                              {"second", contracts_to_json(report.witness->second)}};
    return doc;
}

Json equivalence_report_to_json(const EquivalenceReport& report) {
    Json doc{{"equivalent", report.equivalent},
             {"profiles_checked", report.profiles_checked},
             {"exhaustive", report.exhaustive}};
    if (report.witness)
        doc["witness"] = Json{{"profile", profile_to_json(report.witness->profile)},
                              {"outcome_a", contracts_to_json(report.witness->outcome_a)},
                              {"outcome_b", contracts_to_json(report.witness->outcome_b)}};
    return doc;
}

Json membership_report_to_json(const MembershipReport& report) {
    auto reports = [](const std::vector<AuditReport>& list) {
        Json arr = Json::array();
        for (const auto& r : list)
            arr.push_back(audit_report_to_json(r));
        return arr;
    };
    Json doc{{"member", report.member},
             {"observable_substitutes", reports(report.observable_substitutes)},
             {"observable_lad", reports(report.observable_lad)},
             {"virtual_substitutes", reports(report.virtual_substitutes)},
             {"virtual_lad", reports(report.virtual_lad)},
             {"virtual_monotone", reports(report.virtual_monotone)}};
    if (report.equivalence)
        doc["equivalence"] = equivalence_report_to_json(*report.equivalence);
    if (report.da_stability)
        doc["da_stability"] = da_stability_report_to_json(*report.da_stability);
    return doc;
}

Json sp_report_to_json(const StrategyProofnessReport& report) {
    Json doc{{"pass", report.pass},
             {"max_coalition", report.max_coalition},
             {"cases_checked", report.cases_checked},
             {"exhaustive", report.exhaustive}};
    if (report.witness) {
        doc["witness"] = Json{
            {"coalition", report.witness->coalition},
            {"truthful_profile", profile_to_json(report.witness->truthful_profile)},
            {"manipulated_profile", profile_to_json(report.witness->manipulated_profile)},
            {"truthful_outcome", contracts_to_json(report.witness->truthful_outcome)},
            {"manipulated_outcome", contracts_to_json(report.witness->manipulated_outcome)}};
    }
    return doc;
}

Json economy_to_json(const KelsoCrawfordEconomy& economy) {
    Json firm_utility = Json::object();
    for (const auto& [firm, table] : economy.firm_utility) {
        Json rows = Json::array();
        for (const auto& [pairs, value] : table) {
            Json pair_list = Json::array();
            for (const auto& [worker, salary] : pairs)
                pair_list.push_back(Json::array({worker, salary}));
            rows.push_back(Json{{"pairs", std::move(pair_list)}, {"utility", value}});
        }
        firm_utility[firm] = std::move(rows);
    }
    Json worker_utility = Json::object();
    for (const auto& [worker, table] : economy.worker_utility) {
        Json rows = Json::array();
        for (const auto& [key, value] : table)
            rows.push_back(
                Json{{"firm", key.first}, {"salary", key.second}, {"utility", value}});
        worker_utility[worker] = std::move(rows);
    }
    return Json{{"firms", economy.firms},
                {"workers", economy.workers},
                {"salaries", economy.salaries},
                {"firm_utility", std::move(firm_utility)},
                {"worker_utility", std::move(worker_utility)},
                {"worker_outside", economy.worker_outside}};
}

Json isomorphism_to_json(const Isomorphism& iso) {
    Json triples = Json::array();
    for (const auto& [triple, image] : iso.map)
        triples.push_back(Json{{"college", std::get<0>(triple)},
                               {"student", std::get<1>(triple)},
                               {"term", std::get<2>(triple)},
                               {"firm", image.firm},
                               {"worker", image.worker},
                               {"salary", image.salary}});
    return Json{{"triples", std::move(triples)}};
}

Json isomorphism_report_to_json(const IsomorphismReport& report) {
    return Json{{"pass", report.pass},
                {"blocks_consistent", report.blocks_consistent},
                {"preferences_agree", report.preferences_agree},
                {"choices_agree", report.choices_agree},
                {"outside_dominates", report.outside_dominates},
                {"failures", report.failures}};
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError("cannot read '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ValidationError("cannot write '" + path + "'");
    out << contents;
}

std::string file_digest(const std::string& path) {
    const std::string bytes = read_file(path);
    std::uint64_t hash = 14695981039346656037ULL;
    for (unsigned char b : bytes) {
        hash ^= b;
        hash *= 1099511628211ULL;
    }
    std::ostringstream out;
    out << "fnv1a64:" << std::hex << hash;
    return out.str();
}

} // namespace mmc
