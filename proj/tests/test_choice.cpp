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

#include <doctest.h>

#include <algorithm>
#include <bit>
#include <map>
#include <set>

#include "fixtures.hpp"
#include "mmc/audit.hpp"
#include "mmc/choice.hpp"

using namespace mmc;
using fixtures::x;
using fixtures::xp;
using fixtures::y;
using fixtures::yp;
using fixtures::z;
using fixtures::zp;

namespace {

std::vector<Contract> chain(const std::string& college, const std::string& student,
                            const std::vector<std::string>& terms) {
    std::vector<Contract> out;
    for (const auto& t : terms)
        out.push_back(Contract{college, student, t});
    return out;
}

} // namespace

TEST_CASE("choose on the recall college") {
    Market market = fixtures::recall();
    const auto& cf = market.choice_of("c1");
    SUBCASE("the full no-stipend set is taken whole") {
        std::vector<Contract> in{x(), y(), z()};
        CHECK(cf.choose(in) == std::vector<Contract>{x(), y(), z()});
    }
    SUBCASE("without the third student only s2 is kept") {
        std::vector<Contract> in{x(), y()};
        CHECK(cf.choose(in) == std::vector<Contract>{y()});
    }
    SUBCASE("empty offer") {
        CHECK(cf.choose({}).empty());
    }
    SUBCASE("offers outside the domain are rejected") {
        std::vector<Contract> in{Contract{"c9", "s1", "0"}};
        CHECK_THROWS_AS(cf.choose(in), ValidationError);
    }
}

TEST_CASE("unit demand") {
    TermOrder order({"1", "0"});
    auto cf = make_unit_demand({y(), yp()}, order);
    SUBCASE("second priority fills in") {
        std::vector<Contract> in{yp()};
        CHECK(cf.choose(in) == std::vector<Contract>{yp()});
    }
    SUBCASE("unlisted contracts are never chosen") {
        auto wide = make_unit_demand({y(), yp()}, {x(), y(), yp()}, order);
        std::vector<Contract> in{x()};
        CHECK(wide.choose(in).empty());
    }
    SUBCASE("top priority wins") {
        TermOrder single({"0"});
        Contract a{"e", "sa", "0"}, d{"e", "sd", "0"};
        auto ud = make_unit_demand({a, d}, single);
        std::vector<Contract> in{a, d};
        CHECK(ud.choose(in) == std::vector<Contract>{a});
    }
    SUBCASE("equals the substitutable twin's table") {
        Market market = fixtures::recall_virtual();
        auto lhs = tabulate(make_unit_demand({y(), yp()},
                                             market.college_contracts("c1"), order),
                            order);
        auto rhs = tabulate(market.choice_of("c1"), order);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("merit over need") {
    TermOrder order({"1", "0"}); // stipend 1 over stipend 0
    SUBCASE("quota on the low stipend starves the second student") {
        auto domain = chain("c", "s1", {"1", "0"});
        domain.push_back(Contract{"c", "s2", "0"});
        auto cf = make_merit_over_need({"s1", "s2"}, {{"0", 1}, {"1", 2}}, domain, order);
        std::vector<Contract> in = domain;
        CHECK(cf.choose(in) == std::vector<Contract>{Contract{"c", "s1", "0"}});
    }
    SUBCASE("empty offer") {
        auto cf = make_merit_over_need({"s1"}, {{"0", 1}, {"1", 1}},
                                       chain("c", "s1", {"1", "0"}), order);
        CHECK(cf.choose({}).empty());
    }
    SUBCASE("smallest stipend is preferred") {
        auto cf = make_merit_over_need({"s1"}, {{"0", 1}, {"1", 1}},
                                       chain("c", "s1", {"1", "0"}), order);
        auto in = chain("c", "s1", {"1", "0"});
        CHECK(cf.choose(in) == std::vector<Contract>{Contract{"c", "s1", "0"}});
    }
    SUBCASE("unknown student is a domain error") {
        auto cf = make_merit_over_need({"s1"}, {{"0", 1}, {"1", 1}},
                                       {Contract{"c", "s1", "0"}, Contract{"c", "s9", "0"},
                                        Contract{"c", "s1", "1"}, Contract{"c", "s9", "1"}},
                                       order);
        std::vector<Contract> in{Contract{"c", "s9", "0"}};
        CHECK_THROWS_AS(cf.choose(in), ValidationError);
    }
    SUBCASE("decreasing quotas are rejected") {
        CHECK_THROWS_AS(make_merit_over_need({"s1"}, {{"0", 2}, {"1", 1}},
                                             chain("c", "s1", {"1", "0"}), order),
                        ValidationError);
    }
    SUBCASE("oracle: merit-lexicographic argmax over feasible selections") {
        // terms 2 > 1 > 0, two seats total, one at level <= 0, two at <= 1
        TermOrder wide({"2", "1", "0"});
        std::vector<Contract> domain;
        for (const auto& s : {"s1", "s2", "s3"})
            for (const auto& t : {"2", "1", "0"})
                domain.push_back(Contract{"c", s, t});
        std::map<std::string, int> quotas{{"0", 1}, {"1", 2}, {"2", 2}};
        std::vector<std::string> merit{"s2", "s1", "s3"};
        auto cf = make_merit_over_need(merit, quotas, domain, wide);
        auto sorted_domain = choice_domain(domain, wide);

        auto level = [&wide](const Contract& c) {
            return static_cast<int>(wide.size() - 1 - wide.index_of(c.term));
        };
        auto feasible = [&](const std::vector<Contract>& sel) {
            for (int l = 0; l < 3; ++l) {
                int count = 0;
                for (const auto& c : sel)
                    if (level(c) <= l)
                        ++count;
                if (count > quotas.at(std::to_string(l)))
                    return false;
            }
            return true;
        };
        // score: for each merit rank, (served, -stipend level); larger is better
        auto score = [&](const std::vector<Contract>& sel) {
            std::vector<int> s;
            for (const auto& student : merit) {
                const Contract* got = nullptr;
                for (const auto& c : sel)
                    if (c.student == student)
                        got = &c;
                s.push_back(got ? 1 : 0);
                s.push_back(got ? -level(*got) : -100);
            }
            return s;
        };
        for (unsigned mask = 0; mask < (1u << sorted_domain.size()); ++mask) {
            std::vector<Contract> offered;
            for (std::size_t i = 0; i < sorted_domain.size(); ++i)
                if (mask & (1u << i))
                    offered.push_back(sorted_domain[i]);
            // brute-force best feasible selection, one per student
            std::vector<Contract> best;
            bool have = false;
            for (unsigned sub = mask;; sub = (sub - 1) & mask) {
                std::vector<Contract> sel;
                std::set<std::string> students;
                bool allocation = true;
                for (std::size_t i = 0; i < sorted_domain.size(); ++i)
                    if (sub & (1u << i)) {
                        sel.push_back(sorted_domain[i]);
                        allocation = allocation && students.insert(sorted_domain[i].student).second;
                    }
                if (allocation && feasible(sel) && (!have || score(sel) > score(best))) {
                    best = sel;
                    have = true;
                }
                if (sub == 0)
                    break;
            }
            CHECK(cf.choose(offered) == canonical_sorted(best, wide));
        }
    }
}

TEST_CASE("bid for your career") {
    TermOrder order({"t1", "t2"}); // shorter service first
    SUBCASE("first tier shortest, second tier longest") {
        std::vector<Contract> domain;
        for (const auto& s : {"s1", "s2"})
            for (const auto& t : {"t1", "t2"})
                domain.push_back(Contract{"b", s, t});
        auto cf = make_bfyc({"s1", "s2"}, 1, 1, domain, order);
        auto got = cf.choose(domain);
        CHECK(got == canonical_sorted({Contract{"b", "s1", "t1"}, Contract{"b", "s2", "t2"}},
                                      order));
    }
    SUBCASE("empty offer") {
        auto cf = make_bfyc({"s1"}, 1, 1, chain("b", "s1", {"t1", "t2"}), order);
        CHECK(cf.choose({}).empty());
    }
    SUBCASE("zero first tier takes the longest service") {
        auto cf = make_bfyc({"s1"}, 0, 1, chain("b", "s1", {"t1", "t2"}), order);
        auto in = chain("b", "s1", {"t1", "t2"});
        CHECK(cf.choose(in) == std::vector<Contract>{Contract{"b", "s1", "t2"}});
    }
    SUBCASE("oracle: independent reimplementation over every subset") {
        TermOrder wide({"t1", "t2", "t3"});
        std::vector<Contract> domain;
        for (const auto& s : {"s1", "s2", "s3"})
            for (const auto& t : {"t1", "t3"})
                domain.push_back(Contract{"b", s, t});
        std::vector<std::string> merit{"s3", "s1", "s2"};
        auto cf = make_bfyc(merit, 1, 1, domain, wide);
        auto sorted_domain = choice_domain(domain, wide);
        for (unsigned mask = 0; mask < (1u << sorted_domain.size()); ++mask) {
            std::vector<Contract> offered;
            for (std::size_t i = 0; i < sorted_domain.size(); ++i)
                if (mask & (1u << i))
                    offered.push_back(sorted_domain[i]);
            // oracle: walk the merit list, count admitted cadets
            std::vector<Contract> expect;
            int admitted = 0;
            for (const auto& cadet : merit) {
                std::vector<Contract> mine;
                for (const auto& c : offered)
                    if (c.student == cadet)
                        mine.push_back(c);
                if (mine.empty())
                    continue;
                if (admitted >= 2)
                    break;
                bool first_tier = admitted < 1;
                Contract pick = mine.front();
                for (const auto& c : mine) {
                    bool shorter = wide.index_of(c.term) < wide.index_of(pick.term);
                    if (first_tier ? shorter : !shorter && c.term != pick.term)
                        pick = c;
                }
                expect.push_back(pick);
                ++admitted;
            }
            CHECK(cf.choose(offered) == canonical_sorted(expect, wide));
        }
    }
}

TEST_CASE("quasilinear valuations") {
    TermOrder order({"1", "0"});
    SUBCASE("cheapest contract of a wanted student") {
        QuasiLinearValuation v;
        v.values[{"s1"}] = Rational(5);
        v.salaries["0"] = Rational(1);
        v.salaries["1"] = Rational(2);
        auto cf = make_quasilinear(v, chain("c", "s1", {"1", "0"}), order);
        auto in = chain("c", "s1", {"1", "0"});
        CHECK(cf.choose(in) == std::vector<Contract>{Contract{"c", "s1", "0"}});
        CHECK(cf.choose({}).empty());
    }
    SUBCASE("too expensive hires stay out") {
        QuasiLinearValuation v;
        v.values[{"s1"}] = Rational(1, 2);
        v.salaries["0"] = Rational(1);
        v.salaries["1"] = Rational(2);
        auto cf = make_quasilinear(v, chain("c", "s1", {"1", "0"}), order);
        std::vector<Contract> in{Contract{"c", "s1", "0"}};
        CHECK(cf.choose(in).empty());
    }
    SUBCASE("ties are a construction error") {
        QuasiLinearValuation v;
        v.values[{"s1"}] = Rational(1); // hire at salary 1 nets 0, like hiring nobody
        v.salaries["0"] = Rational(1);
        v.salaries["1"] = Rational(2);
        CHECK_THROWS_AS(make_quasilinear(v, chain("c", "s1", {"1", "0"}), order),
                        ValidationError);
    }
    SUBCASE("salaries must rise along the term order") {
        QuasiLinearValuation v;
        v.values[{"s1"}] = Rational(5);
        v.salaries["0"] = Rational(2);
        v.salaries["1"] = Rational(1);
        CHECK_THROWS_AS(make_quasilinear(v, chain("c", "s1", {"1", "0"}), order),
                        ValidationError);
    }
    SUBCASE("oracle: exhaustive scan over floor selections") {
        QuasiLinearValuation v;
        v.values[{"s1"}] = Rational(7);
        v.values[{"s2"}] = Rational(4);
        v.values[{"s1", "s2"}] = Rational(12);
        v.salaries["0"] = Rational(2);
        v.salaries["1"] = Rational(3);
        std::vector<Contract> domain;
        for (const auto& s : {"s1", "s2"})
            for (const auto& t : {"1", "0"})
                domain.push_back(Contract{"c", s, t});
        auto cf = make_quasilinear(v, domain, order);
        auto sorted_domain = choice_domain(domain, order);
        for (unsigned mask = 0; mask < (1u << sorted_domain.size()); ++mask) {
            std::vector<Contract> offered;
            for (std::size_t i = 0; i < sorted_domain.size(); ++i)
                if (mask & (1u << i))
                    offered.push_back(sorted_domain[i]);
            auto floor = worst_contracts(offered, order);
            // independent scan over subsets of the floor
            std::vector<Contract> best;
            Rational best_value(0);
            for (unsigned sub = 0; sub < (1u << floor.size()); ++sub) {
                std::vector<Contract> sel;
                std::vector<std::string> students;
                Rational value(0);
                for (std::size_t i = 0; i < floor.size(); ++i)
                    if (sub & (1u << i)) {
                        sel.push_back(floor[i]);
                        students.push_back(floor[i].student);
                        value -= v.salaries.at(floor[i].term);
                    }
                std::sort(students.begin(), students.end());
                auto it = v.values.find(students);
                if (it != v.values.end())
                    value += it->second;
                if (value > best_value) {
                    best_value = value;
                    best = sel;
                }
            }
            CHECK(cf.choose(offered) == canonical_sorted(best, order));
        }
    }
    SUBCASE("quasilinear rules are monotone and demand invariant") {
        QuasiLinearValuation v;
        v.values[{"s1"}] = Rational(7);
        v.values[{"s2"}] = Rational(4);
        v.values[{"s1", "s2"}] = Rational(12);
        v.salaries["0"] = Rational(2);
        v.salaries["1"] = Rational(3);
        std::vector<Contract> domain;
        for (const auto& s : {"s1", "s2"})
            for (const auto& t : {"1", "0"})
                domain.push_back(Contract{"c", s, t});
        auto cf = make_quasilinear(v, domain, order);
        CHECK(check_monotone_choice(cf, order).pass);
        CHECK(check_demand_invariance(cf, order).pass);
        CHECK(check_irc(cf, order).pass);
    }
}

TEST_CASE("ranked sets") {
    Market market = fixtures::recall();
    SUBCASE("a ranked set with two contracts of one student is rejected") {
        CHECK_THROWS_AS(make_ranked_sets({{y(), yp()}}, market.college_contracts("c1"),
                                         market.order()),
                        ValidationError);
    }
    SUBCASE("unranked offers choose nothing") {
        const auto& cf = market.choice_of("c1");
        std::vector<Contract> in{xp(), zp()};
        CHECK(cf.choose(in).empty());
    }
}

TEST_CASE("tabulate") {
    Market market = fixtures::recall();
    const auto& cf = market.choice_of("c1");
    SUBCASE("a 6-contract domain gives a 64-row table agreeing with the rule") {
        auto tab = tabulate(cf, market.order());
        REQUIRE(tab.table().size() == 64);
        auto as_choice = tab.to_choice(market.order());
        for (LocalSet set = 0; set < 64; ++set)
            CHECK(as_choice.choose_mask(set) == cf.choose_mask(set));
    }
    SUBCASE("empty domain has the one-row table") {
        TermOrder single({"0"});
        ChoiceFunction empty("c", {}, single, [](LocalSet) { return 0; }, "empty");
        auto tab = tabulate(empty, single);
        CHECK(tab.table() == std::vector<LocalSet>{0});
    }
    SUBCASE("the cap is enforced") {
        TermOrder single({"0"});
        std::vector<Contract> many;
        for (int i = 0; i < 17; ++i)
            many.push_back(Contract{"c", "s" + std::to_string(i), "0"});
        auto cf_many = make_unit_demand(many, single);
        CHECK_THROWS_AS(tabulate(cf_many, single), CapacityError);
        Caps caps;
        caps.allow_large = true;
        CHECK(tabulate(cf_many, single, caps).table().size() == (1u << 17));
    }
    SUBCASE("round trip through every fixture family") {
        for (const auto& [name, fixture] : fixtures::all_markets()) {
            for (const auto& college : fixture.colleges()) {
                const auto& rule = fixture.choice_of(college);
                auto tab = tabulate(rule, fixture.order());
                for (LocalSet set = 0; set < (LocalSet{1} << rule.size()); ++set)
                    CHECK(tab.table()[set] == rule.choose_mask(set));
            }
        }
    }
}

TEST_CASE("mask helpers agree with the contract-level operations") {
    for (const auto& [name, fixture] : fixtures::all_markets()) {
        for (const auto& college : fixture.colleges()) {
            const auto& cf = fixture.choice_of(college);
            auto domain = fixture.college_contracts(college);
            for (LocalSet set = 0; set < (LocalSet{1} << cf.size()); ++set) {
                auto contracts = cf.contracts_of(set);
                INFO(name, " ", college);
                CHECK(cf.contracts_of(worst_mask(cf, set, fixture.order())) ==
                      worst_contracts(contracts, fixture.order()));
                CHECK(cf.contracts_of(upper_mask(cf, set, fixture.order())) ==
                      upper_closure(contracts, domain, fixture.order()));
            }
        }
    }
}

TEST_CASE("every fixture family member satisfies the baseline axiom") {
    for (const auto& [name, fixture] : fixtures::all_markets()) {
        for (const auto& college : fixture.colleges()) {
            auto report = check_irc(fixture.choice_of(college), fixture.order());
            INFO(name, " ", college);
            CHECK(report.pass);
        }
    }
}

TEST_CASE("unit demand is substitutable with monotone aggregate demand") {
    Market market = fixtures::unit_two_college();
    for (const auto& college : market.colleges()) {
        const auto& cf = market.choice_of(college);
        for (LocalSet set = 0; set < (LocalSet{1} << cf.size()); ++set)
            CHECK(std::popcount(cf.choose_mask(set)) <= 1);
        CHECK(check_substitutes(cf, market.order()).pass);
        CHECK(check_lad(cf, market.order()).pass);
    }
}
