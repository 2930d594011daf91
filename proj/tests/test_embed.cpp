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
#include <iterator>
#include <limits>

#include "fixtures.hpp"
#include "mmc/embed.hpp"
#include "mmc/virtual_choice.hpp"

using namespace mmc;
using fixtures::x;
using fixtures::xp;
using fixtures::y;
using fixtures::yp;
using fixtures::z;
using fixtures::zp;

namespace {

std::size_t position(const AllocationOrder& order, const std::vector<Contract>& allocation) {
    auto it = std::find(order.ranked.begin(), order.ranked.end(), allocation);
    REQUIRE(it != order.ranked.end());
    return static_cast<std::size_t>(it - order.ranked.begin());
}

} // namespace

TEST_CASE("rationalizing allocation orders") {
    TermOrder order({"1", "0"});
    SUBCASE("the pair restriction of the substitutable twin") {
        auto cf = make_unit_demand({y()}, {x(), y()}, order);
        auto ranked = rationalize_allocation_order(cf, order);
        // {y} above empty above {x}
        CHECK(position(ranked, {y()}) < position(ranked, {}));
        CHECK(position(ranked, {}) < position(ranked, {x()}));
    }
    SUBCASE("empty domain") {
        ChoiceFunction empty("c", {}, order, [](LocalSet) { return 0; }, "empty");
        auto ranked = rationalize_allocation_order(empty, order);
        REQUIRE(ranked.ranked.size() == 1);
        CHECK(ranked.ranked.front().empty());
    }
    SUBCASE("unit demand over two students") {
        TermOrder single({"0"});
        Contract a{"e", "sa", "0"}, d{"e", "sd", "0"};
        auto cf = make_unit_demand({a, d}, single);
        auto ranked = rationalize_allocation_order(cf, single);
        CHECK(position(ranked, {a}) < position(ranked, {d}));
        CHECK(position(ranked, {d}) < position(ranked, {}));
        CHECK(position(ranked, {a}) < position(ranked, {a, d}));
    }
    SUBCASE("every rationalization maximum reproduces the choice") {
        for (const char* name : {"recall_virtual.json", "unit_two_college.json"}) {
            Market market = fixtures::load(name);
            for (const auto& college : market.colleges()) {
                // the verification pass inside would throw on failure
                auto ranked =
                    rationalize_allocation_order(market.choice_of(college), market.order());
                CHECK(!ranked.ranked.empty());
            }
        }
    }
    SUBCASE("the order ranks the cheaper variant of an allocation higher") {
        Market market = virtualize(fixtures::recall());
        auto ranked = rationalize_allocation_order(market.choice_of("c1"), market.order());
        const auto& terms = market.order();
        for (const auto& p : ranked.ranked) {
            for (const auto& q : ranked.ranked) {
                if (p == q || p.size() != q.size())
                    continue;
                bool comparable = true; // same students, p at least as good for each
                for (const auto& cp : p) {
                    bool matched = false;
                    for (const auto& cq : q)
                        if (cq.student == cp.student) {
                            matched = true;
                            comparable = comparable && terms.at_least(cp.term, cq.term);
                        }
                    comparable = comparable && matched;
                }
                if (comparable)
                    CHECK(position(ranked, q) < position(ranked, p));
            }
        }
    }
    SUBCASE("a non-rationalizable rule is refused") {
        // two contracts of one student where the rule picks the floor
        // from the pair but the top alone: revealed preference cycles
        TermOrder two({"1", "0"});
        std::vector<Contract> domain{Contract{"c", "s1", "1"}, Contract{"c", "s1", "0"}};
        // {} -> {}; {hi} -> {hi}; {lo} -> {}; {hi,lo} -> {lo}
        auto cf = TabulatedChoice("c", domain, {0, 1, 0, 2}, two).to_choice(two);
        CHECK_THROWS_AS(rationalize_allocation_order(cf, two), RationalizationError);
    }
}

TEST_CASE("embedding the virtualized recall market") {
    Market market = virtualize(fixtures::recall());
    auto profile = fixtures::recall_prefs_top(market);
    auto [economy, iso] = build_kc_economy(market, profile);

    SUBCASE("salary grid and assignment follow the term order") {
        CHECK(economy.salaries == std::vector<int>{1, 2});
        CHECK(iso.map.at({"c1", "s2", "1"}).salary == 2);
        CHECK(iso.map.at({"c1", "s2", "0"}).salary == 1);
        // worker utility rises with salary
        CHECK(economy.worker_utility.at("s2").at({"c1", 2}) >
              economy.worker_utility.at("s2").at({"c1", 1}));
    }
    SUBCASE("all four conditions verify") {
        auto report = verify_isomorphism(market, profile, economy, iso);
        CHECK(report.pass);
        CHECK(report.failures.empty());
    }
    SUBCASE("a perturbed worker utility fails the preference condition") {
        auto broken = economy;
        std::swap(broken.worker_utility.at("s2").at({"c1", 2}),
                  broken.worker_utility.at("s2").at({"c1", 1}));
        auto report = verify_isomorphism(market, profile, broken, iso);
        CHECK(!report.pass);
        CHECK(!report.preferences_agree);
    }
    SUBCASE("a perturbed firm utility fails the argmax condition") {
        auto broken = economy;
        auto& table = broken.firm_utility.at("c1");
        auto first = table.begin();
        auto second = std::next(first);
        std::swap(first->second, second->second);
        auto report = verify_isomorphism(market, profile, broken, iso);
        CHECK(!report.pass);
    }
}

TEST_CASE("worker monotonicity holds for every salary, not only universe contracts") {
    // the recall-plus-unit market misses most triples at college e, so
    // the extension slots carry the low salaries and stay below the
    // outside option
    Market market = virtualize(fixtures::recall_plus_unit());
    auto profile = make_profile(
        market, {{"s1", {Contract{"c1", "s1", "1"}, Contract{"c1", "s1", "0"},
                         Contract{"e", "s1", "0"}}},
                 {"s2", {Contract{"c1", "s2", "1"}, Contract{"c1", "s2", "0"}}},
                 {"s3", {}}});
    auto [economy, iso] = build_kc_economy(market, profile);
    auto report = verify_isomorphism(market, profile, economy, iso);
    CHECK(report.pass);
    // universe contract at e took the top salary; the missing stipend
    // triple fell below the outside option
    CHECK(iso.map.at({"e", "s1", "0"}).salary == 2);
    CHECK(iso.map.at({"e", "s1", "1"}).salary == 1);
    CHECK(economy.worker_utility.at("s1").at({"e", 1}) < economy.worker_outside.at("s1"));
    // and within every college-student pair, utility rises with salary
    for (const auto& student : market.students()) {
        for (const auto& college : market.colleges()) {
            long long last = std::numeric_limits<long long>::min();
            for (int salary : economy.salaries) {
                long long value = economy.worker_utility.at(student).at({college, salary});
                CHECK(value > last);
                last = value;
            }
        }
    }
}

TEST_CASE("single-term markets embed with the one-point salary grid") {
    Market market = fixtures::unit_two_college();
    auto profile = make_profile(market, {{"s1", {Contract{"k1", "s1", "0"}}},
                                         {"s2", {Contract{"k2", "s2", "0"},
                                                 Contract{"k1", "s2", "0"}}}});
    auto [economy, iso] = build_kc_economy(market, profile);
    CHECK(economy.salaries == std::vector<int>{1});
    auto report = verify_isomorphism(market, profile, economy, iso);
    CHECK(report.pass);
}

TEST_CASE("the embedding verifies for every monotone profile of the recall market") {
    Market market = virtualize(fixtures::recall());
    ProfileSpace space = profile_space(market);
    std::vector<std::size_t> idx(space.per_student.size(), 0);
    for (;;) {
        auto profile = space.at(idx);
        auto [economy, iso] = build_kc_economy(market, profile);
        CHECK(verify_isomorphism(market, profile, economy, iso).pass);
        std::size_t s = 0;
        while (s < idx.size()) {
            if (++idx[s] < space.per_student[s].size())
                break;
            idx[s] = 0;
            ++s;
        }
        if (s == idx.size())
            break;
    }
}
