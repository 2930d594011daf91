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
#include <set>

#include "fixtures.hpp"
#include "mmc/core.hpp"
#include "mmc/market.hpp"

using namespace mmc;
using fixtures::x;
using fixtures::xp;
using fixtures::y;
using fixtures::yp;
using fixtures::z;
using fixtures::zp;

TEST_CASE("term order") {
    TermOrder order({"1", "0"});
    CHECK(order.better("1", "0"));
    CHECK(!order.better("0", "1"));
    CHECK(order.at_least("1", "1"));
    CHECK_THROWS_AS(order.index_of("2"), ValidationError);
    CHECK_THROWS_AS(TermOrder({}), ValidationError);
    CHECK_THROWS_AS(TermOrder({"0", "0"}), ValidationError);
}

TEST_CASE("worst contracts") {
    TermOrder order({"1", "0"});
    SUBCASE("keeps each student's worst") {
        std::vector<Contract> in{x(), xp(), y()};
        CHECK(worst_contracts(in, order) == std::vector<Contract>{x(), y()});
    }
    SUBCASE("empty set") {
        CHECK(worst_contracts({}, order).empty());
    }
    SUBCASE("singleton") {
        std::vector<Contract> in{yp()};
        CHECK(worst_contracts(in, order) == std::vector<Contract>{yp()});
    }
    SUBCASE("rejects mixed colleges") {
        std::vector<Contract> in{x(), Contract{"c2", "s1", "0"}};
        CHECK_THROWS_AS(worst_contracts(in, order), ValidationError);
    }
}

TEST_CASE("upper closure") {
    Market market = fixtures::recall();
    const auto domain = market.college_contracts("c1");
    SUBCASE("adds every better contract") {
        std::vector<Contract> in{x(), y(), z()};
        auto closure = upper_closure(in, domain, market.order());
        CHECK(closure.size() == 6);
    }
    SUBCASE("empty set") {
        CHECK(upper_closure({}, domain, market.order()).empty());
    }
    SUBCASE("top contract is closed") {
        std::vector<Contract> in{yp()};
        CHECK(upper_closure(in, domain, market.order()) == std::vector<Contract>{yp()});
    }
}

TEST_CASE("worst/upper properties over every small subset") {
    Market market = fixtures::recall();
    const auto domain = market.college_contracts("c1");
    const auto& order = market.order();
    for (unsigned mask = 0; mask < (1u << domain.size()); ++mask) {
        std::vector<Contract> set;
        for (std::size_t i = 0; i < domain.size(); ++i)
            if (mask & (1u << i))
                set.push_back(domain[i]);
        auto worst = worst_contracts(set, order);
        // idempotent
        CHECK(worst_contracts(worst, order) == worst);
        // worst(Y) inside Y inside upper(Y)
        auto upper = upper_closure(set, domain, order);
        for (const auto& c : worst)
            CHECK(contains_contract(set, c));
        for (const auto& c : set)
            CHECK(contains_contract(upper, c));
        // the closure only sees the floor
        CHECK(upper == upper_closure(worst, domain, order));
        // one worst contract per student appearing in Y
        std::set<std::string> students;
        for (const auto& c : set)
            students.insert(c.student);
        CHECK(worst.size() == students.size());
    }
}

TEST_CASE("preference validation") {
    Market market = fixtures::recall();
    SUBCASE("monotone list is valid") {
        CHECK(validate_preference({"s2", {yp(), y()}}, market).ok());
    }
    SUBCASE("inverted pair") {
        auto check = validate_preference({"s2", {y(), yp()}}, market);
        REQUIRE(!check.ok());
        CHECK(check.violations.front() == "monotonicity: c1:s2:0 before c1:s2:1");
    }
    SUBCASE("missing upward closure") {
        auto check = validate_preference({"s2", {y()}}, market);
        REQUIRE(!check.ok());
        CHECK(check.violations.front() == "upward closure: c1:s2:1 missing");
    }
    SUBCASE("foreign and duplicate contracts") {
        CHECK(!validate_preference({"s2", {x()}}, market).ok());
        CHECK(!validate_preference({"s2", {yp(), yp()}}, market).ok());
    }
}

namespace {

// independent count: choose a prefix length per college chain, then
// count interleavings by the multinomial recurrence
std::size_t interleavings(const std::vector<std::size_t>& lengths) {
    std::size_t total = 0;
    for (std::size_t l : lengths)
        total += l;
    if (total == 0)
        return 1;
    std::size_t count = 0;
    for (std::size_t k = 0; k < lengths.size(); ++k) {
        if (lengths[k] == 0)
            continue;
        auto rest = lengths;
        --rest[k];
        count += interleavings(rest);
    }
    return count;
}

std::size_t expected_preference_count(const std::vector<std::size_t>& chain_lengths) {
    std::vector<std::size_t> prefix(chain_lengths.size(), 0);
    std::size_t count = 0;
    for (;;) {
        count += interleavings(prefix);
        std::size_t k = 0;
        while (k < prefix.size()) {
            if (++prefix[k] <= chain_lengths[k])
                break;
            prefix[k] = 0;
            ++k;
        }
        if (k == prefix.size())
            break;
    }
    return count;
}

} // namespace

TEST_CASE("monotone preference enumeration") {
    SUBCASE("single chain of two") {
        Market market = fixtures::recall();
        auto prefs = enumerate_monotone_preferences("s2", market);
        REQUIRE(prefs.size() == 3);
        CHECK(prefs[0].acceptable.empty());
        CHECK(prefs[1].acceptable == std::vector<Contract>{yp()});
        CHECK(prefs[2].acceptable == std::vector<Contract>{yp(), y()});
    }
    SUBCASE("two incomparable contracts give five orders") {
        Market unit = fixtures::unit_two_college();
        auto prefs = enumerate_monotone_preferences("s1", unit);
        CHECK(prefs.size() == 5);
    }
    SUBCASE("every output is valid, unique, and counted independently") {
        for (const auto& [name, market] : fixtures::all_markets()) {
            for (const auto& student : market.students()) {
                auto prefs = enumerate_monotone_preferences(student, market);
                std::set<std::vector<std::string>> seen;
                for (const auto& p : prefs) {
                    CHECK(validate_preference(p, market).ok());
                    std::vector<std::string> ids;
                    for (const auto& c : p.acceptable)
                        ids.push_back(c.id());
                    CHECK(seen.insert(ids).second);
                }
                std::vector<std::size_t> lengths;
                for (const auto& college : market.colleges()) {
                    std::size_t n = 0;
                    for (const auto& c : market.student_contracts(student))
                        if (c.college == college)
                            ++n;
                    if (n)
                        lengths.push_back(n);
                }
                CHECK(prefs.size() == expected_preference_count(lengths));
            }
        }
    }
}

TEST_CASE("market validation") {
    TermOrder order({"0"});
    SUBCASE("contract with undeclared student") {
        std::vector<Contract> universe{Contract{"c", "ghost", "0"}};
        auto cf = make_unit_demand({Contract{"c", "ghost", "0"}}, order);
        CHECK_THROWS_AS(Market(order, {"c"}, {"sa"}, universe, {std::move(cf)}),
                        ValidationError);
    }
    SUBCASE("choice domain must equal the college's universe slice") {
        std::vector<Contract> universe{Contract{"c", "sa", "0"}, Contract{"c", "sb", "0"}};
        auto cf = make_unit_demand({Contract{"c", "sa", "0"}}, order);
        CHECK_THROWS_AS(Market(order, {"c"}, {"sa", "sb"}, universe, {std::move(cf)}),
                        ValidationError);
    }
}
