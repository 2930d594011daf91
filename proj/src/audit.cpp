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

#include "mmc/audit.hpp"

#include <algorithm>
#include <bit>
#include <set>

namespace mmc {

namespace {

struct Table {
    std::vector<Contract> domain;
    std::vector<LocalSet> choice;          // by subset mask
    std::vector<LocalSet> student_mask;    // per index
    std::vector<std::size_t> term_index;   // per index
    std::vector<LocalSet> pred_mask;       // strictly better same-student contracts
    LocalSet full = 0;

    LocalSet rejected(LocalSet y) const { return y & ~choice[y]; }
    LocalSet students_of(LocalSet set) const {
        LocalSet out = 0;
        LocalSet rest = set;
        while (rest) {
            std::size_t i = static_cast<std::size_t>(std::countr_zero(rest));
            out |= student_mask[i];
            rest &= rest - 1;
        }
        return out;
    }
};

Table build_table(const ChoiceFunction& cf, const TermOrder& order, std::size_t cap,
                  const char* what) {
    if (cf.size() > cap)
        throw CapacityError(std::string(what) + ": college '" + cf.college() + "' has " +
                            std::to_string(cf.size()) + " contracts, cap is " +
                            std::to_string(cap) + " (use allow_large to lift)");
    Table t;
    t.domain = cf.domain();
    t.full = cf.full_mask();
    t.choice.resize(std::size_t{1} << t.domain.size());
    for (std::size_t y = 0; y < t.choice.size(); ++y)
        t.choice[y] = cf.choose_mask(static_cast<LocalSet>(y));
    t.student_mask.resize(t.domain.size());
    t.term_index.resize(t.domain.size());
    t.pred_mask.assign(t.domain.size(), 0);
    for (std::size_t i = 0; i < t.domain.size(); ++i) {
        t.student_mask[i] = cf.student_mask(i);
        t.term_index[i] = order.index_of(t.domain[i].term);
    }
    for (std::size_t i = 0; i < t.domain.size(); ++i)
        for (std::size_t j = 0; j < t.domain.size(); ++j)
            if (i != j && t.domain[j].student == t.domain[i].student &&
                t.term_index[j] < t.term_index[i])
                t.pred_mask[i] |= LocalSet{1} << j;
    return t;
}

std::vector<Contract> pick(const Table& t, LocalSet set) {
    std::vector<Contract> out;
    for (std::size_t i = 0; i < t.domain.size(); ++i)
        if (set & (LocalSet{1} << i))
            out.push_back(t.domain[i]);
    return out;
}

// i can extend the observable set `current` within `within`: all better
// same-student contracts already arrived and the student is not chosen.
bool addable(const Table& t, LocalSet current, std::size_t i, LocalSet within) {
    LocalSet bit = LocalSet{1} << i;
    if (!(within & bit) || (current & bit))
        return false;
    if ((t.pred_mask[i] & current) != t.pred_mask[i])
        return false;
    return !(t.choice[current] & t.student_mask[i]);
}

// Depth-first walk of the graph of observable sets inside `within`.
// step(current, i) is called once per reachable edge and stops the walk
// by returning false; sequence holds the path to `current`.
struct ObservableWalk {
    const Table& t;
    LocalSet within;
    std::vector<char> visited;
    std::vector<Contract> sequence;
    std::vector<LocalSet> deadends;

    ObservableWalk(const Table& t, LocalSet within)
        : t(t), within(within), visited(std::size_t{1} << t.domain.size(), 0) {}

    template <typename Step>
    bool walk(LocalSet current, const Step& step) {
        visited[current] = 1;
        bool deadend = true;
        for (std::size_t i = 0; i < t.domain.size(); ++i) {
            if (!addable(t, current, i, within))
                continue;
            deadend = false;
            if (!step(current, i))
                return false;
            LocalSet next = current | (LocalSet{1} << i);
            if (visited[next])
                continue;
            sequence.push_back(t.domain[i]);
            if (!walk(next, step))
                return false;
            sequence.pop_back();
        }
        if (deadend)
            deadends.push_back(current);
        return true;
    }
};

} // namespace

AuditReport check_irc(const ChoiceFunction& cf, const TermOrder& order, const Caps& caps) {
    Table t = build_table(cf, order, caps.effective_set_cap(), "check_irc");
    AuditReport report{"irc", cf.college(), true, std::nullopt, {}};
    for (LocalSet y = 0; y <= t.full; ++y) {
        for (std::size_t i = 0; i < t.domain.size(); ++i) {
            LocalSet bit = LocalSet{1} << i;
            if (y & bit)
                continue;
            LocalSet with = y | bit;
            if ((t.choice[with] & bit) || t.choice[y] == t.choice[with])
                continue;
            report.pass = false;
            report.witness = IrcWitness{pick(t, y), t.domain[i], pick(t, t.choice[y]),
                                        pick(t, t.choice[with])};
            return report;
        }
    }
    return report;
}

AuditReport check_substitutes(const ChoiceFunction& cf, const TermOrder& order,
                              const Caps& caps) {
    Table t = build_table(cf, order, caps.effective_set_cap(), "check_substitutes");
    AuditReport report{"substitutes", cf.college(), true, std::nullopt, {}};
    // Scan the largest offers first and drop later-ordered contracts
    // first, so the reported witness is the one with the fullest context.
    for (LocalSet s = t.full;; --s) {
        LocalSet chosen = t.choice[s];
        for (std::size_t i = 0; i < t.domain.size(); ++i) {
            LocalSet xbit = LocalSet{1} << i;
            if (!(chosen & xbit))
                continue;
            for (std::size_t jr = t.domain.size(); jr-- > 0;) {
                LocalSet zbit = LocalSet{1} << jr;
                if (!(s & zbit) || jr == i)
                    continue;
                LocalSet smaller = s & ~zbit;
                if (t.choice[smaller] & xbit)
                    continue;
                report.pass = false;
                report.witness =
                    SubstitutesWitness{pick(t, s & ~xbit & ~zbit), t.domain[i], t.domain[jr],
                                       pick(t, chosen), pick(t, t.choice[smaller])};
                return report;
            }
        }
        if (s == 0)
            break;
    }
    return report;
}

AuditReport check_lad(const ChoiceFunction& cf, const TermOrder& order, const Caps& caps) {
    Table t = build_table(cf, order, caps.effective_set_cap(), "check_lad");
    AuditReport report{"lad", cf.college(), true, std::nullopt, {}};
    for (LocalSet y = 0; y <= t.full; ++y) {
        std::size_t ny = static_cast<std::size_t>(std::popcount(t.choice[y]));
        for (LocalSet z = y;; z = (z - 1) & y) {
            std::size_t nz = static_cast<std::size_t>(std::popcount(t.choice[z]));
            if (nz > ny) {
                report.pass = false;
                report.witness = LadWitness{pick(t, z), pick(t, y), nz, ny};
                return report;
            }
            if (z == 0)
                break;
        }
    }
    return report;
}

AuditReport check_monotone_choice(const ChoiceFunction& cf, const TermOrder& order,
                                  const Caps& caps) {
    Table t = build_table(cf, order, caps.effective_set_cap(), "check_monotone_choice");
    AuditReport report{"monotone_choice", cf.college(), true, std::nullopt, {}};
    for (LocalSet y = 0; y <= t.full; ++y) {
        LocalSet floor = worst_mask(cf, y, order);
        if (t.choice[y] & ~floor) {
            report.pass = false;
            report.witness = MonotoneChoiceWitness{pick(t, y), pick(t, t.choice[y]),
                                                   pick(t, floor)};
            return report;
        }
    }
    return report;
}

AuditReport check_demand_invariance(const ChoiceFunction& cf, const TermOrder& order,
                                    const Caps& caps) {
    Table t = build_table(cf, order, caps.effective_set_cap(), "check_demand_invariance");
    AuditReport report{"demand_invariance", cf.college(), true, std::nullopt, {}};
    auto students = [&t](LocalSet chosen) {
        std::vector<std::string> out;
        LocalSet rest = chosen;
        while (rest) {
            std::size_t i = static_cast<std::size_t>(std::countr_zero(rest));
            out.push_back(t.domain[i].student);
            rest &= rest - 1;
        }
        std::sort(out.begin(), out.end());
        return out;
    };
    for (LocalSet y = 0; y <= t.full; ++y) {
        for (LocalSet z = y;; z = (z - 1) & y) {
            // the superset may add contracts only for students chosen in z
            LocalSet extra = y & ~z;
            LocalSet chosen_students = t.students_of(t.choice[z]);
            if ((extra & ~chosen_students) == 0 &&
                t.students_of(t.choice[y]) != chosen_students) {
                report.pass = false;
                report.witness = DemandInvarianceWitness{pick(t, z), pick(t, y),
                                                         students(t.choice[z]),
                                                         students(t.choice[y])};
                return report;
            }
            if (z == 0)
                break;
        }
    }
    return report;
}

bool is_observable_sequence(const ChoiceFunction& cf, std::span<const Contract> sequence,
                            const TermOrder& order) {
    const auto& dom = cf.domain();
    LocalSet current = 0;
    for (const auto& c : sequence) {
        int i = cf.index_of(c);
        if (i < 0)
            return false;
        LocalSet bit = LocalSet{1} << i;
        if (current & bit)
            return false; // duplicate
        LocalSet preds = 0; // strictly better same-student domain contracts
        for (std::size_t j = 0; j < dom.size(); ++j)
            if (static_cast<int>(j) != i && dom[j].student == c.student &&
                order.better(dom[j].term, c.term))
                preds |= LocalSet{1} << j;
        if ((preds & current) != preds)
            return false; // a better contract of the student has not arrived
        if (cf.choose_mask(current) & cf.student_mask(static_cast<std::size_t>(i)))
            return false; // the student is currently chosen
        current |= bit;
    }
    return true;
}

AuditReport check_observable_substitutes(const ChoiceFunction& cf, const TermOrder& order,
                                         const Caps& caps) {
    Table t = build_table(cf, order, caps.effective_seq_cap(), "check_observable_substitutes");
    AuditReport report{"observable_substitutes", cf.college(), true, std::nullopt, {}};
    ObservableWalk walk(t, t.full);
    walk.walk(0, [&](LocalSet current, std::size_t i) {
        LocalSet next = current | (LocalSet{1} << i);
        if (t.rejected(current) & ~t.rejected(next)) {
            auto sequence = walk.sequence;
            sequence.push_back(t.domain[i]);
            report.pass = false;
            report.witness = SequenceWitness{"observable_substitutes", std::move(sequence),
                                             pick(t, t.rejected(current)),
                                             pick(t, t.rejected(next)),
                                             static_cast<std::size_t>(std::popcount(t.choice[current])),
                                             static_cast<std::size_t>(std::popcount(t.choice[next]))};
            return false;
        }
        return true;
    });
    return report;
}

AuditReport check_observable_lad(const ChoiceFunction& cf, const TermOrder& order,
                                 const Caps& caps) {
    Table t = build_table(cf, order, caps.effective_seq_cap(), "check_observable_lad");
    AuditReport report{"observable_lad", cf.college(), true, std::nullopt, {}};
    ObservableWalk walk(t, t.full);
    walk.walk(0, [&](LocalSet current, std::size_t i) {
        LocalSet next = current | (LocalSet{1} << i);
        if (std::popcount(t.choice[current]) > std::popcount(t.choice[next])) {
            auto sequence = walk.sequence;
            sequence.push_back(t.domain[i]);
            report.pass = false;
            report.witness = SequenceWitness{"observable_lad", std::move(sequence),
                                             pick(t, t.rejected(current)),
                                             pick(t, t.rejected(next)),
                                             static_cast<std::size_t>(std::popcount(t.choice[current])),
                                             static_cast<std::size_t>(std::popcount(t.choice[next]))};
            return false;
        }
        return true;
    });
    return report;
}

std::vector<std::vector<Contract>> observable_deadends(const ChoiceFunction& cf,
                                                       std::span<const Contract> within,
                                                       const TermOrder& order) {
    Table t = build_table(cf, order, 20, "observable_deadends");
    LocalSet w = cf.mask_of(within);
    ObservableWalk walk(t, w);
    walk.walk(0, [](LocalSet, std::size_t) { return true; });
    std::sort(walk.deadends.begin(), walk.deadends.end());
    walk.deadends.erase(std::unique(walk.deadends.begin(), walk.deadends.end()),
                        walk.deadends.end());
    std::vector<std::vector<Contract>> out;
    for (LocalSet d : walk.deadends)
        out.push_back(pick(t, d));
    return out;
}

std::vector<Contract> maximal_observable_subset(const ChoiceFunction& cf,
                                                std::span<const Contract> Y,
                                                const TermOrder& order, ObsCheck check) {
    Table t = build_table(cf, order, 20, "maximal_observable_subset");
    LocalSet w = cf.mask_of(Y);
    LocalSet current = 0;
    for (;;) {
        bool extended = false;
        for (std::size_t i = 0; i < t.domain.size(); ++i) {
            if (addable(t, current, i, w)) {
                current |= LocalSet{1} << i;
                extended = true;
                break;
            }
        }
        if (!extended)
            break;
    }
    if (check == ObsCheck::enumerate) {
        auto deadends = observable_deadends(cf, Y, order);
        for (const auto& d : deadends) {
            if (cf.mask_of(d) != current)
                throw AmbiguityError("maximal observable subset of college '" + cf.college() +
                                         "' is ambiguous; contracts are not observable "
                                         "substitutes",
                                     pick(t, current), d);
        }
    }
    return pick(t, current);
}

namespace {

struct WitnessReplayer {
    const ChoiceFunction& cf;
    const TermOrder& order;

    bool operator()(const IrcWitness& w) const {
        LocalSet base = cf.mask_of(w.base);
        int i = cf.index_of(w.added);
        if (i < 0 || (base & (LocalSet{1} << i)))
            return false;
        LocalSet with = base | (LocalSet{1} << i);
        return !(cf.choose_mask(with) & (LocalSet{1} << i)) &&
               cf.choose_mask(base) != cf.choose_mask(with);
    }
    bool operator()(const SubstitutesWitness& w) const {
        int x = cf.index_of(w.retained);
        int z = cf.index_of(w.removed);
        if (x < 0 || z < 0)
            return false;
        LocalSet large = cf.mask_of(w.base) | (LocalSet{1} << x) | (LocalSet{1} << z);
        LocalSet small = large & ~(LocalSet{1} << z);
        return (cf.choose_mask(large) & (LocalSet{1} << x)) &&
               !(cf.choose_mask(small) & (LocalSet{1} << x));
    }
    bool operator()(const LadWitness& w) const {
        LocalSet z = cf.mask_of(w.subset);
        LocalSet y = cf.mask_of(w.superset);
        if (z & ~y)
            return false;
        return std::popcount(cf.choose_mask(z)) > std::popcount(cf.choose_mask(y));
    }
    bool operator()(const SequenceWitness& w) const {
        if (w.sequence.empty())
            return false;
        std::span<const Contract> seq(w.sequence);
        if (!is_observable_sequence(cf, seq, order))
            return false;
        LocalSet prefix = cf.mask_of(seq.subspan(0, seq.size() - 1));
        LocalSet whole = cf.mask_of(seq);
        LocalSet rej_prefix = prefix & ~cf.choose_mask(prefix);
        LocalSet rej_whole = whole & ~cf.choose_mask(whole);
        if (w.axiom == "observable_substitutes")
            return (rej_prefix & ~rej_whole) != 0;
        return std::popcount(cf.choose_mask(prefix)) > std::popcount(cf.choose_mask(whole));
    }
    bool operator()(const MonotoneChoiceWitness& w) const {
        LocalSet y = cf.mask_of(w.offered);
        return (cf.choose_mask(y) & ~worst_mask(cf, y, order)) != 0;
    }
    bool operator()(const DemandInvarianceWitness& w) const {
        LocalSet z = cf.mask_of(w.subset);
        LocalSet y = cf.mask_of(w.superset);
        if (z & ~y)
            return false;
        LocalSet chosen_students = 0;
        LocalSet rest = cf.choose_mask(z);
        while (rest) {
            std::size_t i = static_cast<std::size_t>(std::countr_zero(rest));
            chosen_students |= cf.student_mask(i);
            rest &= rest - 1;
        }
        if ((y & ~z) & ~chosen_students)
            return false; // the premise fails: an unchosen student gained contracts
        LocalSet students_y = 0;
        rest = cf.choose_mask(y);
        while (rest) {
            std::size_t i = static_cast<std::size_t>(std::countr_zero(rest));
            students_y |= cf.student_mask(i);
            rest &= rest - 1;
        }
        return students_y != chosen_students;
    }
};

} // namespace

bool replay_witness(const ChoiceFunction& cf, const AuditWitness& witness,
                    const TermOrder& order) {
    return std::visit(WitnessReplayer{cf, order}, witness);
}

} // namespace mmc
