#include "dsp/approx.hpp"
#include "dsp/steinberg.hpp"
#include "dsp/stretch_squeeze.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <thread>

namespace dsp {

std::string to_string(NeatStatus s) {
    switch (s) {
        case NeatStatus::Found: return "found";
        case NeatStatus::NotFound: return "not-found";
        case NeatStatus::BudgetExceeded: return "budget-exceeded";
    }
    return "?";
}

namespace {

constexpr size_t kNone = SIZE_MAX;

// One placement decision: a large item, or one grain of a stand-in level.
struct Step {
    Scalar width, height;
    size_t item = kNone;
    int group = -1, level = -1;
    bool followsPrevious = false;  // grain of the same level as the previous step
    std::vector<size_t> options;   // indices into the start points
    std::vector<std::pair<size_t, size_t>> cells;  // cell range per option
};

struct Context {
    InstancePtr inst;
    Scalar H;
    NeatAccuracy acc;
    Classification cls;
    HorizontalRounding hr;
    std::vector<Scalar> points;
    std::vector<Scalar> baseCells;  // rounded tall heights per cell
    std::vector<Step> steps;
    std::vector<long> groupStartLimit;
    Packing base;
    Scalar gate;
};

class Search {
public:
    Search(const Context& cx, std::uint64_t cap) : cx_(cx), cap_(cap), cells_(cx.baseCells) {
        choice_.assign(cx.steps.size(), 0);
        groupStarts_.resize(cx.hr.groups.size());
    }

    // Explores only option `first` of the first step (all of it when there are no steps).
    void run(size_t first) {
        if (cx_.steps.empty()) {
            ++nodes_;
            if (nodes_ > cap_)
                exceeded_ = true;
            else
                leaf();
            return;
        }
        try_option(0, first);
    }

    std::uint64_t nodes() const { return nodes_; }
    bool exceeded() const { return exceeded_; }
    std::optional<Packing>& found() { return found_; }

private:
    bool done() const { return exceeded_ || found_.has_value(); }

    void try_option(size_t s, size_t i) {
        if (++nodes_ > cap_) {
            exceeded_ = true;
            return;
        }
        const Step& st = cx_.steps[s];
        auto [a, b] = st.cells[i];
        bool fits = true;
        for (size_t c = a; c < b; ++c) {
            cells_[c] += st.height;
            if (cells_[c] > cx_.gate) fits = false;
        }
        bool counted = false;
        if (fits && st.group >= 0) {
            auto& used = groupStarts_[st.group];
            if (!used.count(st.options[i]) && long(used.size()) >= cx_.groupStartLimit[st.group])
                fits = false;
            else {
                ++used[st.options[i]];
                counted = true;
            }
        }
        if (fits) {
            choice_[s] = i;
            dfs(s + 1);
        }
        if (counted) {
            auto& m = groupStarts_[st.group];
            if (--m[st.options[i]] == 0) m.erase(st.options[i]);
        }
        for (size_t c = a; c < b; ++c) cells_[c] -= st.height;
    }

    void dfs(size_t s) {
        if (s == cx_.steps.size()) {
            leaf();
            return;
        }
        const Step& st = cx_.steps[s];
        size_t from = 0;
        if (st.followsPrevious) {
            size_t prevPoint = cx_.steps[s - 1].options[choice_[s - 1]];
            while (from < st.options.size() && st.options[from] < prevPoint) ++from;
        }
        for (size_t i = from; i < st.options.size() && !done(); ++i) try_option(s, i);
    }

    void leaf() {
        const Scalar& D = cx_.inst->deadline;
        FractionalPacking fp{cx_.base, {}, {}};
        for (size_t k = 0; k < cx_.inst->items.size(); ++k) fp.height.push_back(cx_.inst->items[k].height);
        for (size_t s = 0; s < cx_.steps.size(); ++s) {
            const Step& st = cx_.steps[s];
            const Scalar& at = cx_.points[st.options[choice_[s]]];
            if (st.item != kNone)
                fp.integral.set(st.item, at);
            else
                fp.parts.push_back({at, st.height / cx_.hr.groups[st.group].unit, st.group, st.level});
        }
        merge_parts(fp.parts);
        IntegralResult ir = fractional_to_integral(fp, cx_.cls, cx_.hr, cx_.acc);
        Packing q = std::move(ir.packing);
        if (!ir.leftover.empty()) {
            std::vector<Item> rest;
            for (size_t k : ir.leftover) rest.push_back(q.item(k));
            try {
                GeomPacking g = steinberg_pack_box(rest, D, 8 * cx_.acc.inner * cx_.cls.lowerBound);
                for (size_t j = 0; j < rest.size(); ++j) q.set(ir.leftover[j], g.at[j].x);
            } catch (const SteinbergPreconditionError&) {
                return;
            }
        }
        if (!neat_violations(q, cx_.H, cx_.acc.target).empty()) return;
        try {
            q = extended_squeeze(q, cx_.H, cx_.acc.target, cx_.cls.squeezable);
        } catch (const InputError&) {
            return;
        }
        if (!q.complete() || !check_feasible(q).ok || !neat_violations(q, cx_.H, cx_.acc.target).empty()) return;
        found_ = std::move(q);
    }

    const Context& cx_;
    std::uint64_t cap_;
    std::uint64_t nodes_ = 0;
    bool exceeded_ = false;
    std::vector<Scalar> cells_;
    std::vector<size_t> choice_;
    std::vector<std::map<size_t, int>> groupStarts_;
    std::optional<Packing> found_;
};

void build_steps(Context& cx) {
    const Instance& inst = *cx.inst;
    const Scalar& D = inst.deadline;
    const Scalar grain = cx.acc.flatShare * cx.cls.lowerBound;

    ItemSet large = cx.cls.large;
    std::sort(large.begin(), large.end(), [&](size_t a, size_t b) {
        const Item &x = inst.items[a], &y = inst.items[b];
        if (x.area() != y.area()) return x.area() > y.area();
        return x.id < y.id;
    });
    auto fill_options = [&](Step& st) {
        for (size_t i = 0; i < cx.points.size(); ++i)
            if (cx.points[i] + st.width <= D) st.options.push_back(i);
    };
    for (size_t k : large) {
        Step st;
        st.width = inst.items[k].width;
        st.height = inst.items[k].height;
        st.item = k;
        fill_options(st);
        cx.steps.push_back(std::move(st));
    }
    for (size_t g = 0; g < cx.hr.groups.size(); ++g) {
        const HorizontalGroup& grp = cx.hr.groups[g];
        if (grp.members.empty()) continue;
        long need = ceil_of(grp.unit / grain).get_num().get_si();
        for (size_t l = 0; l < grp.widths.size(); ++l)
            for (long u = 0; u < need; ++u) {
                Step st;
                st.width = grp.widths[l];
                st.height = grain;
                st.group = int(g);
                st.level = int(l);
                st.followsPrevious = u > 0;
                fill_options(st);
                cx.steps.push_back(std::move(st));
            }
    }

    // cells between every point where some height can change
    std::vector<Scalar> marks{Scalar(0), D};
    for (const Scalar& p : cx.points) marks.push_back(p);
    for (size_t k : cx.cls.tall) marks.push_back(cx.base.end(k));
    for (const Step& st : cx.steps)
        for (size_t i : st.options) marks.push_back(cx.points[i] + st.width);
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
    auto cell = [&](const Scalar& t) { return size_t(std::lower_bound(marks.begin(), marks.end(), t) - marks.begin()); };
    cx.baseCells.assign(marks.size() - 1, Scalar(0));
    for (size_t k : cx.cls.tall)
        for (size_t c = cell(cx.base.start(k)); c < cell(cx.base.end(k)); ++c) cx.baseCells[c] += cx.cls.roundedHeight[k];
    for (Step& st : cx.steps)
        for (size_t i : st.options) st.cells.emplace_back(cell(cx.points[i]), cell(cx.points[i] + st.width));

    for (const HorizontalGroup& grp : cx.hr.groups) {
        Scalar lim = Scalar((1L << grp.k) - 1) / cx.acc.inner;
        cx.groupStartLimit.push_back(floor_of(lim).get_num().get_si());
    }
}

}  // namespace

NeatResult enumerate_neat(const InstancePtr& inst, const Scalar& H, const NeatAccuracy& acc, const EnumLimits& limits) {
    NeatResult res;
    const Scalar HLB = lower_bound(*inst);
    if (inst->items.empty()) {
        res.status = NeatStatus::Found;
        res.packing = Packing(inst);
        return res;
    }
    if (H < HLB || H > 2 * HLB) throw InputError("H must lie in [H_LB, 2 H_LB]");

    Context cx;
    cx.inst = inst;
    cx.H = H;
    cx.acc = acc;
    cx.cls = classify(*inst, H, acc);
    cx.base = Packing(inst);
    if (total_width(cx.base, cx.cls.tall) > inst->deadline) return res;
    pack_adjacent(cx.base, cx.cls.tall, 0);
    cx.gate = (Scalar(3, 2) + 7 * acc.inner) * H;
    for (size_t k : cx.cls.tall)
        if (cx.cls.roundedHeight[k] > cx.gate) return res;

    cx.hr = round_horizontal(*inst, cx.cls, acc);
    cx.points = start_points(*inst, cx.cls, cx.hr, acc, limits.cap);
    res.startPoints = cx.points.size();
    if (cx.points.size() > limits.cap) {
        res.status = NeatStatus::BudgetExceeded;
        res.configurations = limits.cap + 1;
        return res;
    }
    build_steps(cx);

    const size_t branches = cx.steps.empty() ? 1 : cx.steps[0].options.size();
    struct Outcome {
        bool ran = false, exceeded = false;
        std::uint64_t nodes = 0;
        std::optional<Packing> packing;
    };
    std::vector<Outcome> outcome(branches);

    auto settle = [&]() {
        // Replays the branches in order; the result is what a serial run would see.
        std::uint64_t used = 0;
        for (size_t b = 0; b < branches; ++b) {
            Outcome& o = outcome[b];
            if (!o.ran) return false;
            if (o.exceeded || used + o.nodes > limits.cap) {
                res.status = NeatStatus::BudgetExceeded;
                res.configurations = limits.cap + 1;
                return true;
            }
            used += o.nodes;
            if (o.packing) {
                res.status = NeatStatus::Found;
                res.packing = std::move(o.packing);
                res.configurations = used;
                return true;
            }
        }
        res.status = NeatStatus::NotFound;
        res.configurations = used;
        return true;
    };

    if (limits.parallelism <= 1 || branches <= 1) {
        std::uint64_t used = 0;
        for (size_t b = 0; b < branches; ++b) {
            Search s(cx, limits.cap - used);
            s.run(b);
            outcome[b] = {true, s.exceeded(), s.nodes(), std::move(s.found())};
            if (s.exceeded() || s.found()) break;
            used += s.nodes();
        }
        for (Outcome& o : outcome)
            if (!o.ran) o.ran = true;  // never reached by the replay
        settle();
        return res;
    }

    std::atomic<size_t> next{0};
    std::atomic<size_t> firstHit{SIZE_MAX};
    auto worker = [&]() {
        for (size_t b = next++; b < branches; b = next++) {
            if (b > firstHit.load()) {
                outcome[b].ran = true;
                continue;
            }
            Search s(cx, limits.cap);
            s.run(b);
            outcome[b] = {true, s.exceeded(), s.nodes(), std::move(s.found())};
            if (outcome[b].packing || outcome[b].exceeded) {
                size_t cur = firstHit.load();
                while (b < cur && !firstHit.compare_exchange_weak(cur, b)) {
                }
            }
        }
    };
    std::vector<std::thread> pool;
    int workers = std::min<int>(limits.parallelism, int(branches));
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    settle();
    return res;
}

}  // namespace dsp
