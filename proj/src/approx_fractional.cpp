#include "dsp/approx.hpp"
#include "dsp/steinberg.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

namespace dsp {

NeatAccuracy NeatAccuracy::make(const Scalar& inner, const Scalar& target) {
    if (inner <= 0 || inner > 1 || !is_integer(Scalar(1 / inner)))
        throw InputError("inner accuracy must be 1/m for a positive integer m");
    if (target <= 0) throw InputError("target accuracy must be positive");
    NeatAccuracy a;
    a.inner = inner;
    a.target = target;
    a.narrowShare = target / (1 + target);
    a.groups = 1;
    Scalar reach(1, 2);  // D / 2^groups in units of D
    while (reach > a.narrowShare) {
        reach /= 2;
        ++a.groups;
    }
    a.flatShare = inner * inner * inner / a.groups;
    return a;
}

long NeatAccuracy::slices() const {
    Scalar m = 1 / inner;
    return m.get_num().get_si();
}

Classification classify(const Instance& inst, const Scalar& H, const NeatAccuracy& acc) {
    Classification c;
    c.H = H;
    c.lowerBound = lower_bound(inst);
    const Scalar& D = inst.deadline;
    const size_t n = inst.items.size();
    c.cls.resize(n);
    c.roundedHeight.resize(n);
    c.group.assign(n, 0);
    const Scalar step = acc.inner * c.lowerBound;
    const Scalar flat = acc.flatShare * c.lowerBound;
    for (size_t k = 0; k < n; ++k) {
        const Item& it = inst.items[k];
        c.roundedHeight[k] = it.height;
        if (is_tall(it, H)) {
            c.cls[k] = ItemClass::Tall;
            if (step > 0) c.roundedHeight[k] = step * ceil_of(it.height / step);
            c.tall.push_back(k);
        } else if (it.width <= acc.narrowShare * D) {
            c.cls[k] = ItemClass::Squeezable;
            c.squeezable.push_back(k);
        } else if (it.height <= flat) {
            c.cls[k] = ItemClass::Horizontal;
            int g = 1;
            Scalar edge = D / 2;
            while (it.width <= edge) {
                edge /= 2;
                ++g;
            }
            c.group[k] = g;
            c.horizontal.push_back(k);
        } else {
            c.cls[k] = ItemClass::Large;
            c.large.push_back(k);
        }
    }
    return c;
}

HorizontalRounding round_horizontal(const Instance& inst, const Classification& cls, const NeatAccuracy& acc) {
    HorizontalRounding hr;
    hr.groups.resize(acc.groups);
    for (int g = 0; g < acc.groups; ++g) hr.groups[g].k = g + 1;
    for (size_t k : cls.horizontal) hr.groups.at(cls.group[k] - 1).members.push_back(k);

    const long L = acc.slices();
    for (HorizontalGroup& grp : hr.groups) {
        if (grp.members.empty()) continue;
        std::sort(grp.members.begin(), grp.members.end(), [&](size_t a, size_t b) {
            const Item &x = inst.items[a], &y = inst.items[b];
            if (x.width != y.width) return x.width > y.width;
            return x.id < y.id;
        });
        grp.total = 0;
        for (size_t k : grp.members) grp.total += inst.items[k].height;
        grp.unit = acc.inner * grp.total;
        grp.widths.resize(L);
        grp.slices.resize(L);

        // stack bottoms: member j covers [below[j], below[j] + h)
        std::vector<Scalar> below(grp.members.size());
        Scalar run = 0;
        for (size_t j = 0; j < grp.members.size(); ++j) {
            below[j] = run;
            run += inst.items[grp.members[j]].height;
        }
        size_t j = 0;
        for (long l = 0; l < L; ++l) {
            Scalar line = grp.unit * l;
            while (below[j] + inst.items[grp.members[j]].height <= line) ++j;
            grp.widths[l] = inst.items[grp.members[j]].width;
        }
        for (size_t m = 0; m < grp.members.size(); ++m) {
            const Scalar& h = inst.items[grp.members[m]].height;
            Scalar lo = below[m], hi = below[m] + h;
            long first = floor_of(lo / grp.unit).get_num().get_si();
            for (long l = first; l < L; ++l) {
                Scalar a = max_of(lo, Scalar(grp.unit * l));
                Scalar b = min_of(hi, Scalar(grp.unit * (l + 1)));
                if (b <= a) break;
                Scalar part = b - a;
                grp.slices[l].push_back({grp.members[m], part, part == h});
            }
        }
    }
    return hr;
}

namespace {

Scalar piece_width(const HorizontalRounding& hr, const Fraction& f) { return hr.groups.at(f.group).widths.at(f.level); }
Scalar piece_height(const HorizontalRounding& hr, const Fraction& f) { return f.x * hr.groups.at(f.group).unit; }

std::vector<Block> blocks_of(const FractionalPacking& fp, const HorizontalRounding& hr,
                             std::optional<size_t> skipItem = std::nullopt,
                             std::optional<size_t> skipPart = std::nullopt) {
    std::vector<Block> out;
    const Packing& p = fp.integral;
    for (size_t k : p.assigned_items())
        if (k != skipItem) out.push_back({p.start(k), p.item(k).width, fp.height.at(k)});
    for (size_t j = 0; j < fp.parts.size(); ++j)
        if (j != skipPart) {
            const Fraction& f = fp.parts[j];
            out.push_back({f.start, piece_width(hr, f), piece_height(hr, f)});
        }
    return out;
}

std::string part_name(const Fraction& f) {
    return "copy of stand-in (" + std::to_string(f.group) + "," + std::to_string(f.level) + ") at " +
           to_string(f.start);
}

}  // namespace

HeightProfile fractional_profile(const FractionalPacking& fp, const HorizontalRounding& hr) {
    return profile_from(blocks_of(fp, hr), fp.integral.deadline());
}

Scalar fractional_peak(const FractionalPacking& fp, const HorizontalRounding& hr) {
    return fractional_profile(fp, hr).peak();
}

void merge_parts(std::vector<Fraction>& parts) {
    std::sort(parts.begin(), parts.end(), [](const Fraction& a, const Fraction& b) {
        return std::tie(a.group, a.level, a.start) < std::tie(b.group, b.level, b.start);
    });
    std::vector<Fraction> out;
    for (Fraction& f : parts) {
        if (!out.empty() && out.back().group == f.group && out.back().level == f.level && out.back().start == f.start)
            out.back().x += f.x;
        else
            out.push_back(std::move(f));
    }
    out.erase(std::remove_if(out.begin(), out.end(), [](const Fraction& f) { return f.x == 0; }), out.end());
    parts = std::move(out);
}

std::vector<std::string> fractional_violations(const FractionalPacking& fp, const HorizontalRounding& hr,
                                               bool complete) {
    std::vector<std::string> out;
    const Packing& p = fp.integral;
    const Scalar& D = p.deadline();
    for (size_t k : p.assigned_items())
        if (p.start(k) < 0 || p.end(k) > D) out.push_back("item " + p.item(k).id + " outside [0, D]");
    std::map<std::pair<int, int>, Scalar> sum;
    for (const Fraction& f : fp.parts) {
        if (f.group < 0 || f.group >= int(hr.groups.size()) || f.level < 0 ||
            f.level >= int(hr.groups[f.group].widths.size())) {
            out.push_back("copy refers to a missing stand-in");
            continue;
        }
        if (f.x <= 0) out.push_back(part_name(f) + " has non-positive amount");
        if (f.start < 0 || f.start + piece_width(hr, f) > D) out.push_back(part_name(f) + " outside [0, D]");
        sum[{f.group, f.level}] += f.x;
    }
    if (complete)
        for (size_t g = 0; g < hr.groups.size(); ++g)
            for (size_t l = 0; l < hr.groups[g].widths.size(); ++l) {
                Scalar s = sum[{int(g), int(l)}];
                if (s != 1)
                    out.push_back("stand-in (" + std::to_string(g) + "," + std::to_string(l) + ") covered " +
                                  to_string(s) + " times");
            }
    return out;
}

FractionalPacking integral_to_fractional(const Packing& integral, const Classification& cls,
                                         const HorizontalRounding& hr, const NeatAccuracy& acc) {
    FractionalPacking fp{integral, {}, {}};
    for (size_t k : cls.horizontal) {
        if (!integral.assigned(k)) throw InputError("horizontal item " + integral.item(k).id + " is unassigned");
        fp.integral.unset(k);
    }
    for (size_t k = 0; k < integral.base_size(); ++k) fp.height.push_back(integral.item(k).height);

    const Scalar& D = integral.deadline();
    const Scalar strip = 4 * acc.inner * cls.lowerBound;
    std::vector<Item> pieces;
    std::vector<std::pair<int, Scalar>> pieceOf;  // group, share
    for (size_t g = 0; g < hr.groups.size(); ++g) {
        const HorizontalGroup& grp = hr.groups[g];
        if (grp.members.empty()) continue;
        long m = std::max<long>(1, ceil_of(grp.unit / strip).get_num().get_si());
        for (long j = 0; j < m; ++j) {
            pieces.push_back({std::to_string(g) + "/" + std::to_string(j), grp.widths[0], grp.unit / m});
            pieceOf.emplace_back(int(g), Scalar(1, m));
        }
    }
    GeomPacking flat = steinberg_pack_box(pieces, D, strip);
    for (size_t j = 0; j < pieces.size(); ++j)
        fp.parts.push_back({flat.at[j].x, pieceOf[j].second, pieceOf[j].first, 0});

    const long L = acc.slices();
    for (size_t g = 0; g < hr.groups.size(); ++g) {
        const HorizontalGroup& grp = hr.groups[g];
        if (grp.members.empty()) continue;
        for (long l = 0; l + 1 < L; ++l)
            for (const SlicePart& sp : grp.slices[l])
                fp.parts.push_back({integral.start(sp.item), sp.height / grp.unit, int(g), int(l + 1)});
    }
    merge_parts(fp.parts);
    return fp;
}

namespace {

size_t distinct_starts(const std::vector<Fraction>& parts, int group) {
    std::set<Scalar> s;
    for (const Fraction& f : parts)
        if (f.group == group) s.insert(f.start);
    return s.size();
}

Scalar start_limit(int k, const NeatAccuracy& acc) { return Scalar((1L << k) - 1) / acc.inner; }

}  // namespace

IntegralResult fractional_to_integral(const FractionalPacking& fp, const Classification& cls,
                                      const HorizontalRounding& hr, const NeatAccuracy& acc) {
    for (size_t g = 0; g < hr.groups.size(); ++g)
        if (Scalar(long(distinct_starts(fp.parts, int(g)))) > start_limit(hr.groups[g].k, acc))
            throw InputError("group " + std::to_string(g) + " uses too many distinct starts");

    IntegralResult res{fp.integral, {}};
    std::vector<Fraction> parts = fp.parts;
    merge_parts(parts);  // sorted by group, level, start
    size_t j = 0;
    for (size_t g = 0; g < hr.groups.size(); ++g) {
        const HorizontalGroup& grp = hr.groups[g];
        for (size_t l = 0; l < grp.slices.size(); ++l) {
            std::vector<size_t> line;
            for (const SlicePart& sp : grp.slices[l])
                if (sp.whole) line.push_back(sp.item);
            size_t next = 0;
            for (; j < parts.size() && parts[j].group == int(g) && parts[j].level == int(l); ++j) {
                Scalar room = piece_height(hr, parts[j]);
                while (next < line.size() && res.packing.item(line[next]).height <= room) {
                    room -= res.packing.item(line[next]).height;
                    res.packing.set(line[next++], parts[j].start);
                }
            }
        }
    }
    for (size_t k : cls.horizontal)
        if (!res.packing.assigned(k)) res.leftover.push_back(k);
    return res;
}

namespace {

void require_reducible(const FractionalPacking& fp, const Classification& cls) {
    const Packing& p = fp.integral;
    for (size_t k : cls.squeezable)
        if (p.assigned(k)) throw InputError("squeezable items must be unassigned");
    for (size_t k : cls.horizontal)
        if (p.assigned(k)) throw InputError("horizontal items must be stand-in copies");
    for (size_t k : cls.large)
        if (!p.assigned(k)) throw InputError("large item " + p.item(k).id + " is unassigned");
    ItemSet tall = cls.tall;
    for (size_t k : tall)
        if (!p.assigned(k)) throw InputError("tall item " + p.item(k).id + " is unassigned");
    std::sort(tall.begin(), tall.end(), [&](size_t a, size_t b) { return p.start(a) < p.start(b); });
    Scalar at = 0;
    for (size_t j = 0; j < tall.size(); ++j) {
        if (p.start(tall[j]) != at) throw InputError("tall items are not back to back from 0");
        if (j > 0 && p.item(tall[j]).height > p.item(tall[j - 1]).height)
            throw InputError("tall items are not in non-increasing height order");
        at = p.end(tall[j]);
    }
}

// Earliest start in [0, latest] where `others` stays within `room` under a width-w piece.
Scalar earliest_fit(const HeightProfile& others, const Scalar& w, const Scalar& room, const Scalar& latest) {
    std::vector<Scalar> cand{Scalar(0)};
    for (const Scalar& b : others.breaks)
        if (b > 0 && b < latest) cand.push_back(b);
    std::sort(cand.begin(), cand.end());
    for (const Scalar& c : cand)
        if (others.max_on(c, c + w) <= room) return c;
    return latest;
}

void left_shift(FractionalPacking& st, const Classification& cls, const HorizontalRounding& hr) {
    const Scalar bound = fractional_peak(st, hr);
    const Packing& p = st.integral;
    // (start, kind, tie) with kind 0 for large items and 1 for copies
    std::vector<std::tuple<Scalar, int, size_t>> order;
    for (size_t k : cls.large) order.emplace_back(p.start(k), 0, k);
    for (size_t j = 0; j < st.parts.size(); ++j) order.emplace_back(st.parts[j].start, 1, j);
    std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
        if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
        if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
        if (std::get<1>(a) == 0) return p.item(std::get<2>(a)).id < p.item(std::get<2>(b)).id;
        const Fraction &x = st.parts[std::get<2>(a)], &y = st.parts[std::get<2>(b)];
        return std::tie(x.group, x.level) < std::tie(y.group, y.level);
    });
    for (const auto& [s, kind, idx] : order) {
        if (kind == 0) {
            HeightProfile others = profile_from(blocks_of(st, hr, idx), p.deadline());
            const Item& it = p.item(idx);
            st.integral.set(idx, earliest_fit(others, it.width, bound - st.height[idx], p.start(idx)));
        } else {
            HeightProfile others = profile_from(blocks_of(st, hr, std::nullopt, idx), p.deadline());
            Fraction& f = st.parts[idx];
            f.start = earliest_fit(others, piece_width(hr, f), bound - piece_height(hr, f), f.start);
        }
    }
    merge_parts(st.parts);
}

// Within each segment of width D / 2^k the copies are stacked by start and cut into
// 1/inner layers. The bottom layer is spread over the points r D / 2^(k-1); every
// other layer moves to the latest start of the layer below it.
void regroup(FractionalPacking& st, const HorizontalRounding& hr, const NeatAccuracy& acc) {
    const Scalar& D = st.integral.deadline();
    const long L = acc.slices();
    std::vector<Fraction> out;
    for (size_t g = 0; g < hr.groups.size(); ++g) {
        const int k = hr.groups[g].k;
        const Scalar seg = D / Scalar(1L << k);
        const long spread = 1L << (k - 1);
        std::map<long, std::vector<Fraction>> bySegment;
        for (const Fraction& f : st.parts)
            if (f.group == int(g)) bySegment[floor_of(f.start / seg).get_num().get_si()].push_back(f);
        for (auto& entry : bySegment) {
            std::vector<Fraction>& F = entry.second;
            std::stable_sort(F.begin(), F.end(), [](const Fraction& a, const Fraction& b) {
                return std::tie(a.start, a.level) < std::tie(b.start, b.level);
            });
            Scalar total = 0;
            for (const Fraction& f : F) total += f.x;
            const Scalar layer = total * acc.inner;
            Scalar filled = 0;   // amount stacked so far
            Scalar target = 0;   // start for the current layer
            Scalar lastStart = 0;  // latest start seen in the current layer
            long current = 1;
            for (const Fraction& f : F) {
                Scalar left = f.x;
                while (left > 0) {
                    Scalar cap = layer * current - filled;
                    Scalar take = min_of(left, cap);
                    if (current == 1) {
                        for (long r = 0; r < spread; ++r)
                            out.push_back({D * r / spread, take / spread, f.group, f.level});
                    } else {
                        out.push_back({target, take, f.group, f.level});
                    }
                    lastStart = f.start;
                    filled += take;
                    left -= take;
                    if (filled == layer * current && current < L) {
                        ++current;
                        target = lastStart;
                    }
                }
            }
        }
    }
    st.parts = std::move(out);
    merge_parts(st.parts);
}

}  // namespace

ReduceResult reduce_starting_times(const FractionalPacking& fp, const Classification& cls,
                                   const HorizontalRounding& hr, const NeatAccuracy& acc) {
    require_reducible(fp, cls);
    {
        std::vector<std::string> bad = fractional_violations(fp, hr, true);
        if (!bad.empty()) throw InputError("fractional packing: " + bad.front());
    }
    ReduceResult r;
    r.roundedTall = fp;
    for (size_t k : cls.tall) r.roundedTall.height[k] = cls.roundedHeight[k];

    FractionalPacking st = r.roundedTall;
    left_shift(st, cls, hr);
    regroup(st, hr, acc);
    r.regrouped = st;

    const Scalar grain = acc.flatShare * cls.lowerBound;
    r.deficit.resize(hr.groups.size());
    std::vector<Fraction> kept;
    for (const Fraction& f : st.parts) {
        const Scalar& unit = hr.groups[f.group].unit;
        Scalar h = f.x * unit;
        Scalar keep = grain > 0 ? grain * floor_of(h / grain) : h;
        Scalar xKeep = keep / unit;
        if (xKeep > 0) kept.push_back({f.start, xKeep, f.group, f.level});
        if (xKeep < f.x) r.deficit[f.group].push_back({f.start, f.x - xKeep, f.group, f.level});
    }
    st.parts = std::move(kept);
    r.reduced = std::move(st);
    return r;
}

std::vector<Scalar> start_points(const Instance& inst, const Classification& cls, const HorizontalRounding& hr,
                                 const NeatAccuracy& acc, size_t cap) {
    const Scalar& D = inst.deadline;
    std::set<Scalar> pts{Scalar(0)};
    ItemSet tall = cls.tall;
    std::sort(tall.begin(), tall.end(), [&](size_t a, size_t b) {
        const Item &x = inst.items[a], &y = inst.items[b];
        if (x.height != y.height) return x.height > y.height;
        return x.id < y.id;
    });
    Scalar at = 0;
    for (size_t k : tall) {
        at += inst.items[k].width;
        if (at <= D) pts.insert(at);
    }
    std::set<Scalar> widths;
    for (size_t k : cls.large) widths.insert(inst.items[k].width);
    for (const HorizontalGroup& g : hr.groups)
        if (!g.members.empty()) widths.insert(g.widths.begin(), g.widths.end());

    const long rounds = floor_of(1 / acc.narrowShare).get_num().get_si();
    std::set<Scalar> frontier = pts;
    for (long r = 0; r < rounds && !frontier.empty() && pts.size() <= cap; ++r) {
        std::set<Scalar> next;
        for (const Scalar& p : frontier)
            for (const Scalar& w : widths) {
                Scalar q = p + w;
                if (q > D) break;
                if (pts.insert(q).second) next.insert(q);
                if (pts.size() > cap) break;
            }
        frontier = std::move(next);
    }
    for (const HorizontalGroup& g : hr.groups) {
        if (g.members.empty()) continue;
        long spread = 1L << (g.k - 1);
        for (long r = 0; r < spread; ++r) pts.insert(D * r / spread);
    }
    return {pts.begin(), pts.end()};
}

std::vector<std::string> reduce_violations(const FractionalPacking& input, const ReduceResult& r,
                                           const Classification& cls, const HorizontalRounding& hr,
                                           const NeatAccuracy& acc) {
    std::vector<std::string> out;
    const Packing& p = r.reduced.integral;
    const Scalar& D = p.deadline();
    const Scalar& HLB = cls.lowerBound;

    // tall stair
    ItemSet tall = cls.tall;
    std::sort(tall.begin(), tall.end(), [&](size_t a, size_t b) { return p.start(a) < p.start(b); });
    Scalar at = 0;
    for (size_t j = 0; j < tall.size(); ++j) {
        if (!p.assigned(tall[j]) || p.start(tall[j]) != at) {
            out.push_back("tall items not back to back from 0");
            break;
        }
        if (j > 0 && p.item(tall[j]).height > p.item(tall[j - 1]).height) {
            out.push_back("tall items not sorted by height");
            break;
        }
        at = p.end(tall[j]);
    }

    // starts of large items and copies
    std::vector<Scalar> ptsV = start_points(p.instance(), cls, hr, acc);
    std::set<Scalar> pts(ptsV.begin(), ptsV.end());
    std::set<Scalar> used;
    for (const FractionalPacking* fp : {&r.regrouped, &r.reduced}) {
        for (size_t k : cls.large) {
            if (!fp->integral.assigned(k)) continue;
            const Scalar& s = fp->integral.start(k);
            used.insert(s);
            if (!pts.count(s)) out.push_back("large item " + p.item(k).id + " starts off the candidate set");
        }
        for (const Fraction& f : fp->parts) {
            used.insert(f.start);
            if (!pts.count(f.start)) out.push_back(part_name(f) + " starts off the candidate set");
        }
    }
    {
        Scalar base = 2 / (acc.narrowShare * acc.flatShare);
        long e = floor_of(1 / acc.narrowShare).get_num().get_si();
        Scalar limit = 1;
        for (long j = 0; j < e; ++j) limit *= base;
        if (Scalar(long(used.size())) > limit) out.push_back("too many distinct starts");
    }

    // per-group start counts and height grain
    const Scalar grain = acc.flatShare * HLB;
    for (size_t g = 0; g < hr.groups.size(); ++g)
        if (Scalar(long(distinct_starts(r.regrouped.parts, int(g)))) > start_limit(hr.groups[g].k, acc))
            out.push_back("group " + std::to_string(g) + " uses too many distinct starts");
    for (const Fraction& f : r.reduced.parts) {
        Scalar h = piece_height(hr, f);
        if (grain > 0 && !is_integer(Scalar(h / grain)))
            out.push_back(part_name(f) + " height " + to_string(h) + " is not a multiple of flatShare * H_LB");
    }

    // only stand-ins are fractional
    for (size_t k = 0; k < p.base_size(); ++k) {
        bool horiz = cls.cls[k] == ItemClass::Horizontal;
        bool sq = cls.cls[k] == ItemClass::Squeezable;
        if (horiz && p.assigned(k)) out.push_back("horizontal item " + p.item(k).id + " is integral");
        if (!horiz && !sq && !p.assigned(k)) out.push_back("item " + p.item(k).id + " is missing");
    }

    for (const std::string& v : fractional_violations(r.regrouped, hr, true)) out.push_back("regrouped: " + v);
    for (const std::string& v : fractional_violations(r.reduced, hr, false)) out.push_back("reduced: " + v);
    {
        FractionalPacking sum = r.reduced;
        for (const auto& d : r.deficit) sum.parts.insert(sum.parts.end(), d.begin(), d.end());
        merge_parts(sum.parts);
        for (const std::string& v : fractional_violations(sum, hr, true)) out.push_back("reduced + deficit: " + v);
    }

    // removed area
    const Scalar areaCap = 2 * acc.flatShare / (acc.inner * acc.inner) * HLB * D;
    for (size_t g = 0; g < r.deficit.size(); ++g) {
        Scalar a = 0;
        for (const Fraction& f : r.deficit[g]) a += piece_height(hr, f) * piece_width(hr, f);
        if (a > areaCap)
            out.push_back("group " + std::to_string(g) + " deficit area " + to_string(a) + " exceeds " +
                          to_string(areaCap));
    }

    // heights
    Scalar h0 = fractional_peak(input, hr);
    Scalar h1 = fractional_peak(r.roundedTall, hr);
    Scalar h2 = fractional_peak(r.regrouped, hr);
    if (h1 > h0 + acc.inner * HLB)
        out.push_back("rounding tall heights raised the peak from " + to_string(h0) + " to " + to_string(h1));
    if (h2 > h1 + 2 * acc.inner * HLB)
        out.push_back("regrouping raised the peak from " + to_string(h1) + " to " + to_string(h2));
    if (fractional_peak(r.reduced, hr) > h2) out.push_back("cutting raised the peak");
    return out;
}

}  // namespace dsp
