#include "dsp/io.hpp"

#include <fstream>
#include <sstream>

namespace dsp {

Json scalar_to_json(const Scalar& x) {
    if (is_integer(x) && x.get_num().fits_slong_p()) return Json(x.get_num().get_si());
    return Json(to_string(x));
}

Scalar scalar_from_json(const Json& j, const std::string& what) {
    if (j.is_number_integer()) return Scalar(long(j.get<long long>()));
    if (j.is_string()) {
        try {
            return parse_scalar(j.get<std::string>());
        } catch (const std::exception& e) {
            throw InputError(what + ": " + e.what());
        }
    }
    throw InputError(what + " must be an integer or a \"p/q\" string");
}

Json instance_to_json(const Instance& inst) {
    Json items = Json::array();
    for (const Item& it : inst.items)
        items.push_back({{"id", it.id}, {"width", scalar_to_json(it.width)}, {"height", scalar_to_json(it.height)}});
    return {{"deadline", scalar_to_json(inst.deadline)}, {"items", items}};
}

namespace {

const Json& field(const Json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) throw InputError(where + " lacks \"" + key + "\"");
    return j.at(key);
}

}  // namespace

Instance instance_from_json(const Json& j) {
    Instance inst;
    inst.deadline = scalar_from_json(field(j, "deadline", "instance"), "deadline");
    const Json& items = field(j, "items", "instance");
    if (!items.is_array()) throw InputError("\"items\" must be an array");
    for (size_t k = 0; k < items.size(); ++k) {
        const Json& e = items[k];
        std::string where = "item " + std::to_string(k);
        Item it;
        if (e.is_object() && e.contains("id")) {
            if (!e.at("id").is_string()) throw InputError(where + ": id must be a string");
            it.id = e.at("id").get<std::string>();
        } else {
            it.id = std::to_string(k);
        }
        it.width = scalar_from_json(field(e, "width", where), where + " width");
        it.height = scalar_from_json(field(e, "height", where), where + " height");
        inst.items.push_back(std::move(it));
    }
    inst.validate();
    return inst;
}

Json packing_to_json(const Packing& p, const std::string& instancePath) {
    Json out;
    out["instance"] = instancePath.empty() ? instance_to_json(p.instance()) : Json(instancePath);
    Json starts = Json::object();
    for (size_t k : p.base_items())
        if (p.assigned(k)) starts[p.item(k).id] = scalar_to_json(p.start(k));
    out["starts"] = starts;
    Json extras = Json::array();
    for (size_t k = p.base_size(); k < p.size(); ++k) {
        const Item& it = p.item(k);
        Json e{{"id", it.id}, {"width", scalar_to_json(it.width)}, {"height", scalar_to_json(it.height)}};
        if (p.assigned(k)) e["start"] = scalar_to_json(p.start(k));
        extras.push_back(e);
    }
    out["extra_items"] = extras;
    out["peak"] = scalar_to_json(partial_profile(p).peak());
    return out;
}

bool looks_like_packing(const Json& j) { return j.is_object() && j.contains("starts"); }

Packing packing_from_json(const Json& j, const std::filesystem::path& baseDir) {
    const Json& ij = field(j, "instance", "packing");
    Instance inst = ij.is_string() ? instance_from_json(read_json_file(baseDir / ij.get<std::string>()))
                                   : instance_from_json(ij);
    Packing p(std::make_shared<const Instance>(std::move(inst)));
    const Json& starts = field(j, "starts", "packing");
    if (!starts.is_object()) throw InputError("\"starts\" must be an object");
    for (auto it = starts.begin(); it != starts.end(); ++it) {
        std::optional<size_t> k = p.find(it.key());
        if (!k) throw InputError("start given for unknown item " + it.key());
        p.set(*k, scalar_from_json(it.value(), "start of " + it.key()));
    }
    if (j.contains("extra_items")) {
        const Json& ex = j.at("extra_items");
        if (!ex.is_array()) throw InputError("\"extra_items\" must be an array");
        for (const Json& e : ex) {
            Item it;
            it.id = field(e, "id", "extra item").get<std::string>();
            it.width = scalar_from_json(field(e, "width", "extra item"), "extra width");
            it.height = scalar_from_json(field(e, "height", "extra item"), "extra height");
            if (it.width <= 0 || it.height <= 0) throw InputError("extra item " + it.id + " has non-positive size");
            if (p.find(it.id)) throw InputError("duplicate id " + it.id);
            size_t k = p.add_extra(it);
            if (e.contains("start")) p.set(k, scalar_from_json(e.at("start"), "start of " + it.id));
        }
    }
    return p;
}

SolverConfig config_from_json(const Json& j) {
    if (!j.is_object()) throw InputError("config must be a JSON object");
    SolverConfig c;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        const Json& v = it.value();
        auto count = [&](long lo) {
            if (!v.is_number_integer() || v.get<long long>() < lo)
                throw InputError("config \"" + key + "\" must be an integer >= " + std::to_string(lo));
            return v.get<long long>();
        };
        if (key == "epsilon")
            c.eps = scalar_from_json(v, "epsilon");
        else if (key == "c")
            c.c = long(count(1));
        else if (key == "enum_cap")
            c.enumCap = std::uint64_t(count(1));
        else if (key == "parallelism")
            c.parallelism = int(count(1));
        else
            throw InputError("unknown config key \"" + key + "\"");
    }
    return c;
}

Json report_to_json(const SolveReport& r) {
    Json probes = Json::array();
    for (const Probe& p : r.probes)
        probes.push_back({{"H", scalar_to_json(p.H)}, {"status", to_string(p.status)}, {"configurations", p.configurations}});
    return {{"branch", r.branch},
            {"epsilon_inner", scalar_to_json(r.inner)},
            {"lambda", scalar_to_json(r.lambda)},
            {"lower_bound", scalar_to_json(r.lowerBound)},
            {"forgiving_peak", scalar_to_json(r.forgivingPeak)},
            {"neat_peak", r.neatPeak ? scalar_to_json(*r.neatPeak) : Json(nullptr)},
            {"fallback_peak", scalar_to_json(r.fallbackPeak)},
            {"probes", probes},
            {"configurations", r.configurations},
            {"budget_exceeded", r.budgetExceeded}};
}

Json outcome_to_json(const RestructureOutcome& out) {
    const Packing& p = out.packing;
    Json geometry = Json::object();
    for (const auto& [k, v] : out.context.geometry) geometry[k] = scalar_to_json(v);
    Json sets = Json::object();
    for (const auto& [k, items] : out.context.sets) {
        Json ids = Json::array();
        for (size_t i : items) ids.push_back(p.item(i).id);
        sets[k] = ids;
    }
    return {{"kind", out.kind == OutcomeKind::Neat ? "neat" : "forgiving"},
            {"caseTrace", out.caseTrace},
            {"case", out.context.trace()},
            {"opt", scalar_to_json(out.context.opt)},
            {"extra", out.extra ? Json(p.item(*out.extra).id) : Json(nullptr)},
            {"geometry", geometry},
            {"sets", sets},
            {"packing", packing_to_json(p)}};
}

Json ratio_to_json(const RatioReport& r) {
    return {{"pass", r.pass},
            {"feasible", r.feasible},
            {"violations", r.violations},
            {"opt", scalar_to_json(r.opt)},
            {"achieved", scalar_to_json(r.achieved)},
            {"ratio", scalar_to_json(r.ratio)},
            {"bound", scalar_to_json(r.bound)},
            {"opt_source", r.optSource}};
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace dsp
