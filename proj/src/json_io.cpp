#include "hazopwb/json_io.hpp"

#include <fstream>
#include <set>

namespace hazopwb {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& context, const std::string& what) {
    throw ParseError(context + ": " + what);
}

// Strict member access: every key must be consumed; leftovers are errors.
class Obj {
public:
    Obj(const json& j, std::string context) : j_(j), context_(std::move(context)) {
        if (!j_.is_object()) fail(context_, "expected an object");
    }

    const json* find(const std::string& key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() || it->is_null() ? nullptr : &*it;
    }

    const json& require(const std::string& key) {
        const json* v = find(key);
        if (!v) fail(context_, "missing required key '" + key + "'");
        return *v;
    }

    std::string require_string(const std::string& key) {
        const json& v = require(key);
        if (!v.is_string()) fail(context_, "'" + key + "' must be a string");
        return v.get<std::string>();
    }

    std::string string_or(const std::string& key, const std::string& fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_string()) fail(context_, "'" + key + "' must be a string");
        return v->get<std::string>();
    }

    double require_number(const std::string& key) {
        const json& v = require(key);
        if (!v.is_number()) fail(context_, "'" + key + "' must be a number");
        return v.get<double>();
    }

    double number_or(const std::string& key, double fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_number()) fail(context_, "'" + key + "' must be a number");
        return v->get<double>();
    }

    int int_or(const std::string& key, int fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_number_integer()) fail(context_, "'" + key + "' must be an integer");
        return v->get<int>();
    }

    bool bool_or(const std::string& key, bool fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_boolean()) fail(context_, "'" + key + "' must be a boolean");
        return v->get<bool>();
    }

    std::vector<std::string> string_list_or(const std::string& key) {
        std::vector<std::string> out;
        const json* v = find(key);
        if (!v) return out;
        if (!v->is_array()) fail(context_, "'" + key + "' must be an array");
        for (const auto& item : *v) {
            if (!item.is_string()) fail(context_, "'" + key + "' entries must be strings");
            out.push_back(item.get<std::string>());
        }
        return out;
    }

    const std::string& context() const { return context_; }

    void finish() {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) fail(context_, "unknown key '" + it.key() + "'");
        }
    }

private:
    const json& j_;
    std::string context_;
    std::set<std::string> seen_;
};

const json& payload(const json& doc, const std::string& key, const std::string& context) {
    if (!doc.is_object()) fail(context, "expected a JSON object document");
    auto sv = doc.find("schema_version");
    if (sv == doc.end() || !sv->is_string() || sv->get<std::string>() != "1")
        fail(context, "schema_version must be the string \"1\"");
    auto it = doc.find(key);
    if (it == doc.end()) fail(context, "missing top-level '" + key + "'");
    return *it;
}

Guideword parse_guideword_or_fail(const std::string& text, const std::string& context) {
    auto g = parse_guideword(text);
    if (!g) fail(context, "unknown guideword '" + text + "'");
    return *g;
}

TargetClass parse_class_or_fail(const std::string& text, const std::string& context) {
    auto c = parse_target_class(text);
    if (!c) fail(context, "unknown target class '" + text + "'");
    return *c;
}

// --- model ----------------------------------------------------------------

Parameter parse_parameter(const json& j, const std::string& context) {
    Obj o(j, context);
    Parameter p;
    p.id = o.require_string("id");
    p.name = o.require_string("name");
    const std::string kind = o.require_string("kind");
    auto parsed_kind = parse_parameter_kind(kind);
    if (!parsed_kind) fail(context, "unknown parameter kind '" + kind + "'");
    p.kind = *parsed_kind;
    p.unit = o.require_string("unit");
    if (const json* range = o.find("physical_range")) {
        if (!range->is_array() || range->size() != 2 || !(*range)[0].is_number() ||
            !(*range)[1].is_number())
            fail(context, "'physical_range' must be [min, max]");
        p.physical_range = Interval{(*range)[0].get<double>(), (*range)[1].get<double>()};
    }
    p.sign_meaningful = o.bool_or("sign_meaningful", false);
    if (const json* q = o.find("quantity")) {
        if (!q->is_string()) fail(context, "'quantity' must be a string");
        if (!parse_quantity(q->get<std::string>()))
            fail(context, "unknown quantity '" + q->get<std::string>() + "'");
        p.quantity = q->get<std::string>();
    }
    o.finish();
    return p;
}

Function parse_function(const json& j, const std::string& context) {
    Obj o(j, context);
    Function fn;
    fn.id = o.require_string("id");
    fn.name = o.require_string("name");
    if (const json* params = o.find("parameters")) {
        if (!params->is_array()) fail(context, "'parameters' must be an array");
        for (const auto& p : *params)
            fn.parameters.push_back(parse_parameter(p, context + ".parameters"));
    }
    fn.implementations = o.string_list_or("implementations");
    o.finish();
    return fn;
}

Capability parse_capability(const json& j, const std::string& context) {
    Obj o(j, context);
    Capability cap;
    cap.id = o.require_string("id");
    cap.name = o.require_string("name");
    for (const auto& c : o.string_list_or("controls")) {
        auto control = parse_control(c);
        if (!control) fail(context, "unknown control '" + c + "'");
        cap.controls.push_back(*control);
    }
    if (const json* fns = o.find("functions")) {
        if (!fns->is_array()) fail(context, "'functions' must be an array");
        for (const auto& f : *fns) {
            if (f.is_string()) {
                cap.function_refs.push_back(f.get<std::string>());
            } else {
                cap.functions.push_back(parse_function(f, context + ".functions"));
            }
        }
    }
    o.finish();
    return cap;
}

Service parse_service(const json& j, const std::string& context) {
    Obj o(j, context);
    Service svc;
    svc.id = o.require_string("id");
    svc.name = o.require_string("name");
    const json& level = o.require("level");
    if (!level.is_number_integer()) fail(context, "'level' must be an integer");
    svc.level = level.get<int>();
    svc.sub_services = o.string_list_or("sub_services");
    if (const json* caps = o.find("capabilities")) {
        if (!caps->is_array()) fail(context, "'capabilities' must be an array");
        for (const auto& c : *caps) {
            if (c.is_string()) {
                svc.capability_refs.push_back(c.get<std::string>());
            } else {
                svc.capabilities.push_back(parse_capability(c, context + ".capabilities"));
            }
        }
    }
    o.finish();
    return svc;
}

} // namespace

SystemModel model_from_json(const json& doc, const std::string& context) {
    const json& m = payload(doc, "model", context);
    Obj o(m, context + ".model");
    SystemModel model;
    model.id = o.require_string("id");
    if (const json* services = o.find("services")) {
        if (!services->is_array()) fail(context, "'services' must be an array");
        for (const auto& s : *services)
            model.services.push_back(parse_service(s, context + ".services"));
    }
    if (const json* impls = o.find("implementations")) {
        if (!impls->is_array()) fail(context, "'implementations' must be an array");
        for (const auto& i : *impls) {
            Obj io(i, context + ".implementations");
            Implementation impl;
            impl.id = io.require_string("id");
            impl.name = io.require_string("name");
            impl.data_sources = io.string_list_or("data_sources");
            io.finish();
            model.implementations.push_back(std::move(impl));
        }
    }
    if (const json* sources = o.find("data_sources")) {
        if (!sources->is_array()) fail(context, "'data_sources' must be an array");
        for (const auto& d : *sources) {
            Obj dso(d, context + ".data_sources");
            DataSource ds;
            ds.id = dso.require_string("id");
            ds.name = dso.require_string("name");
            const std::string modality = dso.require_string("modality");
            auto parsed = parse_modality(modality);
            if (!parsed) fail(context, "unknown modality '" + modality + "'");
            ds.modality = *parsed;
            dso.finish();
            model.data_sources.push_back(std::move(ds));
        }
    }
    if (const json* meta = o.find("metadata")) {
        if (!meta->is_object()) fail(context, "'metadata' must be an object");
        for (auto it = meta->begin(); it != meta->end(); ++it) {
            if (!it.value().is_string()) fail(context, "metadata values must be strings");
            model.metadata[it.key()] = it.value().get<std::string>();
        }
    }
    o.finish();
    return model;
}

// --- use cases --------------------------------------------------------------

namespace {

std::vector<Step> parse_steps(const json& j, const std::string& context) {
    if (!j.is_array()) fail(context, "steps must be an array");
    std::vector<Step> steps;
    for (const auto& s : j) {
        Obj o(s, context);
        Step step;
        step.index = o.int_or("index", 0);
        step.action = o.require_string("action");
        o.finish();
        steps.push_back(std::move(step));
    }
    return steps;
}

UseCase parse_usecase(const json& j, const std::string& context) {
    Obj o(j, context);
    UseCase uc;
    uc.id = o.require_string("id");
    uc.title = o.string_or("title", "");
    uc.primary_environment = o.string_or("primary_environment", "");
    uc.goal_in_context = o.string_or("goal_in_context", "");
    uc.scope = o.string_or("scope", "");
    uc.pre_conditions = o.string_list_or("pre_conditions");
    uc.success_end_conditions = o.string_list_or("success_end_conditions");
    uc.failed_end_conditions = o.string_list_or("failed_end_conditions");
    uc.actors = o.string_list_or("actors");
    uc.trigger = o.string_or("trigger", "");
    if (const json* d = o.find("description")) uc.description = parse_steps(*d, context);
    if (const json* e = o.find("extension")) uc.extension = parse_steps(*e, context);
    o.finish();
    return uc;
}

} // namespace

std::vector<UseCase> usecases_from_json(const json& doc, const std::string& context) {
    const json& list = payload(doc, "usecases", context);
    if (!list.is_array()) fail(context, "'usecases' must be an array");
    std::vector<UseCase> out;
    for (const auto& u : list) out.push_back(parse_usecase(u, context + ".usecases"));
    return out;
}

// --- worksheet ----------------------------------------------------------------

Worksheet worksheet_from_json(const json& doc, const std::string& context) {
    const json& w = payload(doc, "worksheet", context);
    Obj o(w, context + ".worksheet");
    Worksheet ws;
    if (const json* uc = o.find("usecase_id")) {
        if (!uc->is_string()) fail(context, "'usecase_id' must be a string");
        ws.usecase_id = uc->get<std::string>();
    }
    if (const json* entries = o.find("entries")) {
        if (!entries->is_array()) fail(context, "'entries' must be an array");
        for (const auto& e : *entries) {
            Obj eo(e, context + ".entries");
            HazopEntry entry;
            entry.row_id = eo.require_string("row_id");
            entry.function_id = eo.require_string("function_id");
            entry.parameter_id = eo.require_string("parameter_id");
            entry.guideword =
                parse_guideword_or_fail(eo.require_string("guideword"), eo.context());
            if (const json* mode = eo.find("mode")) {
                if (!mode->is_string()) fail(context, "'mode' must be a string");
                entry.mode = mode->get<std::string>();
            }
            entry.deviation = eo.string_or("deviation", "");
            if (const json* hz = eo.find("hazard")) {
                if (!hz->is_string()) fail(context, "'hazard' must be a string");
                entry.hazard = hz->get<std::string>();
            }
            entry.situation = eo.string_or("situation", "");
            if (const json* cons = eo.find("consequences")) {
                if (!cons->is_string()) fail(context, "'consequences' must be a string");
                entry.consequences = cons->get<std::string>();
            }
            entry.causes = eo.string_list_or("causes");
            entry.dsrs = eo.string_list_or("dsrs");
            const std::string dispo = eo.string_or("disposition", "analysed");
            if (dispo == "analysed") {
                entry.disposition = Disposition::Analysed;
            } else if (dispo == "not_applicable") {
                entry.disposition = Disposition::NotApplicable;
            } else if (dispo == "same_as") {
                entry.disposition = Disposition::SameAs;
                entry.same_as = eo.require_string("same_as");
            } else {
                fail(context, "unknown disposition '" + dispo + "'");
            }
            if (entry.disposition != Disposition::SameAs) (void)eo.find("same_as");
            eo.finish();
            ws.entries.push_back(std::move(entry));
        }
    }
    if (const json* dsrs = o.find("dsrs")) {
        if (!dsrs->is_array()) fail(context, "'dsrs' must be an array");
        for (const auto& d : *dsrs) {
            Obj dso(d, context + ".dsrs");
            Dsr dsr;
            dsr.id = dso.require_string("id");
            dsr.text = dso.require_string("text");
            const std::string kind = dso.require_string("kind");
            auto parsed = parse_dsr_kind(kind);
            if (!parsed) fail(context, "unknown DSR kind '" + kind + "'");
            dsr.kind = *parsed;
            dsr.evidence_refs = dso.string_list_or("evidence_refs");
            dso.finish();
            ws.dsrs.push_back(std::move(dsr));
        }
    }
    o.finish();
    return ws;
}

nlohmann::json worksheet_to_json(const Worksheet& ws) {
    json entries = json::array();
    for (const auto& e : ws.entries) {
        json row;
        row["row_id"] = e.row_id;
        row["function_id"] = e.function_id;
        row["parameter_id"] = e.parameter_id;
        row["guideword"] = std::string(guideword_token(e.guideword));
        if (e.mode) row["mode"] = *e.mode;
        row["deviation"] = e.deviation;
        if (e.hazard) row["hazard"] = *e.hazard;
        row["situation"] = e.situation;
        if (e.consequences) row["consequences"] = *e.consequences;
        row["causes"] = e.causes;
        row["dsrs"] = e.dsrs;
        switch (e.disposition) {
        case Disposition::Analysed: row["disposition"] = "analysed"; break;
        case Disposition::NotApplicable: row["disposition"] = "not_applicable"; break;
        case Disposition::SameAs:
            row["disposition"] = "same_as";
            row["same_as"] = e.same_as;
            break;
        }
        entries.push_back(std::move(row));
    }
    json dsrs = json::array();
    for (const auto& d : ws.dsrs) {
        json item;
        item["id"] = d.id;
        item["text"] = d.text;
        item["kind"] = std::string(to_string(d.kind));
        item["evidence_refs"] = d.evidence_refs;
        dsrs.push_back(std::move(item));
    }
    json w;
    if (ws.usecase_id) w["usecase_id"] = *ws.usecase_id;
    w["entries"] = std::move(entries);
    w["dsrs"] = std::move(dsrs);
    return json{{"schema_version", "1"}, {"worksheet", std::move(w)}};
}

// --- scenario / injections -------------------------------------------------

namespace {

Target parse_target(const json& j, const std::string& context) {
    Obj o(j, context);
    Target target;
    target.cls = parse_class_or_fail(o.require_string("class"), context);
    target.initial_gap = o.require_number("initial_gap");
    target.v = o.number_or("v", 0.0);
    if (const json* lp = o.find("lateral_path")) {
        Obj po(*lp, context + ".lateral_path");
        LateralPath path;
        path.initial_offset = po.require_number("initial_offset");
        path.rate = po.require_number("rate");
        path.start_time = po.number_or("start_time", 0.0);
        po.finish();
        target.lateral_path = path;
    }
    o.finish();
    return target;
}

// Magnitude keys accepted per guideword; "window" is always allowed.
const std::set<std::string>& magnitude_keys(Guideword g) {
    static const std::map<Guideword, std::set<std::string>> keys = {
        {Guideword::NoOrNot, {}},
        {Guideword::More, {"delta", "count"}},
        {Guideword::Less, {"delta", "count"}},
        {Guideword::AsWellAs, {"spurious_target"}},
        {Guideword::PartOf, {"target_index"}},
        {Guideword::OtherThanInstead, {"from_class", "to_class"}},
        {Guideword::Reverse, {}},
        {Guideword::Early, {"shift"}},
        {Guideword::Late, {"delay"}},
        {Guideword::Intermittent, {"period", "duty", "from_class", "to_class"}},
    };
    return keys.at(g);
}

void parse_magnitude_fields(Obj& o, Guideword g, MagnitudeBlock& mag,
                            std::optional<Target>& spurious, const std::string& context) {
    const auto& allowed = magnitude_keys(g);
    auto allow = [&](const char* key) { return allowed.count(key) > 0; };
    if (allow("delta")) mag.delta = o.number_or("delta", mag.delta);
    if (allow("count")) mag.count = o.int_or("count", mag.count);
    if (allow("delay")) mag.delay = o.number_or("delay", mag.delay);
    if (allow("shift")) mag.shift = o.number_or("shift", mag.shift);
    if (allow("period")) mag.period = o.number_or("period", mag.period);
    if (allow("duty")) mag.duty = o.number_or("duty", mag.duty);
    if (allow("target_index")) mag.target_index = o.int_or("target_index", mag.target_index);
    if (allow("from_class"))
        mag.from_class = parse_class_or_fail(o.string_or("from_class", "pedestrian"), context);
    if (allow("to_class"))
        mag.to_class = parse_class_or_fail(o.string_or("to_class", "static"), context);
    if (allow("spurious_target")) {
        if (const json* sp = o.find("spurious_target")) {
            spurious = parse_target(*sp, context + ".spurious_target");
        }
    }
}

void parse_window(Obj& o, std::optional<double>& t_start, std::optional<double>& t_end,
                  const std::string& context) {
    if (const json* w = o.find("window")) {
        if (!w->is_array() || w->size() != 2 || !(*w)[0].is_number() ||
            (!(*w)[1].is_number() && !(*w)[1].is_null()))
            fail(context, "'window' must be [t_start, t_end|null]");
        t_start = (*w)[0].get<double>();
        if ((*w)[1].is_number()) t_end = (*w)[1].get<double>();
    }
}

} // namespace

ScenarioDoc scenario_from_json(const json& doc, const std::string& context) {
    ScenarioDoc out;
    const json& s = payload(doc, "scenario", context);
    Obj o(s, context + ".scenario");
    Scenario& sc = out.scenario;
    sc.usecase_id = o.require_string("usecase_id");
    sc.id = o.string_or("id", sc.usecase_id);
    sc.duration = o.require_number("duration");
    sc.dt = o.number_or("dt", 0.01);
    if (const json* road = o.find("road")) {
        if (!road->is_array()) fail(context, "'road' must be an array of segments");
        for (const auto& seg_json : *road) {
            Obj so(seg_json, context + ".road");
            Segment seg;
            seg.length = so.require_number("length");
            seg.curvature = so.number_or("curvature", 0.0);
            seg.lane_width = so.number_or("lane_width", 3.5);
            so.finish();
            sc.road.push_back(seg);
        }
    }
    {
        const json& ego = o.require("ego_init");
        Obj eo(ego, context + ".ego_init");
        sc.ego_init.v = eo.require_number("v");
        sc.ego_init.lateral_offset = eo.number_or("lateral_offset", 0.0);
        eo.finish();
    }
    if (const json* targets = o.find("targets")) {
        if (!targets->is_array()) fail(context, "'targets' must be an array");
        for (const auto& t : *targets)
            sc.targets.push_back(parse_target(t, context + ".targets"));
    }
    const json* seed = o.find("seed");
    if (seed) {
        if (!seed->is_number_unsigned()) fail(context, "'seed' must be a nonnegative integer");
        sc.seed = seed->get<std::uint64_t>();
    }
    o.finish();

    if (!doc.contains("channels")) return out;
    const json& channels = doc.at("channels");
    if (!channels.is_array()) fail(context, "'channels' must be an array");
    for (const auto& c : channels) {
        Obj co(c, context + ".channels");
        SensorChannel ch;
        ch.id = co.require_string("id");
        const std::string modality = co.require_string("source_modality");
        auto parsed_modality = parse_modality(modality);
        if (!parsed_modality ||
            (*parsed_modality != Modality::Camera && *parsed_modality != Modality::Radar))
            fail(context, "channel source_modality must be camera or radar");
        ch.source_modality = *parsed_modality;
        const std::string quantity = co.require_string("quantity");
        auto parsed_quantity = parse_quantity(quantity);
        if (!parsed_quantity) fail(context, "unknown quantity '" + quantity + "'");
        ch.quantity = *parsed_quantity;
        ch.latency = co.number_or("latency", 0.0);
        ch.noise_sd = co.number_or("noise_sd", 0.0);
        ch.range_max =
            co.number_or("range_max", ch.source_modality == Modality::Radar ? 150.0 : 80.0);
        ch.fov_check = co.bool_or("fov_check", true);
        if (ch.latency < 0.0) fail(context, "channel latency must be >= 0");
        if (ch.noise_sd < 0.0) fail(context, "channel noise_sd must be >= 0");
        co.finish();
        out.channels.push_back(std::move(ch));
    }
    return out;
}

std::vector<InjectionSpec> injections_from_json(const json& doc, const std::string& context) {
    const json& list = payload(doc, "injections", context);
    if (!list.is_array()) fail(context, "'injections' must be an array");
    std::vector<InjectionSpec> out;
    for (const auto& i : list) {
        Obj o(i, context + ".injections");
        InjectionSpec inj;
        inj.channel_id = o.require_string("channel_id");
        inj.guideword = parse_guideword_or_fail(o.require_string("guideword"), o.context());
        std::optional<double> t_start, t_end;
        parse_window(o, t_start, t_end, o.context());
        inj.t_start = t_start.value_or(0.0);
        inj.t_end = t_end;
        parse_magnitude_fields(o, inj.guideword, inj.magnitude, inj.spurious_target,
                               o.context());
        o.finish();
        out.push_back(std::move(inj));
    }
    return out;
}

// --- campaign ----------------------------------------------------------------

CampaignSpec campaign_from_json(const json& doc, const std::string& context) {
    const json& c = payload(doc, "campaign", context);
    Obj o(c, context + ".campaign");
    CampaignSpec spec;
    spec.model_ref = o.require_string("model_ref");
    spec.worksheet_ref = o.require_string("worksheet_ref");
    spec.scenario_refs = o.string_list_or("scenario_refs");
    if (spec.scenario_refs.empty()) fail(context, "campaign needs at least one scenario_ref");
    if (const json* grid = o.find("magnitude_grid")) {
        if (!grid->is_object()) fail(context, "'magnitude_grid' must be an object");
        for (auto it = grid->begin(); it != grid->end(); ++it) {
            const Guideword g = parse_guideword_or_fail(it.key(), context + ".magnitude_grid");
            if (!it.value().is_array())
                fail(context, "magnitude_grid entries must be arrays of blocks");
            for (const auto& block_json : it.value()) {
                Obj bo(block_json, context + ".magnitude_grid." + it.key());
                MagnitudeVariant variant;
                parse_window(bo, variant.t_start, variant.t_end, bo.context());
                parse_magnitude_fields(bo, g, variant.block, variant.spurious_target,
                                       bo.context());
                bo.finish();
                variant.canon = block_json.dump();
                spec.magnitude_grid[g].push_back(std::move(variant));
            }
        }
    }
    spec.monitor_enabled = o.bool_or("monitor_enabled", false);
    if (const json* variants = o.find("tracker_variants")) {
        if (!variants->is_array()) fail(context, "'tracker_variants' must be an array");
        for (const auto& v : *variants) {
            Obj vo(v, context + ".tracker_variants");
            TrackerConfig tc;
            tc.discard_history_on_reclass = vo.bool_or("discard_history_on_reclass", false);
            tc.history_horizon = vo.number_or("history_horizon", 2.0);
            if (tc.history_horizon <= 0.0) fail(context, "history_horizon must be positive");
            vo.finish();
            spec.tracker_variants.push_back(tc);
        }
    }
    if (const json* overrides = o.find("binding_overrides")) {
        if (!overrides->is_object()) fail(context, "'binding_overrides' must be an object");
        for (auto it = overrides->begin(); it != overrides->end(); ++it) {
            if (!it.value().is_string())
                fail(context, "binding_overrides values must be channel ids");
            spec.binding_overrides[it.key()] = it.value().get<std::string>();
        }
    }
    o.finish();
    return spec;
}

// --- config -------------------------------------------------------------------

SimConfig config_from_json(const json& doc, const std::string& context) {
    SimConfig cfg;
    if (!doc.is_object()) fail(context, "expected a JSON object");
    Obj o(doc, context);
    if (const json* lateral = o.find("lateral")) {
        Obj lo(*lateral, context + ".lateral");
        cfg.lateral.nominal_max = lo.number_or("nominal_max", cfg.lateral.nominal_max);
        cfg.lateral.emergency_max = lo.number_or("emergency_max", cfg.lateral.emergency_max);
        lo.finish();
        if (!cfg.lateral.valid())
            fail(context, "lateral limits need 0 < nominal_max <= emergency_max");
    }
    if (const json* controller = o.find("controller")) {
        Obj co(*controller, context + ".controller");
        ControllerConfig& cc = cfg.controller;
        cc.headway = co.number_or("headway", cc.headway);
        cc.k_gap = co.number_or("k_gap", cc.k_gap);
        cc.k_v = co.number_or("k_v", cc.k_v);
        cc.k_set = co.number_or("k_set", cc.k_set);
        cc.fcw_ttc = co.number_or("fcw_ttc", cc.fcw_ttc);
        cc.aeb_ttc = co.number_or("aeb_ttc", cc.aeb_ttc);
        cc.aeb_decel = co.number_or("aeb_decel", cc.aeb_decel);
        cc.k_y = co.number_or("k_y", cc.k_y);
        cc.k_dy = co.number_or("k_dy", cc.k_dy);
        if (const json* set_speed = co.find("set_speed")) {
            if (!set_speed->is_number()) fail(context, "'set_speed' must be a number");
            cc.set_speed = set_speed->get<double>();
        }
        co.finish();
    }
    if (const json* monitor = o.find("monitor")) {
        Obj mo(*monitor, context + ".monitor");
        cfg.monitor.hold_max = mo.number_or("hold_max", cfg.monitor.hold_max);
        mo.finish();
    }
    o.finish();
    return cfg;
}

// --- report serialization ------------------------------------------------------

nlohmann::json validation_report_to_json(const ValidationReport& report) {
    auto items = [](const std::vector<Violation>& list) {
        json arr = json::array();
        for (const auto& v : list) {
            arr.push_back({{"rule", v.rule}, {"subject", v.subject_id}, {"message", v.message}});
        }
        return arr;
    };
    return json{{"violations", items(report.violations)}, {"infos", items(report.infos)}};
}

ValidationReport validation_report_from_json(const json& j) {
    ValidationReport report;
    auto read = [](const json& arr, std::vector<Violation>& out) {
        for (const auto& v : arr) {
            out.push_back({v.at("rule").get<std::string>(), v.at("subject").get<std::string>(),
                           v.at("message").get<std::string>()});
        }
    };
    read(j.at("violations"), report.violations);
    read(j.at("infos"), report.infos);
    return report;
}

nlohmann::json coverage_report_to_json(const CoverageReport& report) {
    json missing = json::array();
    for (const auto& cell : report.missing) {
        json c;
        c["function_id"] = cell.function_id;
        c["parameter_id"] = cell.parameter_id;
        c["guideword"] = std::string(guideword_token(cell.guideword));
        if (cell.mode) c["mode"] = *cell.mode;
        missing.push_back(std::move(c));
    }
    return json{{"total_cells", report.total_cells},
                {"covered_fraction", report.covered_fraction},
                {"missing", std::move(missing)},
                {"unknown", report.unknown},
                {"duplicates", report.duplicates}};
}

CoverageReport coverage_report_from_json(const json& j) {
    CoverageReport report;
    report.total_cells = j.at("total_cells").get<std::size_t>();
    report.covered_fraction = j.at("covered_fraction").get<double>();
    for (const auto& c : j.at("missing")) {
        DeviationCell cell;
        cell.function_id = c.at("function_id").get<std::string>();
        cell.parameter_id = c.at("parameter_id").get<std::string>();
        cell.guideword = *parse_guideword(c.at("guideword").get<std::string>());
        if (c.contains("mode")) cell.mode = c.at("mode").get<std::string>();
        report.missing.push_back(std::move(cell));
    }
    report.unknown = j.at("unknown").get<std::vector<std::string>>();
    report.duplicates = j.at("duplicates").get<std::vector<std::string>>();
    return report;
}

nlohmann::json outcome_to_json(const SimOutcome& outcome) {
    json j;
    j["outcome_id"] = outcome.outcome_id;
    j["classification"] = std::string(to_string(outcome.classification));
    if (outcome.time_of_event) j["time_of_event"] = *outcome.time_of_event;
    j["min_gap"] = outcome.min_gap;
    j["max_abs_lateral_offset"] = outcome.max_abs_lateral_offset;
    j["max_abs_lateral_accel"] = outcome.max_abs_lateral_accel;
    j["plausibility_flags"] = outcome.plausibility_flags;
    j["trace_path"] = outcome.trace_path;
    return j;
}

SimOutcome outcome_from_json(const json& j) {
    SimOutcome outcome;
    outcome.outcome_id = j.at("outcome_id").get<std::string>();
    outcome.classification = *parse_classification(j.at("classification").get<std::string>());
    if (j.contains("time_of_event")) outcome.time_of_event = j.at("time_of_event").get<double>();
    outcome.min_gap = j.at("min_gap").get<double>();
    outcome.max_abs_lateral_offset = j.at("max_abs_lateral_offset").get<double>();
    outcome.max_abs_lateral_accel = j.at("max_abs_lateral_accel").get<double>();
    outcome.plausibility_flags = j.at("plausibility_flags").get<long>();
    outcome.trace_path = j.at("trace_path").get<std::string>();
    return outcome;
}

nlohmann::json matrix_to_json(const OutcomeMatrix& matrix) {
    json rows = json::object();
    for (const auto& [row_id, summary] : matrix.rows) {
        rows[row_id] = {{"outcomes", summary.outcome_ids},
                        {"worst", std::string(to_string(summary.worst))},
                        {"evidenced", summary.evidenced},
                        {"n_runs", summary.n_runs},
                        {"n_failures", summary.n_failures}};
    }
    json runs = json::array();
    for (const auto& run : matrix.runs) {
        runs.push_back({{"run_key", run.run_key},
                        {"row_id", run.row_id},
                        {"scenario_id", run.scenario_id},
                        {"magnitude_index", run.magnitude_index},
                        {"variant_index", run.variant_index},
                        {"seed", run.seed},
                        {"outcome", outcome_to_json(run.outcome)}});
    }
    return json{{"schema_version", "1"},
                {"matrix", json{{"rows", std::move(rows)},
                                {"unsimulated", matrix.unsimulated},
                                {"runs", std::move(runs)}}}};
}

nlohmann::json discrepancy_report_to_json(const DiscrepancyReport& report) {
    json items = json::array();
    for (const auto& item : report.items) {
        items.push_back({{"row_id", item.row_id}, {"kind", item.kind}});
    }
    return json{{"discrepancies", std::move(items)}};
}

// --- files ----------------------------------------------------------------------

nlohmann::json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string() + ": cannot open file");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return doc;
}

std::string document_kind(const nlohmann::json& doc) {
    if (!doc.is_object()) return "";
    for (const char* key : {"model", "usecases", "worksheet", "scenario", "injections",
                            "campaign"}) {
        if (doc.contains(key)) return key;
    }
    return "";
}

SystemModel load_model(const std::filesystem::path& path) {
    return model_from_json(load_json_file(path), path.string());
}

std::vector<UseCase> load_usecases(const std::filesystem::path& path) {
    return usecases_from_json(load_json_file(path), path.string());
}

Worksheet load_worksheet(const std::filesystem::path& path) {
    return worksheet_from_json(load_json_file(path), path.string());
}

ScenarioDoc load_scenario(const std::filesystem::path& path) {
    return scenario_from_json(load_json_file(path), path.string());
}

std::vector<InjectionSpec> load_injections(const std::filesystem::path& path) {
    return injections_from_json(load_json_file(path), path.string());
}

CampaignSpec load_campaign(const std::filesystem::path& path) {
    CampaignSpec spec = campaign_from_json(load_json_file(path), path.string());
    spec.base_dir = path.parent_path();
    return spec;
}

SimConfig load_config(const std::filesystem::path& path) {
    return config_from_json(load_json_file(path), path.string());
}

} // namespace hazopwb
