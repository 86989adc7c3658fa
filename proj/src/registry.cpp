#include "ctopen/registry.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <regex>
#include <set>
#include <sstream>

namespace ctopen {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void reject(const std::string& field, const std::string& why) {
    throw RegistryParseError(field + ": " + why);
}

Date parse_record_date(const std::string& raw, const std::string& field) {
    auto d = parse_iso_date(raw);
    if (!d) reject(field, "invalid date \"" + raw + "\"");
    return *d;
}

template <typename Enum>
Enum parse_enum(const std::string& raw, const std::vector<std::pair<std::string, Enum>>& table,
                Enum fallback) {
    std::string key = lower(trim(raw));
    std::replace(key.begin(), key.end(), ' ', '_');
    std::replace(key.begin(), key.end(), '-', '_');
    for (const auto& [name, value] : table) {
        if (key == name) return value;
    }
    return fallback;
}

const std::vector<std::pair<std::string, Phase>>& phase_table() {
    static const std::vector<std::pair<std::string, Phase>> t = {
        {"early_phase1", Phase::early_phase1}, {"phase1", Phase::phase1},
        {"phase1_2", Phase::phase1_2},         {"phase2", Phase::phase2},
        {"phase2_3", Phase::phase2_3},         {"phase3", Phase::phase3},
        {"phase4", Phase::phase4},             {"not_applicable", Phase::not_applicable},
        {"na", Phase::not_applicable}};
    return t;
}

const std::vector<std::pair<std::string, Allocation>>& allocation_table() {
    static const std::vector<std::pair<std::string, Allocation>> t = {
        {"randomized", Allocation::randomized},
        {"non_randomized", Allocation::non_randomized},
        {"not_applicable", Allocation::not_applicable},
        {"na", Allocation::not_applicable}};
    return t;
}

const std::vector<std::pair<std::string, InterventionModel>>& model_table() {
    static const std::vector<std::pair<std::string, InterventionModel>> t = {
        {"parallel", InterventionModel::parallel},
        {"parallel_assignment", InterventionModel::parallel},
        {"crossover", InterventionModel::crossover},
        {"crossover_assignment", InterventionModel::crossover},
        {"factorial", InterventionModel::factorial},
        {"factorial_assignment", InterventionModel::factorial},
        {"sequential", InterventionModel::sequential},
        {"sequential_assignment", InterventionModel::sequential},
        {"single_group", InterventionModel::single_group},
        {"single_group_assignment", InterventionModel::single_group},
        {"other", InterventionModel::other}};
    return t;
}

const std::vector<std::pair<std::string, Masking>>& masking_table() {
    static const std::vector<std::pair<std::string, Masking>> t = {
        {"none", Masking::none},       {"open", Masking::none},
        {"single", Masking::single},   {"double", Masking::double_blind},
        {"triple", Masking::triple},   {"quadruple", Masking::quadruple},
        {"other", Masking::other}};
    return t;
}

const std::vector<std::pair<std::string, PrimaryPurpose>>& purpose_table() {
    static const std::vector<std::pair<std::string, PrimaryPurpose>> t = {
        {"treatment", PrimaryPurpose::treatment},
        {"prevention", PrimaryPurpose::prevention},
        {"diagnostic", PrimaryPurpose::diagnostic},
        {"supportive_care", PrimaryPurpose::supportive_care},
        {"screening", PrimaryPurpose::screening},
        {"health_services_research", PrimaryPurpose::health_services_research},
        {"basic_science", PrimaryPurpose::basic_science},
        {"device_feasibility", PrimaryPurpose::device_feasibility},
        {"other", PrimaryPurpose::other}};
    return t;
}

const std::vector<std::pair<std::string, ArmType>>& arm_type_table() {
    static const std::vector<std::pair<std::string, ArmType>> t = {
        {"experimental", ArmType::experimental},
        {"active_comparator", ArmType::active_comparator},
        {"placebo_comparator", ArmType::placebo_comparator},
        {"sham_comparator", ArmType::sham_comparator},
        {"no_intervention", ArmType::no_intervention},
        {"other", ArmType::other}};
    return t;
}

const std::vector<std::pair<std::string, MeasureClass>>& measure_class_table() {
    static const std::vector<std::pair<std::string, MeasureClass>> t = {
        {"primary", MeasureClass::primary},
        {"secondary", MeasureClass::secondary},
        {"other", MeasureClass::other}};
    return t;
}

const std::vector<std::pair<std::string, Sex>>& sex_table() {
    static const std::vector<std::pair<std::string, Sex>> t = {
        {"all", Sex::all}, {"female", Sex::female}, {"male", Sex::male}};
    return t;
}

const std::vector<std::pair<std::string, InterventionType>>& intervention_type_table() {
    static const std::vector<std::pair<std::string, InterventionType>> t = {
        {"drug", InterventionType::drug},
        {"biological", InterventionType::biological},
        {"other", InterventionType::other}};
    return t;
}

std::optional<double> parse_age_years(const std::string& raw) {
    static const std::regex re(R"(^\s*([0-9]+(?:\.[0-9]+)?)\s*(year|years|month|months|week|weeks|day|days)?\s*$)",
                               std::regex::icase);
    std::smatch m;
    if (!std::regex_match(raw, m, re)) return std::nullopt;
    double value = std::stod(m[1].str());
    std::string unit = lower(m[2].str());
    if (unit.empty() || unit.starts_with("year")) return value;
    if (unit.starts_with("month")) return value / 12.0;
    if (unit.starts_with("week")) return value * 7.0 / 365.25;
    return value / 365.25;
}

OutcomeMeasure make_measure(const std::string& title, const std::string& description,
                            MeasureClass cls, const std::string& time_frame) {
    OutcomeMeasure m;
    m.title = title;
    m.description = description;
    m.measure_class = cls;
    m.time_frame_text = time_frame;
    m.time_frame_days = normalize_time_frame(time_frame);
    return m;
}

void validate_record(const TrialRecord& t) {
    if (!is_valid_nct_id(t.nct_id)) reject("nct_id", "malformed id \"" + t.nct_id + "\"");
    if (t.brief_title.empty()) reject("brief_title", "missing");
    if (t.enrollment < 0) reject("enrollment", "negative");
    if (!t.study_start_date.is_valid())
        reject("study_start_date", "invalid date \"" + t.study_start_date.to_iso() + "\"");
    if (t.estimated_primary_completion_date && !t.estimated_primary_completion_date->is_valid())
        reject("estimated_primary_completion_date",
               "invalid date \"" + t.estimated_primary_completion_date->to_iso() + "\"");
    if (t.arms.empty()) reject("arms", "at least one arm required");
    std::set<std::string> labels;
    for (const auto& arm : t.arms) {
        if (arm.label.empty()) reject("arms", "arm label must be non-empty");
        if (!labels.insert(arm.label).second)
            reject("arms", "duplicate arm label \"" + arm.label + "\"");
    }
}

TrialRecord parse_ctgov_record(const nlohmann::json& j) {
    TrialRecord t;
    const auto& proto = j.at("protocolSection");

    const auto& ident = proto.at("identificationModule");
    t.nct_id = ident.value("nctId", "");
    t.brief_title = ident.value("briefTitle", "");
    if (ident.contains("officialTitle")) t.official_title = ident["officialTitle"].get<std::string>();
    if (ident.contains("secondaryIdInfos")) {
        for (const auto& s : ident["secondaryIdInfos"]) {
            if (s.contains("id")) t.aliases.push_back(s["id"].get<std::string>());
        }
    }

    if (proto.contains("descriptionModule")) {
        const auto& desc = proto["descriptionModule"];
        t.description = desc.value("briefSummary", "");
        if (t.description.empty()) t.description = desc.value("detailedDescription", "");
    }

    const auto& status = proto.at("statusModule");
    t.study_start_date = parse_record_date(
        status.at("startDateStruct").value("date", ""), "study_start_date");
    if (status.contains("primaryCompletionDateStruct")) {
        t.estimated_primary_completion_date = parse_record_date(
            status["primaryCompletionDateStruct"].value("date", ""),
            "estimated_primary_completion_date");
    }

    if (proto.contains("designModule")) {
        const auto& design = proto["designModule"];
        if (design.contains("phases")) {
            std::vector<std::string> phases;
            for (const auto& p : design["phases"]) phases.push_back(lower(p.get<std::string>()));
            std::sort(phases.begin(), phases.end());
            if (phases.size() == 2 && phases[0] == "phase1" && phases[1] == "phase2")
                t.phase = Phase::phase1_2;
            else if (phases.size() == 2 && phases[0] == "phase2" && phases[1] == "phase3")
                t.phase = Phase::phase2_3;
            else if (phases.size() == 1)
                t.phase = parse_enum(phases[0], phase_table(), Phase::not_applicable);
        }
        if (design.contains("designInfo")) {
            const auto& info = design["designInfo"];
            t.allocation = parse_enum(info.value("allocation", ""), allocation_table(),
                                      Allocation::not_applicable);
            t.intervention_model = parse_enum(info.value("interventionModel", ""), model_table(),
                                              InterventionModel::other);
            if (info.contains("maskingInfo"))
                t.masking = parse_enum(info["maskingInfo"].value("masking", ""), masking_table(),
                                       Masking::none);
            t.primary_purpose = parse_enum(info.value("primaryPurpose", ""), purpose_table(),
                                           PrimaryPurpose::other);
        }
        if (design.contains("enrollmentInfo"))
            t.enrollment = design["enrollmentInfo"].value("count", std::int64_t{0});
    }

    if (proto.contains("armsInterventionsModule")) {
        const auto& arms_mod = proto["armsInterventionsModule"];
        if (arms_mod.contains("armGroups")) {
            for (const auto& a : arms_mod["armGroups"]) {
                StudyArm arm;
                arm.label = a.value("label", "");
                arm.arm_type = parse_enum(a.value("type", ""), arm_type_table(), ArmType::other);
                arm.description = a.value("description", "");
                if (a.contains("interventionNames")) {
                    for (const auto& n : a["interventionNames"])
                        arm.interventions.push_back(n.get<std::string>());
                }
                t.arms.push_back(std::move(arm));
            }
        }
        if (arms_mod.contains("interventions")) {
            for (const auto& iv : arms_mod["interventions"]) {
                auto ty = parse_enum(iv.value("type", ""), intervention_type_table(),
                                     InterventionType::other);
                if (std::find(t.intervention_types.begin(), t.intervention_types.end(), ty) ==
                    t.intervention_types.end())
                    t.intervention_types.push_back(ty);
                if (iv.contains("otherNames")) {
                    for (const auto& n : iv["otherNames"]) t.aliases.push_back(n.get<std::string>());
                }
            }
        }
    }

    if (proto.contains("outcomesModule")) {
        const auto& out = proto["outcomesModule"];
        auto read = [&](const char* key, MeasureClass cls) {
            if (!out.contains(key)) return;
            for (const auto& o : out[key]) {
                t.outcome_measures.push_back(make_measure(
                    o.value("measure", ""), o.value("description", ""), cls,
                    o.value("timeFrame", "")));
            }
        };
        read("primaryOutcomes", MeasureClass::primary);
        read("secondaryOutcomes", MeasureClass::secondary);
        read("otherOutcomes", MeasureClass::other);
    }

    if (proto.contains("conditionsModule") && proto["conditionsModule"].contains("conditions")) {
        for (const auto& c : proto["conditionsModule"]["conditions"])
            t.conditions.push_back(c.get<std::string>());
    }

    if (proto.contains("sponsorCollaboratorsModule")) {
        const auto& sp = proto["sponsorCollaboratorsModule"];
        if (sp.contains("leadSponsor"))
            t.sponsors.emplace_back(sp["leadSponsor"].value("name", ""),
                                    lower(sp["leadSponsor"].value("class", "")));
        if (sp.contains("collaborators")) {
            for (const auto& c : sp["collaborators"])
                t.sponsors.emplace_back(c.value("name", ""), lower(c.value("class", "")));
        }
    }

    if (proto.contains("contactsLocationsModule") &&
        proto["contactsLocationsModule"].contains("locations")) {
        for (const auto& loc : proto["contactsLocationsModule"]["locations"]) {
            std::string country = loc.value("country", "");
            if (!country.empty() &&
                std::find(t.location_countries.begin(), t.location_countries.end(), country) ==
                    t.location_countries.end())
                t.location_countries.push_back(country);
        }
    }

    if (proto.contains("eligibilityModule")) {
        const auto& elig = proto["eligibilityModule"];
        t.eligibility_text = elig.value("eligibilityCriteria", "");
        t.sex = parse_enum(elig.value("sex", "all"), sex_table(), Sex::all);
        if (elig.contains("minimumAge"))
            t.min_age_years = parse_age_years(elig["minimumAge"].get<std::string>());
        if (elig.contains("maximumAge"))
            t.max_age_years = parse_age_years(elig["maximumAge"].get<std::string>());
        if (elig.contains("healthyVolunteers")) {
            const auto& hv = elig["healthyVolunteers"];
            t.healthy_volunteers = hv.is_boolean() ? hv.get<bool>() : lower(hv.get<std::string>()) == "yes";
        }
    }

    return t;
}

TrialRecord parse_canonical_record(const nlohmann::json& j) {
    TrialRecord t;
    t.nct_id = j.value("nct_id", "");
    t.brief_title = j.value("brief_title", "");
    if (j.contains("official_title")) t.official_title = j["official_title"].get<std::string>();
    t.description = j.value("description", "");
    if (j.contains("aliases")) t.aliases = j["aliases"].get<std::vector<std::string>>();
    t.study_start_date = parse_record_date(j.value("study_start_date", ""), "study_start_date");
    if (j.contains("estimated_primary_completion_date"))
        t.estimated_primary_completion_date =
            parse_record_date(j["estimated_primary_completion_date"].get<std::string>(),
                              "estimated_primary_completion_date");
    t.enrollment = j.value("enrollment", std::int64_t{0});
    t.phase = parse_enum(j.value("phase", ""), phase_table(), Phase::not_applicable);
    t.allocation =
        parse_enum(j.value("allocation", ""), allocation_table(), Allocation::not_applicable);
    t.intervention_model =
        parse_enum(j.value("intervention_model", ""), model_table(), InterventionModel::other);
    t.masking = parse_enum(j.value("masking", ""), masking_table(), Masking::none);
    t.primary_purpose =
        parse_enum(j.value("primary_purpose", ""), purpose_table(), PrimaryPurpose::other);
    if (j.contains("arms")) {
        for (const auto& a : j["arms"]) {
            StudyArm arm;
            arm.label = a.value("label", "");
            arm.arm_type = parse_enum(a.value("arm_type", ""), arm_type_table(), ArmType::other);
            arm.description = a.value("description", "");
            if (a.contains("interventions"))
                arm.interventions = a["interventions"].get<std::vector<std::string>>();
            t.arms.push_back(std::move(arm));
        }
    }
    if (j.contains("outcome_measures")) {
        for (const auto& o : j["outcome_measures"]) {
            t.outcome_measures.push_back(make_measure(
                o.value("title", ""), o.value("description", ""),
                parse_enum(o.value("measure_class", ""), measure_class_table(),
                           MeasureClass::other),
                o.value("time_frame_text", "")));
        }
    }
    if (j.contains("conditions")) t.conditions = j["conditions"].get<std::vector<std::string>>();
    if (j.contains("sponsors")) {
        for (const auto& s : j["sponsors"])
            t.sponsors.emplace_back(s.value("name", ""), s.value("class", ""));
    }
    if (j.contains("location_countries"))
        t.location_countries = j["location_countries"].get<std::vector<std::string>>();
    t.eligibility_text = j.value("eligibility_text", "");
    t.sex = parse_enum(j.value("sex", "all"), sex_table(), Sex::all);
    if (j.contains("min_age_years")) t.min_age_years = j["min_age_years"].get<double>();
    if (j.contains("max_age_years")) t.max_age_years = j["max_age_years"].get<double>();
    t.healthy_volunteers = j.value("healthy_volunteers", false);
    if (j.contains("intervention_types")) {
        for (const auto& iv : j["intervention_types"])
            t.intervention_types.push_back(parse_enum(iv.get<std::string>(),
                                                      intervention_type_table(),
                                                      InterventionType::other));
    }
    return t;
}

}  // namespace

bool TrialRecord::has_intervention_type(InterventionType ty) const {
    return std::find(intervention_types.begin(), intervention_types.end(), ty) !=
           intervention_types.end();
}

std::vector<const StudyArm*> TrialRecord::treatment_arms() const {
    std::vector<const StudyArm*> out;
    for (const auto& a : arms)
        if (a.arm_type == ArmType::experimental) out.push_back(&a);
    return out;
}

std::vector<const StudyArm*> TrialRecord::comparator_arms() const {
    std::vector<const StudyArm*> out;
    for (const auto& a : arms)
        if (a.is_comparator()) out.push_back(&a);
    return out;
}

bool is_valid_nct_id(const std::string& id) {
    if (id.size() != 11 || id.compare(0, 3, "NCT") != 0) return false;
    return std::all_of(id.begin() + 3, id.end(),
                       [](unsigned char c) { return std::isdigit(c); });
}

std::optional<std::int64_t> normalize_time_frame(const std::string& text) {
    static const std::regex re(
        R"(^\s*(?:(?:up\s+to|at|approximately|about|around|~)\s+)*([0-9]+(?:\.[0-9]+)?)\s*(day|week|month|year)s?\b)",
        std::regex::icase);
    std::smatch m;
    if (!std::regex_search(text, m, re)) return std::nullopt;
    double quantity = std::stod(m[1].str());
    std::string unit = lower(m[2].str());
    double days = quantity;
    if (unit == "week") days = quantity * 7.0;
    else if (unit == "month") days = quantity * 30.4375;
    else if (unit == "year") days = quantity * 365.25;
    return std::llround(days);
}

TrialRecord parse_trial_record(const nlohmann::json& raw_export) {
    if (!raw_export.is_object()) throw RegistryParseError("record: not a structured document");
    TrialRecord t = raw_export.contains("protocolSection") ? parse_ctgov_record(raw_export)
                                                           : parse_canonical_record(raw_export);
    validate_record(t);
    return t;
}

nlohmann::json to_canonical_json(const TrialRecord& t) {
    nlohmann::json j;
    j["nct_id"] = t.nct_id;
    j["brief_title"] = t.brief_title;
    if (t.official_title) j["official_title"] = *t.official_title;
    j["description"] = t.description;
    j["aliases"] = t.aliases;
    j["study_start_date"] = t.study_start_date.to_iso();
    if (t.estimated_primary_completion_date)
        j["estimated_primary_completion_date"] = t.estimated_primary_completion_date->to_iso();
    j["enrollment"] = t.enrollment;
    j["phase"] = to_string(t.phase);
    j["allocation"] = to_string(t.allocation);
    j["intervention_model"] = to_string(t.intervention_model);
    j["masking"] = to_string(t.masking);
    j["primary_purpose"] = to_string(t.primary_purpose);
    j["arms"] = nlohmann::json::array();
    for (const auto& a : t.arms) {
        nlohmann::json arm;
        arm["label"] = a.label;
        arm["arm_type"] = to_string(a.arm_type);
        arm["description"] = a.description;
        arm["interventions"] = a.interventions;
        j["arms"].push_back(std::move(arm));
    }
    j["outcome_measures"] = nlohmann::json::array();
    for (const auto& o : t.outcome_measures) {
        nlohmann::json m;
        m["title"] = o.title;
        m["description"] = o.description;
        m["measure_class"] = to_string(o.measure_class);
        m["time_frame_text"] = o.time_frame_text;
        if (o.time_frame_days) m["time_frame_days"] = *o.time_frame_days;
        j["outcome_measures"].push_back(std::move(m));
    }
    j["conditions"] = t.conditions;
    j["sponsors"] = nlohmann::json::array();
    for (const auto& [name, cls] : t.sponsors)
        j["sponsors"].push_back({{"name", name}, {"class", cls}});
    j["location_countries"] = t.location_countries;
    j["eligibility_text"] = t.eligibility_text;
    j["sex"] = to_string(t.sex);
    if (t.min_age_years) j["min_age_years"] = *t.min_age_years;
    if (t.max_age_years) j["max_age_years"] = *t.max_age_years;
    j["healthy_volunteers"] = t.healthy_volunteers;
    j["intervention_types"] = nlohmann::json::array();
    for (auto iv : t.intervention_types) j["intervention_types"].push_back(to_string(iv));
    return j;
}

std::string flatten_protocol(const TrialRecord& t, bool include_dates,
                             bool include_eligibility) {
    std::ostringstream out;
    out << "NCT ID: " << t.nct_id << "\n";
    if (!t.aliases.empty()) {
        out << "Other identifiers: ";
        for (size_t i = 0; i < t.aliases.size(); ++i) {
            if (i) out << "; ";
            out << t.aliases[i];
        }
        out << "\n";
    }
    out << "Brief title: " << t.brief_title << "\n";
    if (t.official_title) out << "Official title: " << *t.official_title << "\n";
    if (!t.description.empty()) out << "Description: " << t.description << "\n";
    if (!t.conditions.empty()) {
        out << "Conditions: ";
        for (size_t i = 0; i < t.conditions.size(); ++i) {
            if (i) out << "; ";
            out << t.conditions[i];
        }
        out << "\n";
    }
    out << "Phase: " << to_string(t.phase) << "\n";
    out << "Allocation: " << to_string(t.allocation) << "\n";
    out << "Intervention model: " << to_string(t.intervention_model) << "\n";
    out << "Masking: " << to_string(t.masking) << "\n";
    out << "Primary purpose: " << to_string(t.primary_purpose) << "\n";
    out << "Enrollment: " << t.enrollment << "\n";
    if (!t.sponsors.empty()) {
        out << "Sponsors: ";
        for (size_t i = 0; i < t.sponsors.size(); ++i) {
            if (i) out << "; ";
            out << t.sponsors[i].first << " (" << t.sponsors[i].second << ")";
        }
        out << "\n";
    }
    if (!t.location_countries.empty()) {
        out << "Locations: ";
        for (size_t i = 0; i < t.location_countries.size(); ++i) {
            if (i) out << "; ";
            out << t.location_countries[i];
        }
        out << "\n";
    }
    if (include_dates) {
        out << "Study start date: " << t.study_start_date.to_iso() << "\n";
        if (t.estimated_primary_completion_date)
            out << "Estimated primary completion date: "
                << t.estimated_primary_completion_date->to_iso() << "\n";
    }
    out << "Arms:\n";
    for (const auto& a : t.arms) {
        out << "  - " << a.label << " (" << to_string(a.arm_type) << ")";
        if (!a.description.empty()) out << ": " << a.description;
        if (!a.interventions.empty()) {
            out << " [interventions: ";
            for (size_t i = 0; i < a.interventions.size(); ++i) {
                if (i) out << "; ";
                out << a.interventions[i];
            }
            out << "]";
        }
        out << "\n";
    }
    out << "Outcome measures:\n";
    for (const auto& o : t.outcome_measures) {
        out << "  - [" << to_string(o.measure_class) << "] " << o.title;
        if (!o.time_frame_text.empty()) out << " (time frame: " << o.time_frame_text << ")";
        if (!o.description.empty()) out << ": " << o.description;
        out << "\n";
    }
    if (include_eligibility && !t.eligibility_text.empty())
        out << "Eligibility criteria: " << t.eligibility_text << "\n";
    return out.str();
}

std::string to_string(Phase v) {
    switch (v) {
        case Phase::early_phase1: return "early_phase1";
        case Phase::phase1: return "phase1";
        case Phase::phase1_2: return "phase1_2";
        case Phase::phase2: return "phase2";
        case Phase::phase2_3: return "phase2_3";
        case Phase::phase3: return "phase3";
        case Phase::phase4: return "phase4";
        case Phase::not_applicable: return "not_applicable";
    }
    return "not_applicable";
}

std::string to_string(Allocation v) {
    switch (v) {
        case Allocation::randomized: return "randomized";
        case Allocation::non_randomized: return "non_randomized";
        case Allocation::not_applicable: return "not_applicable";
    }
    return "not_applicable";
}

std::string to_string(InterventionModel v) {
    switch (v) {
        case InterventionModel::parallel: return "parallel";
        case InterventionModel::crossover: return "crossover";
        case InterventionModel::factorial: return "factorial";
        case InterventionModel::sequential: return "sequential";
        case InterventionModel::single_group: return "single_group";
        case InterventionModel::other: return "other";
    }
    return "other";
}

std::string to_string(Masking v) {
    switch (v) {
        case Masking::none: return "none";
        case Masking::single: return "single";
        case Masking::double_blind: return "double";
        case Masking::triple: return "triple";
        case Masking::quadruple: return "quadruple";
        case Masking::other: return "other";
    }
    return "other";
}

std::string to_string(PrimaryPurpose v) {
    switch (v) {
        case PrimaryPurpose::treatment: return "treatment";
        case PrimaryPurpose::prevention: return "prevention";
        case PrimaryPurpose::diagnostic: return "diagnostic";
        case PrimaryPurpose::supportive_care: return "supportive_care";
        case PrimaryPurpose::screening: return "screening";
        case PrimaryPurpose::health_services_research: return "health_services_research";
        case PrimaryPurpose::basic_science: return "basic_science";
        case PrimaryPurpose::device_feasibility: return "device_feasibility";
        case PrimaryPurpose::other: return "other";
    }
    return "other";
}

std::string to_string(ArmType v) {
    switch (v) {
        case ArmType::experimental: return "experimental";
        case ArmType::active_comparator: return "active_comparator";
        case ArmType::placebo_comparator: return "placebo_comparator";
        case ArmType::sham_comparator: return "sham_comparator";
        case ArmType::no_intervention: return "no_intervention";
        case ArmType::other: return "other";
    }
    return "other";
}

std::string to_string(MeasureClass v) {
    switch (v) {
        case MeasureClass::primary: return "primary";
        case MeasureClass::secondary: return "secondary";
        case MeasureClass::other: return "other";
    }
    return "other";
}

std::string to_string(Sex v) {
    switch (v) {
        case Sex::all: return "all";
        case Sex::female: return "female";
        case Sex::male: return "male";
    }
    return "all";
}

std::string to_string(InterventionType v) {
    switch (v) {
        case InterventionType::drug: return "drug";
        case InterventionType::biological: return "biological";
        case InterventionType::other: return "other";
    }
    return "other";
}

}  // namespace ctopen
