#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ctopen/date.hpp"
#include "json.hpp"

namespace ctopen {

enum class Phase {
    early_phase1,
    phase1,
    phase1_2,
    phase2,
    phase2_3,
    phase3,
    phase4,
    not_applicable
};

enum class Allocation { randomized, non_randomized, not_applicable };

enum class InterventionModel {
    parallel,
    crossover,
    factorial,
    sequential,
    single_group,
    other
};

enum class Masking { none, single, double_blind, triple, quadruple, other };

enum class PrimaryPurpose {
    treatment,
    prevention,
    diagnostic,
    supportive_care,
    screening,
    health_services_research,
    basic_science,
    device_feasibility,
    other
};

enum class ArmType {
    experimental,
    active_comparator,
    placebo_comparator,
    sham_comparator,
    no_intervention,
    other
};

enum class MeasureClass { primary, secondary, other };

enum class Sex { all, female, male };

enum class InterventionType { drug, biological, other };

struct StudyArm {
    std::string label;
    ArmType arm_type = ArmType::other;
    std::string description;
    std::vector<std::string> interventions;

    bool is_comparator() const {
        return arm_type == ArmType::active_comparator || arm_type == ArmType::placebo_comparator ||
               arm_type == ArmType::sham_comparator || arm_type == ArmType::no_intervention;
    }
};

struct OutcomeMeasure {
    std::string title;
    std::string description;
    MeasureClass measure_class = MeasureClass::primary;
    std::string time_frame_text;
    std::optional<std::int64_t> time_frame_days;  // normalized; absent when unparseable
};

struct TrialRecord {
    std::string nct_id;
    std::string brief_title;
    std::optional<std::string> official_title;
    std::string description;
    std::vector<std::string> aliases;  // secondary registry ids, drug code names
    Date study_start_date;
    std::optional<Date> estimated_primary_completion_date;
    std::int64_t enrollment = 0;
    Phase phase = Phase::not_applicable;
    Allocation allocation = Allocation::not_applicable;
    InterventionModel intervention_model = InterventionModel::other;
    Masking masking = Masking::none;
    PrimaryPurpose primary_purpose = PrimaryPurpose::other;
    std::vector<StudyArm> arms;
    std::vector<OutcomeMeasure> outcome_measures;
    std::vector<std::string> conditions;
    std::vector<std::pair<std::string, std::string>> sponsors;  // (name, class)
    std::vector<std::string> location_countries;
    std::string eligibility_text;
    Sex sex = Sex::all;
    std::optional<double> min_age_years;
    std::optional<double> max_age_years;
    bool healthy_volunteers = false;
    std::vector<InterventionType> intervention_types;

    bool has_intervention_type(InterventionType t) const;
    std::vector<const StudyArm*> treatment_arms() const;
    std::vector<const StudyArm*> comparator_arms() const;
};

// Raised when a registry export violates a record invariant; the message
// names the offending field or raw value.
class RegistryParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

bool is_valid_nct_id(const std::string& id);

// Time frame text -> whole days. Recognizes day/week/month/year units with
// leading qualifiers ("Up to", "At", "approximately"); absent when the text
// does not parse. Conversion: week = 7, month = 30.4375, year = 365.25 days,
// rounded to the nearest integer.
std::optional<std::int64_t> normalize_time_frame(const std::string& text);

// Accepts either a clinicaltrials.gov-style study record (protocolSection…)
// or the canonical flat record emitted by to_canonical_json.
TrialRecord parse_trial_record(const nlohmann::json& raw_export);

nlohmann::json to_canonical_json(const TrialRecord& trial);

// Deterministic text rendering of the protocol for search and judge inputs.
// include_dates = false leaves out every date-bearing field; include_eligibility
// = false omits the eligibility criteria text.
std::string flatten_protocol(const TrialRecord& trial, bool include_dates,
                             bool include_eligibility);

// Enum <-> canonical string names (lowercase snake case).
std::string to_string(Phase v);
std::string to_string(Allocation v);
std::string to_string(InterventionModel v);
std::string to_string(Masking v);
std::string to_string(PrimaryPurpose v);
std::string to_string(ArmType v);
std::string to_string(MeasureClass v);
std::string to_string(Sex v);
std::string to_string(InterventionType v);

}  // namespace ctopen
