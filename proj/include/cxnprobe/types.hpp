#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace cxnprobe {

enum class Number { Singular, Plural };

enum class InstanceClass { Cxn, Distractor };

enum class SemanticLabel {
    SuccessionIterationDistributivity,
    GreaterPluralityAccumulation,
    JuxtapositionContact,
    ConnectionTransition,
    Idiosyncratic,
    None,
};

enum class DistractorType {
    Pnpn,
    Verbal,
    NumPNumA,
    NExtended,
    ProperName,
    NSuNGiu,
    NumPNumSu,
    ThematicTarget,
    None,
};

// One annotated sentence with its N-P-N (or distractor) span. Span offsets
// are codepoint offsets into `sentence`, [start, end).
struct ConstructionInstance {
    std::string id;
    std::string sentence;
    std::size_t span_start = 0;
    std::size_t span_end = 0;
    std::string prep;          // a, su, per, dopo, ... (open set)
    std::string noun_lemma;
    std::string noun_form;
    Number number = Number::Singular;
    InstanceClass cls = InstanceClass::Cxn;
    SemanticLabel semantic_label = SemanticLabel::None;
    DistractorType distractor_type = DistractorType::None;
    std::string language = "it";

    bool operator==(const ConstructionInstance&) const = default;
};

struct AnnotationRecord {
    std::string instance_id;
    std::string annotator_id;
    std::string label;  // a SemanticLabel name

    bool operator==(const AnnotationRecord&) const = default;
};

std::string to_string(Number n);
std::string to_string(InstanceClass c);
std::string to_string(SemanticLabel l);
std::string to_string(DistractorType t);

Number number_from_string(const std::string& s);
InstanceClass instance_class_from_string(const std::string& s);
SemanticLabel semantic_label_from_string(const std::string& s);
DistractorType distractor_type_from_string(const std::string& s);

const std::vector<std::string>& semantic_label_names();   // without "none"
const std::vector<std::string>& distractor_type_names();  // without "none"

// Fixed display/class order for known label alphabets (identification and
// disambiguation); unknown labels are appended in lexicographic order.
std::vector<std::string> canonical_label_order(std::vector<std::string> labels);

inline const std::string kClsCxn = "CXN";
inline const std::string kClsDistractor = "DISTRACTOR";

}  // namespace cxnprobe
