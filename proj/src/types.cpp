#include "cxnprobe/types.hpp"

#include <algorithm>
#include <array>

#include "cxnprobe/errors.hpp"

namespace cxnprobe {

namespace {

constexpr std::array<const char*, 6> kSemanticNames = {
    "succession_iteration_distributivity",
    "greater_plurality_accumulation",
    "juxtaposition_contact",
    "connection_transition",
    "idiosyncratic",
    "none",
};

constexpr std::array<const char*, 9> kDistractorNames = {
    "PNPN",       "VERBAL",     "NUM_P_NUM_A",  "N_EXTENDED", "PROPER_NAME",
    "N_SU_N_GIU", "NUM_P_NUM_SU", "THEMATIC_TARGET", "none",
};

}  // namespace

std::string to_string(Number n) {
    return n == Number::Singular ? "singular" : "plural";
}

std::string to_string(InstanceClass c) {
    return c == InstanceClass::Cxn ? kClsCxn : kClsDistractor;
}

std::string to_string(SemanticLabel l) {
    return kSemanticNames[static_cast<std::size_t>(l)];
}

std::string to_string(DistractorType t) {
    return kDistractorNames[static_cast<std::size_t>(t)];
}

Number number_from_string(const std::string& s) {
    if (s == "singular" || s == "sg") return Number::Singular;
    if (s == "plural" || s == "pl") return Number::Plural;
    throw SchemaError("unknown number value '" + s + "'");
}

InstanceClass instance_class_from_string(const std::string& s) {
    if (s == kClsCxn) return InstanceClass::Cxn;
    if (s == kClsDistractor || s == "DISTR") return InstanceClass::Distractor;
    throw SchemaError("unknown class value '" + s + "'");
}

SemanticLabel semantic_label_from_string(const std::string& s) {
    for (std::size_t i = 0; i < kSemanticNames.size(); ++i) {
        if (s == kSemanticNames[i]) return static_cast<SemanticLabel>(i);
    }
    throw SchemaError("unknown semantic label '" + s + "'");
}

DistractorType distractor_type_from_string(const std::string& s) {
    for (std::size_t i = 0; i < kDistractorNames.size(); ++i) {
        if (s == kDistractorNames[i]) return static_cast<DistractorType>(i);
    }
    throw SchemaError("unknown distractor type '" + s + "'");
}

const std::vector<std::string>& semantic_label_names() {
    static const std::vector<std::string> names(kSemanticNames.begin(),
                                                kSemanticNames.end() - 1);
    return names;
}

const std::vector<std::string>& distractor_type_names() {
    static const std::vector<std::string> names(kDistractorNames.begin(),
                                                kDistractorNames.end() - 1);
    return names;
}

std::vector<std::string> canonical_label_order(std::vector<std::string> labels) {
    // Rank known labels first (identification pair, then the semantic labels
    // in table order, then DISTRACTOR-as-4th-class for the generalization
    // task); anything else sorts lexicographically after them.
    auto rank = [](const std::string& l) -> int {
        if (l == kClsCxn) return 0;
        if (l == "succession_iteration_distributivity") return 2;
        if (l == "greater_plurality_accumulation") return 3;
        if (l == "juxtaposition_contact") return 4;
        if (l == "connection_transition") return 5;
        if (l == "idiosyncratic") return 6;
        if (l == kClsDistractor) return 7;
        return 100;
    };
    std::sort(labels.begin(), labels.end(), [&](const auto& a, const auto& b) {
        const int ra = rank(a), rb = rank(b);
        return ra != rb ? ra < rb : a < b;
    });
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    return labels;
}

}  // namespace cxnprobe
