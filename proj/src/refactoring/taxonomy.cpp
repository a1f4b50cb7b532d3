#include "refwhy/refactoring/taxonomy.hpp"

#include <unordered_map>

namespace refwhy::refactoring {

const char* to_string(Group g) {
    switch (g) {
    case Group::ComposingMethods: return "Composing Methods";
    case Group::MovingFeatures: return "Moving Features between Objects";
    case Group::ObjectModifiers: return "Manage Objects Modifiers";
    case Group::OrganizingData: return "Organizing Data";
    case Group::SimplifyingMethodCalls: return "Simplifying Method Calls";
    case Group::Generalization: return "Dealing with Generalization";
    case Group::ObjectReplacement: return "Object Replacement";
    case Group::PackageManagement: return "Package Management";
    case Group::TestSpecific: return "Test Specific";
    case Group::Others: return "Others";
    }
    return "Others";
}

namespace {

using G = Group;

// Abbreviations follow the published list, except three names that share a
// code there: Move And Rename Class (MARC), Split Package (SPack) and
// Replace Attribute (RepA) get distinct codes so lookups stay unambiguous.
const std::vector<RefactoringType> kTypes = {
    // Composing Methods
    {"Extract Method", "EM", G::ComposingMethods, true},
    {"Inline Method", "IM", G::ComposingMethods, true},
    {"Merge Method", "MerM", G::ComposingMethods, false},
    {"Split Method", "SM", G::ComposingMethods, false},
    {"Extract Variable", "EV", G::ComposingMethods, false},
    {"Inline Variable", "IV", G::ComposingMethods, false},
    {"Split Variable", "SV", G::ComposingMethods, false},
    {"Merge Variable", "MV", G::ComposingMethods, false},
    {"Rename Variable", "RV", G::ComposingMethods, false},
    {"Change Variable Type", "CVT", G::ComposingMethods, false},
    {"Move Code", "MCode", G::ComposingMethods, false},
    {"Merge Catch", "MCat", G::ComposingMethods, false},
    {"Merge Conditional", "MCon", G::ComposingMethods, false},
    {"Split Conditional", "SC", G::ComposingMethods, false},
    // Moving Features between Objects
    {"Extract Class", "EC", G::MovingFeatures, false},
    {"Move Class", "MovC", G::MovingFeatures, true},
    {"Rename Class", "RC", G::MovingFeatures, false},
    {"Move Method", "MM", G::MovingFeatures, true},
    {"Move Attribute", "MA", G::MovingFeatures, true},
    {"Localize Parameter", "LP", G::MovingFeatures, false},
    {"Replace Attribute With Variable", "RAWV", G::MovingFeatures, false},
    // Manage Objects Modifiers
    {"Change Attribute Access Modifier", "CAAM", G::ObjectModifiers, false},
    {"Change Class Access Modifier", "CCAM", G::ObjectModifiers, false},
    {"Change Type Declaration Kind", "CTDK", G::ObjectModifiers, false},
    {"Add Method Modifier", "AMM", G::ObjectModifiers, false},
    {"Add Attribute Modifier", "AAM", G::ObjectModifiers, false},
    {"Add Variable Modifier", "AVM", G::ObjectModifiers, false},
    {"Add Parameter Modifier", "APM", G::ObjectModifiers, false},
    {"Add Class Modifier", "ACM", G::ObjectModifiers, false},
    {"Remove Method Modifier", "RMM", G::ObjectModifiers, false},
    {"Remove Attribute Modifier", "RAM", G::ObjectModifiers, false},
    {"Remove Variable Modifier", "RVM", G::ObjectModifiers, false},
    {"Remove Parameter Modifier", "RPM", G::ObjectModifiers, false},
    {"Remove Class Modifier", "RCM", G::ObjectModifiers, false},
    // Organizing Data
    {"Extract Attribute", "ExA", G::OrganizingData, false},
    {"Split Attribute", "SA", G::OrganizingData, false},
    {"Merge Attribute", "MerA", G::OrganizingData, false},
    {"Replace Attribute", "RepA", G::OrganizingData, false},
    {"Rename Attribute", "RA", G::OrganizingData, false},
    {"Inline Attribute", "IA", G::OrganizingData, false},
    {"Encapsulate Attribute", "EnA", G::OrganizingData, false},
    {"Parameterize Attribute", "PA", G::OrganizingData, false},
    {"Change Attribute Type", "CAT", G::OrganizingData, false},
    {"Replace Variable With Attribute", "RVWA", G::OrganizingData, false},
    // Simplifying Method Calls
    {"Split Parameter", "SP", G::SimplifyingMethodCalls, false},
    {"Merge Parameter", "MParam", G::SimplifyingMethodCalls, false},
    {"Add Parameter", "AP", G::SimplifyingMethodCalls, false},
    {"Remove Parameter", "RemP", G::SimplifyingMethodCalls, false},
    {"Reorder Parameter", "RParam", G::SimplifyingMethodCalls, false},
    {"Rename Parameter", "RenP", G::SimplifyingMethodCalls, false},
    {"Parameterize Variable", "PV", G::SimplifyingMethodCalls, false},
    {"Change Parameter Type", "CPT", G::SimplifyingMethodCalls, false},
    {"Change Method Access Modifier", "CMAM", G::SimplifyingMethodCalls, false},
    {"Change Return Type", "CRT", G::SimplifyingMethodCalls, false},
    {"Rename Method", "RM", G::SimplifyingMethodCalls, false},
    // Dealing with Generalization
    {"Extract Superclass", "ESup", G::Generalization, true},
    {"Extract Subclass", "ESub", G::Generalization, false},
    {"Extract Interface", "EI", G::Generalization, true},
    {"Pull Up Attribute", "PUA", G::Generalization, true},
    {"Push Down Attribute", "PDA", G::Generalization, true},
    {"Pull Up Method", "PUM", G::Generalization, true},
    {"Push Down Method", "PDM", G::Generalization, true},
    {"Split Class", "SClass", G::Generalization, false},
    {"Merge Class", "MerC", G::Generalization, false},
    // Object Replacement
    {"Replace Loop With Pipeline", "RLWP", G::ObjectReplacement, false},
    {"Replace Anonymous With Lambda", "RAWL", G::ObjectReplacement, false},
    {"Replace Pipeline With Loop", "RPWL", G::ObjectReplacement, false},
    {"Replace Anonymous With Class", "RAWC", G::ObjectReplacement, false},
    {"Replace Generic With Diamond", "RGWD", G::ObjectReplacement, false},
    {"Replace Conditional With Ternary", "RCWT", G::ObjectReplacement, false},
    // Package Management
    {"Rename Package", "RPack", G::PackageManagement, true},
    {"Move Package", "MP", G::PackageManagement, false},
    {"Split Package", "SPack", G::PackageManagement, false},
    {"Merge Package", "MPack", G::PackageManagement, false},
    // Test Specific
    {"Parameterize Test", "PT", G::TestSpecific, false},
    {"Assert Throws", "AT", G::TestSpecific, false},
    // Others
    {"Move And Rename Attribute", "MARA", G::Others, false},
    {"Move And Inline Method", "MAIM", G::Others, false},
    {"Move And Rename Class", "MARC", G::Others, false},
    {"Move And Rename Method", "MARM", G::Others, false},
    {"Extract And Move Method", "EAMM", G::Others, false},
    {"Add Class Annotation", "ACA", G::Others, false},
    {"Add Attribute Annotation", "AAA", G::Others, false},
    {"Add Method Annotation", "AMA", G::Others, false},
    {"Add Parameter Annotation", "APA", G::Others, false},
    {"Add Variable Annotation", "AVA", G::Others, false},
    {"Modify Class Annotation", "MCA", G::Others, false},
    {"Modify Attribute Annotation", "MAA", G::Others, false},
    {"Modify Method Annotation", "MMA", G::Others, false},
    {"Modify Parameter Annotation", "MPA", G::Others, false},
    {"Modify Variable Annotation", "MVA", G::Others, false},
    {"Remove Class Annotation", "RCA", G::Others, false},
    {"Remove Attribute Annotation", "RAA", G::Others, false},
    {"Remove Method Annotation", "RMA", G::Others, false},
    {"Remove Parameter Annotation", "RPA", G::Others, false},
    {"Remove Variable Annotation", "RVA", G::Others, false},
    {"Add Thrown Exception Type", "ATET", G::Others, false},
    {"Change Thrown Exception Type", "CTET", G::Others, false},
    {"Remove Thrown Exception Type", "RTET", G::Others, false},
    {"Move Source Folder", "MSF", G::Others, false},
    {"Try With Resources", "TWR", G::Others, false},
    {"Invert Condition", "IC", G::Others, false},
    {"Collapse Hierarchy", "CH", G::Others, false},
};

template <typename Key>
std::unordered_map<std::string_view, const RefactoringType*> index_by(Key key) {
    std::unordered_map<std::string_view, const RefactoringType*> m;
    for (const auto& t : kTypes) m.emplace(key(t), &t);
    return m;
}

}  // namespace

const std::vector<RefactoringType>& taxonomy() { return kTypes; }

const RefactoringType* find_type(std::string_view name) {
    static const auto idx = index_by([](const RefactoringType& t) { return t.name; });
    auto it = idx.find(name);
    return it == idx.end() ? nullptr : it->second;
}

const RefactoringType* find_by_abbreviation(std::string_view abbr) {
    static const auto idx = index_by([](const RefactoringType& t) { return t.abbreviation; });
    auto it = idx.find(abbr);
    return it == idx.end() ? nullptr : it->second;
}

}  // namespace refwhy::refactoring
