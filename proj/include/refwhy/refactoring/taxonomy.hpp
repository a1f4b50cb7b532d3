#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace refwhy::refactoring {

enum class Group {
    ComposingMethods,
    MovingFeatures,
    ObjectModifiers,
    OrganizingData,
    SimplifyingMethodCalls,
    Generalization,
    ObjectReplacement,
    PackageManagement,
    TestSpecific,
    Others,
};

const char* to_string(Group g);

struct RefactoringType {
    std::string_view name;
    std::string_view abbreviation;
    Group group;
    bool in_reference_study;
};

// The 103 canonical RefactoringMiner type names.
const std::vector<RefactoringType>& taxonomy();

// Exact, case-sensitive lookup; nullptr when the name is not canonical.
const RefactoringType* find_type(std::string_view name);
const RefactoringType* find_by_abbreviation(std::string_view abbr);

}  // namespace refwhy::refactoring
