#include <doctest.h>

#include "fixtures.hpp"
#include "refwhy/history/miner.hpp"
#include "refwhy/refactoring/instance.hpp"
#include "refwhy/refactoring/taxonomy.hpp"
#include "refwhy/util/ndjson.hpp"

#include <map>
#include <set>

using namespace refwhy;
using namespace refwhy::refactoring;

namespace {

std::string rm_fixture() { return (refwhy::testing::mini_java_dir() / "rm-output.json").string(); }

// Hand tally of rm-output.json, keyed by sha1 prefix.
const std::multiset<std::pair<std::string, std::string>>& expected_pairs() {
    static const std::multiset<std::pair<std::string, std::string>> m = {
        {"03e3aa6ce0", "Extract Method"},  {"03e3aa6ce0", "Extract Method"},
        {"03e3aa6ce0", "Move Method"},     {"03e3aa6ce0", "Rename Variable"},
        {"2d821f9517", "Extract Method"},  {"2d821f9517", "Inline Variable"},
        {"2d821f9517", "Rename Method"},   {"2d821f9517", "Add Parameter"},
        {"2f670f1c81", "Rename Class"},    {"2f670f1c81", "Change Variable Type"},
        {"2f22426c0b", "Move Class"},      {"2f22426c0b", "Change Attribute Access Modifier"},
        {"c2fe69a30b", "Extract Method"},  {"c2fe69a30b", "Rename Parameter"},
        {"c2fe69a30b", "Extract Variable"}, {"c2fe69a30b", "Move Attribute"},
        {"c2fe69a30b", "Pull Up Method"},
    };
    return m;
}

}  // namespace

TEST_CASE("taxonomy invariants") {
    const auto& tax = taxonomy();
    CHECK(tax.size() == 103);
    std::set<std::string_view> names, abbrevs;
    std::size_t reference = 0;
    std::map<Group, std::size_t> per_group;
    for (const auto& t : tax) {
        names.insert(t.name);
        abbrevs.insert(t.abbreviation);
        reference += t.in_reference_study;
        ++per_group[t.group];
        CHECK(find_type(t.name) == &t);
        CHECK(find_by_abbreviation(t.abbreviation) == &t);
    }
    CHECK(names.size() == 103);
    CHECK(abbrevs.size() == 103);
    CHECK(reference == 12);
    CHECK(per_group.size() == 10);
    for (auto abbr : {"EM", "IM", "MovC", "MM", "MA", "ESup", "EI", "PUA", "PDA", "PUM", "PDM", "RPack"}) {
        CAPTURE(abbr);
        auto t = find_by_abbreviation(abbr);
        REQUIRE(t);
        CHECK(t->in_reference_study);
    }
    CHECK(find_type("Extract Method")->abbreviation == "EM");
    CHECK(find_type("Extracted Method") == nullptr);
    CHECK(find_type("extract method") == nullptr);
}

TEST_CASE("parse_rm_json on the fixture") {
    auto inst = parse_rm_json(rm_fixture());
    REQUIRE(inst.size() == 17);
    std::multiset<std::pair<std::string, std::string>> got;
    std::set<std::string> ids, commits;
    for (const auto& i : inst) {
        got.insert({i.commit_id.substr(0, 10), std::string(i.type->name)});
        ids.insert(i.id);
        commits.insert(i.commit_id);
        CHECK(i.project == "mini-java");
        CHECK_FALSE(i.description.empty());
        CHECK_FALSE(i.primary_path().empty());
    }
    CHECK(got == expected_pairs());
    CHECK(ids.size() == 17);
    // the empty commit is discarded
    CHECK(commits.size() == 5);
    CHECK(inst[0].id == "mini-java/" + inst[0].commit_id + "/0");
    CHECK(inst[0].left.at(0).kind == "METHOD_DECLARATION");
}

TEST_CASE("parse_rm_json edge cases") {
    CHECK(parse_rm_json_text(R"({"commits": []})").empty());
    CHECK(parse_rm_json_text(R"({"commits": [{"sha1": "ab", "refactorings": []}]})").empty());
    CHECK_THROWS_AS(parse_rm_json_text(R"({"commits": [{"sha1": "ab", "refactorings": [
        {"type": "Extracted Method", "description": "x", "leftSideLocations": [], "rightSideLocations": []}]}]})"),
                    UnknownRefactoringType);
    try {
        parse_rm_json_text(R"({"commits": [{"sha1": "beef", "refactorings": [{"type": "Extracted Method"}]}]})");
        FAIL("expected throw");
    } catch (const UnknownRefactoringType& e) {
        std::string what = e.what();
        CHECK(what.find("Extracted Method") != std::string::npos);
        CHECK(what.find("beef") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_rm_json_text("{"), MalformedJson);
    CHECK_THROWS_AS(parse_rm_json_text("[]"), MalformedJson);
    CHECK_THROWS_AS(parse_rm_json_text(R"({"commits": [{"refactorings": []}]})"), MalformedJson);
    CHECK_THROWS_AS(parse_rm_json_text(R"({"commits": [{"sha1": "a", "refactorings": {}}]})"), MalformedJson);

    auto one = parse_rm_json_text(R"({"commits": [{"sha1": "ab", "refactorings": [
        {"type": "Rename Method", "description": "d"}]}]})", "fallback");
    REQUIRE(one.size() == 1);
    CHECK(one[0].project == "fallback");
    CHECK(one[0].left.empty());
    CHECK(one[0].primary_path().empty());

    auto url = parse_rm_json_text(R"({"commits": [{"repository": "https://github.com/x/proj.git", "sha1": "ab",
        "refactorings": [{"type": "Rename Method", "description": "d"}]}]})");
    CHECK(url.at(0).project == "proj");
}

TEST_CASE("instances round-trip through NDJSON") {
    auto inst = parse_rm_json(rm_fixture());
    std::vector<nlohmann::json> rows;
    for (const auto& i : inst) rows.push_back(to_json(i));
    auto text = util::to_ndjson(rows);
    auto back = util::read_ndjson_text(text);
    REQUIRE(back.size() == inst.size());
    for (std::size_t i = 0; i < inst.size(); ++i) CHECK(instance_from_json(back[i]) == inst[i]);
    auto bad = rows[0];
    bad["type"] = "Nope";
    CHECK_THROWS_AS(instance_from_json(bad), UnknownRefactoringType);
    bad.erase("type");
    CHECK_THROWS_AS(instance_from_json(bad), MalformedJson);
}

TEST_CASE("frequency_table") {
    CHECK(frequency_table({}).total() == 0);
    CHECK(frequency_table({}).count("Extract Method") == 0);
    auto inst = parse_rm_json(rm_fixture());
    auto ft = frequency_table(inst);
    CHECK(ft.total() == 17);
    CHECK(ft.count("Extract Method") == 4);
    CHECK(ft.count("Move Method") == 1);
    CHECK(ft.count("Pull Up Method") == 1);
    CHECK(ft.count("Inline Method") == 0);
    CHECK(ft.count("not a type") == 0);
    std::map<std::string, std::size_t> tally;
    for (const auto& [c, t] : expected_pairs()) ++tally[t];
    for (const auto& [t, n] : tally) CHECK(ft.count(t) == n);
    // multiset semantics
    auto dup = inst;
    dup.push_back(inst[0]);
    CHECK(frequency_table(dup).count(inst[0].type->name) == ft.count(inst[0].type->name) + 1);
}

TEST_CASE("instances join against the mined fixture history") {
    refwhy::testing::TempDir tmp("refwhy-rf");
    auto repo = refwhy::testing::build_mini_java_repo(tmp.path());
    std::set<std::string> ids;
    for (const auto& c : history::stream_commits(repo)) ids.insert(c.id);
    auto inst = parse_rm_json(rm_fixture());
    auto rep = join_instances(inst, ids);
    CHECK(rep.joined == 17);
    CHECK(rep.unmatched.empty());
    auto rep2 = join_instances(inst, {inst[0].commit_id});
    CHECK(rep2.joined == 4);
    CHECK(rep2.unmatched.size() == 13);
}
