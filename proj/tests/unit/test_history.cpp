#include <doctest.h>

#include "fixtures.hpp"
#include "refwhy/history/eloc.hpp"
#include "refwhy/history/miner.hpp"
#include "refwhy/util/ndjson.hpp"
#include "refwhy/util/process.hpp"
#include "refwhy/util/text.hpp"

#include <fstream>
#include <map>
#include <set>

using namespace refwhy;
using namespace refwhy::history;
using refwhy::testing::TempDir;

namespace {

nlohmann::json load_json(const std::filesystem::path& p) {
    return nlohmann::json::parse(util::read_file(p.string()));
}

std::string show(const std::filesystem::path& repo, const std::string& spec) {
    auto r = util::run({"git", "-C", repo.string(), "show", spec});
    REQUIRE(r.exit_code == 0);
    return r.out;
}

}  // namespace

TEST_CASE("normalize_author") {
    CHECK(normalize_author("Jane Doe", "Jane@X.COM") == "jane@x.com");
    CHECK(normalize_author("jane", "") == "jane");
    CHECK(normalize_author("A", "a@x.com") == normalize_author("B", "A@X.com"));
    CHECK(normalize_author("  Bob  ", "   ") == "bob");
    CHECK_THROWS_AS(normalize_author(" ", ""), EmptyIdentity);
}

TEST_CASE("count_effective_loc basics") {
    CHECK(count_effective_loc("", Language::java) == 0);
    CHECK(count_effective_loc("int a;\n// c\n/*\nb\n*/\nint d;", Language::java) == 2);
    CHECK(count_effective_loc("a\n\n  \nb\n", Language::other) == 2);
    CHECK(count_effective_loc("// only\n   \n", Language::other) == 1);
    // code before and after block comments on the same line
    CHECK(count_effective_loc("int a; /* x */\n/* y */ int b;\n/* z */\n", Language::java) == 2);
    CHECK(count_effective_loc("/* a */ /* b */\n", Language::java) == 0);
    // comment markers inside a literal that closes on the same line are text
    CHECK(count_effective_loc("String s = \"/*\";\nint x;\n", Language::java) == 2);
    CHECK(count_effective_loc("String u = \"http://x\"; int y;\n", Language::java) == 1);
    CHECK(count_effective_loc("char c = '/';\n", Language::java) == 1);
    CHECK(count_effective_loc("String e = \"a\\\"/*\";\nint z;\n", Language::java) == 2);
    // an unterminated literal does not shield the marker
    CHECK(count_effective_loc("s = \"abc /* \nstill comment */\n", Language::java) == 1);
    CHECK(count_effective_loc("int a;\r\n\r\n// c\r\n", Language::java) == 1);
    CHECK(language_for_path("a/B.java") == Language::java);
    CHECK(language_for_path("README.md") == Language::other);
}

TEST_CASE("count_lines follows git") {
    CHECK(count_lines("") == 0);
    CHECK(count_lines("a") == 1);
    CHECK(count_lines("a\n") == 1);
    CHECK(count_lines("a\nb") == 2);
    CHECK(count_lines("\n\n") == 2);
}

TEST_CASE("stream_commits rejects non-repositories") {
    TempDir tmp("refwhy-norepo");
    CHECK_THROWS_AS(stream_commits(tmp.path() / "missing"), RepoNotFound);
    CHECK_THROWS_AS(stream_commits(tmp.path()), RepoNotFound);
}

TEST_CASE("empty repository yields nothing") {
    TempDir tmp("refwhy-empty");
    refwhy::testing::git(tmp.path(), {"init", "-q"});
    CHECK(stream_commits(tmp.path()).empty());
}

TEST_CASE("single commit with empty message") {
    TempDir tmp("refwhy-single");
    auto repo = tmp.path();
    refwhy::testing::git(repo, {"init", "-q"});
    {
        std::ofstream f(repo / "ten.txt");
        for (int i = 0; i < 10; ++i) f << "line " << i << "\n";
    }
    refwhy::testing::git(repo, {"add", "ten.txt"});
    refwhy::testing::git(repo, {"-c", "user.name=T", "-c", "user.email=T@Example.org", "commit",
                                "-q", "--allow-empty-message", "-m", ""});
    auto commits = stream_commits(repo);
    REQUIRE(commits.size() == 1);
    CHECK(commits[0].message.empty());
    CHECK(commits[0].author_id == "t@example.org");
    CHECK(commits[0].parent_ids.empty());
    REQUIRE(commits[0].changes.size() == 1);
    const auto& ch = commits[0].changes[0];
    CHECK(ch.path == "ten.txt");
    CHECK(ch.lines_added == 10);
    CHECK(ch.lines_deleted == 0);
    CHECK(ch.lines_before == 0);
    CHECK(ch.kind == ChangeKind::added);
}

TEST_CASE("merge commits are diffed against the first parent") {
    TempDir tmp("refwhy-merge");
    auto repo = tmp.path();
    auto g = [&](std::initializer_list<std::string> args) { refwhy::testing::git(repo, args); };
    auto write = [&](const std::string& name, const std::string& body) {
        std::ofstream(repo / name) << body;
    };
    g({"init", "-q", "-b", "main"});
    g({"config", "user.name", "M"});
    g({"config", "user.email", "m@x.org"});
    write("a.txt", "1\n2\n3\n");
    g({"add", "."});
    g({"commit", "-q", "-m", "base"});
    g({"checkout", "-q", "-b", "side"});
    write("b.txt", "x\ny\n");
    g({"add", "."});
    g({"commit", "-q", "-m", "side work"});
    g({"checkout", "-q", "main"});
    write("a.txt", "1\n2\n3\n4\n");
    g({"commit", "-q", "-am", "main work"});
    g({"merge", "-q", "--no-ff", "-m", "merge side", "side"});

    auto commits = stream_commits(repo);
    REQUIRE(commits.size() == 4);
    const auto& merge = commits.back();
    CHECK(merge.parent_ids.size() == 2);
    REQUIRE(merge.changes.size() == 1);
    CHECK(merge.changes[0].path == "b.txt");
    CHECK(merge.changes[0].kind == ChangeKind::added);
    CHECK(merge.changes[0].lines_added == 2);
    // parents always precede children
    for (std::size_t i = 0; i < commits.size(); ++i)
        for (const auto& p : commits[i].parent_ids) {
            bool seen = false;
            for (std::size_t j = 0; j < i; ++j) seen = seen || commits[j].id == p;
            CHECK(seen);
        }

    StreamOptions fp;
    fp.first_parent_only = true;
    auto first_parent = stream_commits(repo, fp);
    CHECK(first_parent.size() == 3);
}

TEST_CASE("binary-only commit has zero churn") {
    TempDir tmp("refwhy-binary");
    auto repo = tmp.path();
    refwhy::testing::git(repo, {"init", "-q"});
    {
        std::ofstream f(repo / "blob.bin", std::ios::binary);
        const char bytes[] = {'\x89', 'P', 'N', 'G', '\0', '\x01', '\n', '\0'};
        f.write(bytes, sizeof bytes);
    }
    refwhy::testing::git(repo, {"add", "."});
    refwhy::testing::git(repo, {"-c", "user.name=B", "-c", "user.email=b@x", "commit", "-q", "-m", "bin"});
    auto commits = stream_commits(repo);
    REQUIRE(commits.size() == 1);
    REQUIRE(commits[0].changes.size() == 1);
    CHECK(commits[0].changes[0].binary);
    CHECK(commits[0].changes[0].lines_added == 0);
    CHECK(commits[0].changes[0].lines_deleted == 0);
}

TEST_CASE("mini-java stream matches the audited manifest") {
    TempDir tmp("refwhy-mj");
    auto repo = refwhy::testing::build_mini_java_repo(tmp.path());
    auto manifest = load_json(refwhy::testing::mini_java_dir() / "manifest.json")["commits"];
    auto commits = stream_commits(repo);
    REQUIRE(commits.size() == manifest.size());
    REQUIRE(commits.size() == 20);

    for (std::size_t i = 0; i < commits.size(); ++i) {
        const auto& c = commits[i];
        const auto& m = manifest[i];
        CAPTURE(i);
        CHECK(c.id == m["id"].get<std::string>());
        CHECK(c.timestamp == m["timestamp"].get<std::int64_t>());
        CHECK(c.message == m["message"].get<std::string>());
        CHECK(c.author_id == normalize_author(m["author_name"].get<std::string>(),
                                              m["author_email"].get<std::string>()));
        CHECK(c.parent_ids.size() == (i == 0 ? 0u : 1u));
        REQUIRE(c.changes.size() == m["changes"].size());
        std::map<std::string, nlohmann::json> by_path;
        for (const auto& mc : m["changes"]) by_path[mc["path"].get<std::string>()] = mc;
        for (std::size_t k = 0; k < c.changes.size(); ++k) {
            const auto& ch = c.changes[k];
            CAPTURE(ch.path);
            REQUIRE(by_path.count(ch.path) == 1);
            const auto& mc = by_path[ch.path];
            CHECK(ch.path == mc["path"].get<std::string>());
            CHECK(std::string(to_string(ch.kind)) == mc["kind"].get<std::string>());
            CHECK(ch.lines_added == mc["lines_added"].get<std::int64_t>());
            CHECK(ch.lines_deleted == mc["lines_deleted"].get<std::int64_t>());
            CHECK(ch.lines_before == mc["lines_before"].get<std::int64_t>());
            CHECK(ch.binary == mc.value("binary", false));
            if (mc.contains("old_path") && !mc["old_path"].is_null())
                CHECK(ch.old_path == mc["old_path"].get<std::string>());
            else
                CHECK_FALSE(ch.old_path.has_value());
            CHECK((ch.lines_before == 0) == (ch.kind == ChangeKind::added));
            CHECK(ch.lines_deleted <= ch.lines_before);
            if (ch.kind != ChangeKind::deleted && !ch.binary) {
                auto after = count_lines(show(repo, c.id + ":" + ch.path));
                CHECK(ch.lines_before - ch.lines_deleted + ch.lines_added == after);
            }
        }
    }
    std::set<std::string> authors;
    for (const auto& c : commits) authors.insert(c.author_id);
    CHECK(authors.size() == 3);
}

TEST_CASE("mini-java stream is deterministic and round-trips through NDJSON") {
    TempDir tmp("refwhy-mj2");
    auto repo = refwhy::testing::build_mini_java_repo(tmp.path());
    auto a = stream_commits(repo);
    auto b = stream_commits(repo);
    std::vector<nlohmann::json> ja, jb;
    for (const auto& c : a) ja.push_back(to_json(c));
    for (const auto& c : b) jb.push_back(to_json(c));
    CHECK(util::to_ndjson(ja) == util::to_ndjson(jb));
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(commit_from_json(ja[i]) == a[i]);
}

TEST_CASE("mini-java ELOC matches the hand count") {
    TempDir tmp("refwhy-mj3");
    auto repo = refwhy::testing::build_mini_java_repo(tmp.path());
    auto eloc = load_json(refwhy::testing::mini_java_dir() / "eloc.json");
    REQUIRE(eloc.size() == 7);
    for (auto it = eloc.begin(); it != eloc.end(); ++it) {
        CAPTURE(it.key());
        auto content = show(repo, "HEAD:" + it.key());
        CHECK(count_lines(content) == (*it)["lines"].get<std::int64_t>());
        CHECK(count_effective_loc(content, language_for_path(it.key())) ==
              (*it)["eloc"].get<std::int64_t>());
    }
}
