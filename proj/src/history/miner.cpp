#include "refwhy/history/miner.hpp"

#include "refwhy/util/process.hpp"
#include "refwhy/util/text.hpp"

#include <spdlog/spdlog.h>

#include <memory>
#include <unordered_map>

namespace refwhy::history {

namespace fs = std::filesystem;

namespace {

const std::string kNullSha(40, '0');

struct RawEntry {
    char status = 'M';
    std::string old_mode, new_mode, old_sha, new_sha;
    std::string path;
    std::optional<std::string> old_path;
};

struct NumstatEntry {
    std::int64_t added = 0, deleted = 0;
    bool binary = false;
};

// Long-lived `git cat-file --batch` used to size parent-revision blobs.
class BlobReader {
public:
    BlobReader(const fs::path& repo, const std::string& git)
        : proc_({git, "-C", repo.string(), "cat-file", "--batch"}) {}

    ~BlobReader() {
        proc_.close_stdin();
        proc_.read_all();
        proc_.wait();
    }

    std::int64_t line_count(const std::string& sha, const std::string& commit) {
        proc_.write(sha + "\n");
        std::string header;
        if (!proc_.read_until(header, '\n'))
            throw CorruptHistory("cat-file terminated while reading " + sha + " in commit " + commit);
        auto parts = util::split(header, ' ');
        if (parts.size() < 3)
            throw CorruptHistory("object " + sha + " unreadable in commit " + commit + " (" + header + ")");
        auto size = util::parse_int(parts[2]);
        if (!size) throw CorruptHistory("bad cat-file header '" + header + "'");
        std::string body;
        if (!proc_.read_exact(body, static_cast<std::size_t>(*size) + 1))
            throw CorruptHistory("short read of object " + sha + " in commit " + commit);
        body.pop_back();
        return count_lines(body);
    }

private:
    util::Subprocess proc_;
};

std::int64_t parse_count(const std::string& s, bool& binary) {
    if (s == "-") {
        binary = true;
        return 0;
    }
    auto v = util::parse_int(s);
    if (!v || *v < 0) throw CorruptHistory("unexpected numstat count '" + s + "'");
    return *v;
}

std::string strip_trailing_newlines(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return s;
}

CommitRecord parse_record(const std::string& rec, BlobReader& blobs) {
    CommitRecord c;
    std::size_t pos = 0;
    auto field = [&](const char* what) {
        auto end = rec.find('\0', pos);
        if (end == std::string::npos) throw CorruptHistory(std::string("truncated log record at ") + what);
        std::string out = rec.substr(pos, end - pos);
        pos = end + 1;
        return out;
    };
    c.id = field("hash");
    std::string parents = field("parents");
    std::string name = field("author name");
    std::string email = field("author email");
    std::string ts = field("timestamp");
    c.message = strip_trailing_newlines(field("message"));

    for (auto& p : util::split(parents, ' '))
        if (!p.empty()) c.parent_ids.push_back(p);
    auto t = util::parse_int(ts);
    if (!t) throw CorruptHistory("bad timestamp in commit " + c.id);
    c.timestamp = *t < 0 ? 0 : *t;
    try {
        c.author_id = normalize_author(name, email);
    } catch (const EmptyIdentity&) {
        spdlog::warn("commit {} has no author identity; using '<unknown>'", c.id);
        c.author_id = "<unknown>";
    }

    std::vector<std::string> tokens;
    while (pos < rec.size()) {
        auto end = rec.find('\0', pos);
        if (end == std::string::npos) end = rec.size();
        std::string tok = rec.substr(pos, end - pos);
        pos = end + 1;
        std::size_t lead = tok.find_first_not_of('\n');
        if (lead == std::string::npos) {
            if (!tok.empty()) continue;  // separator newlines
            tokens.emplace_back();       // empty token (rename numstat)
            continue;
        }
        tokens.push_back(tok.substr(lead));
    }

    std::vector<RawEntry> raw;
    std::unordered_map<std::string, NumstatEntry> numstat;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string& tok = tokens[i];
        if (tok.empty()) continue;
        if (tok[0] == ':') {
            auto parts = util::split(tok.substr(1), ' ');
            if (parts.size() < 5) throw CorruptHistory("bad raw diff line in commit " + c.id);
            RawEntry e;
            e.old_mode = parts[0];
            e.new_mode = parts[1];
            e.old_sha = parts[2];
            e.new_sha = parts[3];
            e.status = parts[4].empty() ? 'M' : parts[4][0];
            if (e.status == 'R' || e.status == 'C') {
                if (i + 2 >= tokens.size()) throw CorruptHistory("truncated rename in commit " + c.id);
                e.old_path = tokens[++i];
                e.path = tokens[++i];
            } else {
                if (i + 1 >= tokens.size()) throw CorruptHistory("truncated raw diff in commit " + c.id);
                e.path = tokens[++i];
            }
            raw.push_back(std::move(e));
        } else {
            auto parts = util::split(tok, '\t');
            if (parts.size() != 3) throw CorruptHistory("bad numstat line in commit " + c.id);
            NumstatEntry n;
            n.added = parse_count(parts[0], n.binary);
            n.deleted = parse_count(parts[1], n.binary);
            std::string path = parts[2];
            if (path.empty()) {
                if (i + 2 >= tokens.size()) throw CorruptHistory("truncated rename numstat in commit " + c.id);
                ++i;  // old path
                path = tokens[++i];
            }
            numstat[path] = n;
        }
    }

    for (auto& e : raw) {
        // Submodule pointers are not files of this repository.
        if (e.new_mode == "160000" || (e.status == 'D' && e.old_mode == "160000")) continue;
        FileChange ch;
        ch.path = e.path;
        switch (e.status) {
        case 'A': ch.kind = ChangeKind::added; break;
        case 'D': ch.kind = ChangeKind::deleted; break;
        case 'R': ch.kind = ChangeKind::renamed; ch.old_path = e.old_path; break;
        case 'C': ch.kind = ChangeKind::added; ch.old_path = e.old_path; break;
        default: ch.kind = ChangeKind::modified; break;
        }
        if (auto it = numstat.find(e.path); it != numstat.end()) {
            ch.lines_added = it->second.added;
            ch.lines_deleted = it->second.deleted;
            ch.binary = it->second.binary;
        }
        if (ch.kind != ChangeKind::added && e.old_sha != kNullSha)
            ch.lines_before = blobs.line_count(e.old_sha, c.id);
        c.changes.push_back(std::move(ch));
    }
    return c;
}

}  // namespace

std::int64_t count_lines(std::string_view content) {
    std::int64_t n = 0;
    for (char ch : content)
        if (ch == '\n') ++n;
    if (!content.empty() && content.back() != '\n') ++n;
    return n;
}

std::string normalize_author(std::string_view name, std::string_view email) {
    std::string e = util::to_lower(util::trim(email));
    if (!e.empty()) return e;
    std::string n = util::to_lower(util::trim(name));
    if (!n.empty()) return n;
    throw EmptyIdentity("both author name and email are blank");
}

void stream_commits(const fs::path& repo, const StreamOptions& opts,
                    const std::function<void(CommitRecord&&)>& sink) {
    std::error_code ec;
    if (!fs::is_directory(repo, ec)) throw RepoNotFound(repo.string() + " is not a directory");
    auto probe = util::run({opts.git, "-C", repo.string(), "rev-parse", "--git-dir"});
    if (probe.exit_code != 0) throw RepoNotFound(repo.string() + ": " + util::trim(probe.err));
    auto head = util::run({opts.git, "-C", repo.string(), "rev-parse", "--verify", "-q", "HEAD"});
    if (head.exit_code != 0) return;  // no commits yet

    std::vector<std::string> argv = {
        opts.git, "-C", repo.string(), "-c", "core.quotepath=off", "log", "-z", "--reverse",
        "--date-order", "--raw", "--numstat", "--no-abbrev", "--no-renames",
        "--diff-merges=first-parent", "--no-color", "--no-ext-diff", "--no-textconv",
        "--format=%x01%H%x00%P%x00%an%x00%ae%x00%at%x00%B%x00",
    };
    // --find-renames must come after --no-renames to re-enable detection.
    argv.push_back("-M" + std::to_string(opts.rename_threshold) + "%");
    if (opts.first_parent_only) argv.push_back("--first-parent");
    argv.push_back("HEAD");

    BlobReader blobs(repo, opts.git);
    util::Subprocess log(argv);
    std::string rec;
    bool first = true;
    while (log.read_until(rec, '\x01')) {
        if (first) {
            first = false;
            if (rec.empty()) continue;
        }
        sink(parse_record(rec, blobs));
    }
    int rc = log.wait();
    if (rc != 0) throw CorruptHistory(repo.string() + ": git log failed: " + util::trim(log.stderr_text()));
}

std::vector<CommitRecord> stream_commits(const fs::path& repo, const StreamOptions& opts) {
    std::vector<CommitRecord> out;
    stream_commits(repo, opts, [&](CommitRecord&& c) { out.push_back(std::move(c)); });
    return out;
}

}  // namespace refwhy::history
