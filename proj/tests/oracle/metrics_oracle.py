#!/usr/bin/env python3
"""Brute-force process-metric oracle for the mini-java fixture.

Reads the audited manifest (not git, not the C++ code) and recomputes every
metric for every (commit, file) pair directly from its definition by
rescanning the whole prior history each time. No incremental state.

Definitions (c = current commit, f = changed file, a = c's author key,
H(f) = earlier commits that touched f's lineage, following renames back to
the commit that added it):

  COMM = NUC = |H(f)|;  DDEV = distinct authors of H(f)
  ADEV = distinct authors of H(f) with t >= t_c - 180d
  CEXP = commits of H(f) by a;  REXP = same with t >= t_c - 30d
  AGE  = (t_c - t_last(H(f))) / 86400, 0 when H(f) is empty
  OWN/MINOR from cumulative LA per author over H(f) (MINOR: share < 0.05)
  NCOMM = earlier commits touching any lineage co-modified in H(f)
  NADEV/NDDEV = active/distinct authors of those commits
  NSCTR = distinct parent dirs touched by commits of H(f) authored by a
  SEXP = earlier commits by a touching a file in f's parent dir
  OEXP = 100 * (lines added by a) / (lines added in project), earlier commits
  EXP  = mean OEXP over distinct earlier authors
  NDEV = distinct authors over the union of H(g) for g in c
  ND = SCTR = distinct parent dirs in c; NS = distinct first segments
  NF = files in c; ENTROPY over la+ld churns in c
  ADD = LA / max(LT,1); DELE = LD / max(LT,1); FIX = keyword match

Writes tests/data/mini_java_expected_metrics.csv.
"""
import csv
import json
import math
import os
import re

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
MANIFEST = os.path.join(ROOT, "fixtures", "mini_java", "manifest.json")
OUT = os.path.join(ROOT, "data", "mini_java_expected_metrics.csv")

DAY = 86400
ADEV_WINDOW = 180 * DAY
REXP_WINDOW = 30 * DAY

COLUMNS = ["COMM", "ADEV", "DDEV", "ADD", "DELE", "OWN", "MINOR", "SCTR",
           "NADEV", "NDDEV", "NCOMM", "NSCTR", "OEXP", "EXP", "ND", "NS", "NF",
           "ENTROPY", "LA", "LD", "LT", "FIX", "NDEV", "AGE", "NUC", "CEXP",
           "REXP", "SEXP"]
RATIOS = {"ADD", "DELE", "OWN", "OEXP", "EXP", "ENTROPY", "AGE"}


def author_key(name, email):
    e = email.strip().lower()
    return e if e else name.strip().lower()


def parent_dir(path):
    return path.rsplit("/", 1)[0] if "/" in path else ""


def subsystem(path):
    return path.split("/", 1)[0] if "/" in path else ""


def is_fix(msg):
    return re.search(r"\b(fix|fixes|fixed|bug|bugs|defect|defects|patch)\b",
                     msg, re.IGNORECASE) is not None


def lineage_commits(commits, c, change):
    """Indices of commits before c that touched this change's lineage."""
    if change["kind"] == "added":
        return []
    name = change["old_path"] if change["kind"] == "renamed" else change["path"]
    out = []
    for j in range(c - 1, -1, -1):
        hit = [ch for ch in commits[j]["changes"] if ch["path"] == name]
        if not hit:
            continue
        ch = hit[0]
        if ch["kind"] == "deleted":
            break
        out.append(j)
        if ch["kind"] == "added":
            break
        if ch["kind"] == "renamed":
            name = ch["old_path"]
    return sorted(out)


def lineage_id(commits, j, change):
    """A lineage is identified by (commit index, path) of the change that added it."""
    hist = lineage_commits(commits, j, change)
    if change["kind"] == "added" or not hist:
        return (j, change["path"])
    first = hist[0]
    # The oldest commit in the history added the file; find its path there.
    name = change["old_path"] if change["kind"] == "renamed" else change["path"]
    for k in range(j - 1, first - 1, -1):
        for ch in commits[k]["changes"]:
            if ch["path"] == name and ch["kind"] == "renamed" and k != first:
                name = ch["old_path"]
    return (first, name)


def entropy(churns):
    live = [x for x in churns if x > 0]
    total = sum(live)
    if len(live) <= 1 or total == 0:
        return 0.0
    h = -sum((x / total) * math.log2(x / total) for x in live)
    return h / math.log2(len(live))


def main():
    commits = json.load(open(MANIFEST))["commits"]
    for c in commits:
        c["author"] = author_key(c["author_name"], c["author_email"])

    lineage = {}
    for j, c in enumerate(commits):
        for ch in c["changes"]:
            lineage[(j, ch["path"])] = lineage_id(commits, j, ch)

    rows = []
    for ci, c in enumerate(commits):
        a, t = c["author"], c["timestamp"]
        prior = range(ci)
        dirs = {parent_dir(ch["path"]) for ch in c["changes"]}
        subs = {subsystem(ch["path"]) for ch in c["changes"]}
        ent = entropy([ch["lines_added"] + ch["lines_deleted"] for ch in c["changes"]])

        added_by = {}
        for j in prior:
            k = commits[j]["author"]
            added_by.setdefault(k, 0)
            added_by[k] += sum(ch["lines_added"] for ch in commits[j]["changes"])
        total_added = sum(added_by.values())

        def oexp(k):
            return 100.0 * added_by.get(k, 0) / total_added if total_added else 0.0

        exp = (sum(oexp(k) for k in added_by) / len(added_by)) if added_by else 0.0

        ndev_authors = set()
        for ch in c["changes"]:
            for j in lineage_commits(commits, ci, ch):
                ndev_authors.add(commits[j]["author"])

        for ch in c["changes"]:
            hist = lineage_commits(commits, ci, ch)
            hist_authors = [commits[j]["author"] for j in hist]
            la, ld, lt = ch["lines_added"], ch["lines_deleted"], ch["lines_before"]

            per_author = {}
            for j in hist:
                k = commits[j]["author"]
                for g in commits[j]["changes"]:
                    if lineage[(j, g["path"])] == lineage_for(commits, lineage, ci, ch):
                        per_author[k] = per_author.get(k, 0) + g["lines_added"]
            tot = sum(per_author.values())
            own = max(per_author.values()) / tot if tot else 0.0
            minor = sum(1 for v in per_author.values() if v / tot < 0.05) if tot else 0

            co = set()
            for j in hist:
                for g in commits[j]["changes"]:
                    co.add(lineage[(j, g["path"])])
            neigh = [j for j in prior
                     if any(lineage[(j, g["path"])] in co for g in commits[j]["changes"])]
            nauth = {commits[j]["author"] for j in neigh}
            nauth_active = {commits[j]["author"] for j in neigh
                            if commits[j]["timestamp"] >= t - ADEV_WINDOW}

            nsctr = set()
            for j in hist:
                if commits[j]["author"] == a:
                    for g in commits[j]["changes"]:
                        nsctr.add(parent_dir(g["path"]))
            pkg = parent_dir(ch["path"])
            sexp = sum(1 for j in prior if commits[j]["author"] == a and
                       any(parent_dir(g["path"]) == pkg for g in commits[j]["changes"]))

            age = (t - commits[hist[-1]]["timestamp"]) / DAY if hist else 0.0
            row = {
                "commit": c["id"], "file": ch["path"],
                "COMM": len(hist),
                "ADEV": len({commits[j]["author"] for j in hist
                             if commits[j]["timestamp"] >= t - ADEV_WINDOW}),
                "DDEV": len(set(hist_authors)),
                "ADD": la / max(lt, 1), "DELE": ld / max(lt, 1),
                "OWN": own, "MINOR": minor, "SCTR": len(dirs),
                "NADEV": len(nauth_active), "NDDEV": len(nauth), "NCOMM": len(neigh),
                "NSCTR": len(nsctr), "OEXP": oexp(a), "EXP": exp,
                "ND": len(dirs), "NS": len(subs), "NF": len(c["changes"]),
                "ENTROPY": ent, "LA": la, "LD": ld, "LT": lt,
                "FIX": 1 if is_fix(c["message"]) else 0,
                "NDEV": len(ndev_authors), "AGE": max(age, 0.0), "NUC": len(hist),
                "CEXP": sum(1 for k in hist_authors if k == a),
                "REXP": sum(1 for j in hist if commits[j]["author"] == a
                            and commits[j]["timestamp"] >= t - REXP_WINDOW),
                "SEXP": sexp,
            }
            rows.append(row)

    with open(OUT, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["commit", "file"] + COLUMNS)
        for r in rows:
            w.writerow([r["commit"], r["file"]] +
                       [repr(float(r[k])) if k in RATIOS else str(r[k]) for k in COLUMNS])
    print(f"wrote {len(rows)} rows to {OUT}")


def lineage_for(commits, lineage, ci, ch):
    if ch["kind"] == "added":
        return (ci, ch["path"])
    return lineage_id(commits, ci, ch)


if __name__ == "__main__":
    main()
