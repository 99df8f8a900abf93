#!/usr/bin/env python3
"""alfa-shaped fixture emitter: r2 (img alt) and r12 (button name).

Understands --rules a,b,c: when present, only the named rules run.
"""
import json
import re
import sys


def load(url):
    if not url.startswith("file://"):
        return ""
    try:
        with open(url[7:], "rb") as fh:
            return fh.read().decode("utf-8", "replace")
    except OSError:
        return ""


def main():
    args = sys.argv[1:]
    url = ""
    rules = None
    i = 0
    while i < len(args):
        if args[i] == "--rules" and i + 1 < len(args):
            rules = set(args[i + 1].split(","))
            i += 2
        elif not url:
            url = args[i]
            i += 1
        else:
            i += 1

    html = load(url)
    results = []

    def wanted(rule):
        return rules is None or rule in rules

    if wanted("r2"):
        for m in re.finditer(r"<img\b[^>]*>", html, re.I):
            if not re.search(r"\balt\s*=", m.group(0), re.I):
                results.append({
                    "ruleID": "r2",
                    "verdict": "failed",
                    "level": "",
                    "snippet": m.group(0),
                })

    if wanted("r12"):
        for m in re.finditer(r"<button\b[^>]*>(.*?)</button>", html, re.I | re.S):
            tag = re.match(r"<button\b[^>]*>", m.group(0), re.I).group(0)
            text = re.sub(r"<[^>]*>", "", m.group(1)).strip()
            if not text and not re.search(r"\baria-label\s*=", tag, re.I):
                results.append({
                    "ruleID": "r12",
                    "verdict": "cantTell",
                    "level": "",
                    "snippet": m.group(0),
                })

    print(json.dumps({"results": results}))


if __name__ == "__main__":
    main()
