#!/usr/bin/env python3
"""qualweb-shaped fixture emitter: page title and iframe title checks."""
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
    url = sys.argv[1] if len(sys.argv) > 1 else ""
    html = load(url)
    results = []

    if html:
        title = re.search(r"<title\b[^>]*>([^<]*)</title>", html, re.I)
        if title and title.group(1).strip():
            results.append({"ruleID": "QW-ACT-R1", "verdict": "passed", "level": ""})
        else:
            results.append({
                "ruleID": "QW-ACT-R1",
                "verdict": "failed",
                "level": "",
                "snippet": "<head>",
            })

    for m in re.finditer(r"<iframe\b[^>]*>", html, re.I):
        if not re.search(r"\btitle\s*=", m.group(0), re.I):
            results.append({
                "ruleID": "QW-ACT-R19",
                "verdict": "failed",
                "level": "",
                "snippet": m.group(0),
            })

    print(json.dumps({"results": results}))


if __name__ == "__main__":
    main()
