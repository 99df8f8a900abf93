#!/usr/bin/env python3
"""ibm-shaped fixture emitter: duplicate id values and unknown ARIA roles."""
import json
import re
import sys

KNOWN_ROLES = {
    "alert", "banner", "button", "checkbox", "dialog", "form", "heading", "img",
    "link", "list", "listitem", "main", "navigation", "presentation", "region",
    "search", "tab", "table", "textbox",
}


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

    seen = set()
    for m in re.finditer(r"<(\w+)\b[^>]*\bid\s*=\s*[\"']([^\"']+)[\"'][^>]*>", html, re.I):
        if m.group(2) in seen:
            results.append({
                "ruleID": "element_id_unique",
                "verdict": "fail",
                "level": "violation",
                "snippet": m.group(0),
            })
        seen.add(m.group(2))

    for m in re.finditer(r"<(\w+)\b[^>]*\brole\s*=\s*[\"']([^\"']+)[\"'][^>]*>", html, re.I):
        if m.group(2).lower() not in KNOWN_ROLES:
            results.append({
                "ruleID": "aria_role_valid",
                "verdict": "fail",
                "level": "violation",
                "snippet": m.group(0),
            })

    if html and re.search(r"<html\b[^>]*\blang\s*=", html, re.I):
        results.append({"ruleID": "html_lang_exists", "verdict": "pass", "level": ""})

    print(json.dumps({"results": results}))


if __name__ == "__main__":
    main()
