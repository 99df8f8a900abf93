#!/usr/bin/env python3
"""htmlcs-shaped fixture emitter: broken same-page links, missing title, missing lang."""
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
    messages = []

    ids = set(re.findall(r"\bid\s*=\s*[\"']([^\"']+)", html, re.I))
    for m in re.finditer(r"<a\b[^>]*\bhref\s*=\s*[\"']#([^\"']+)[\"'][^>]*>", html, re.I):
        if m.group(1) not in ids:
            messages.append({
                "type": 1,
                "code": "AAA.2_4_1.G1,G123,G124.NoSuchID",
                "msg": "This link points to a named anchor that does not exist",
                "element": "a",
                "excerpt": m.group(0),
            })

    title = re.search(r"<title\b[^>]*>([^<]*)</title>", html, re.I)
    if html and (not title or not title.group(1).strip()):
        messages.append({
            "type": 1,
            "code": "AAA.2_4_2.H25.1.NoTitleEl",
            "msg": "A title should be provided for the document",
            "element": "head",
            "excerpt": "<head>",
        })

    top = re.search(r"<html\b[^>]*>", html, re.I)
    if top and not re.search(r"\blang\s*=", top.group(0), re.I):
        messages.append({
            "type": 1,
            "code": "AAA.3_1_1.H57.2",
            "msg": "The html element should have a lang attribute",
            "element": "html",
            "excerpt": top.group(0),
        })

    print(json.dumps({"messages": messages}))


if __name__ == "__main__":
    main()
