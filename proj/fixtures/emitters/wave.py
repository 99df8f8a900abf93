#!/usr/bin/env python3
"""wave-shaped fixture emitter: count-carrying error/contrast categories."""
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

    errors = {}
    alt_missing = sum(1 for m in re.finditer(r"<img\b[^>]*>", html, re.I)
                      if not re.search(r"\balt\s*=", m.group(0), re.I))
    if alt_missing:
        errors["alt_missing"] = {"count": alt_missing, "description": "Missing alternative text"}

    ids = set(re.findall(r"\bid\s*=\s*[\"']([^\"']+)", html, re.I))
    broken = sum(1 for m in
                 re.finditer(r"<a\b[^>]*\bhref\s*=\s*[\"']#([^\"']+)[\"']", html, re.I)
                 if m.group(1) not in ids)
    if broken:
        errors["link_internal_broken"] = {"count": broken, "description": "Broken same-page link"}

    labeled = set(re.findall(r"<label\b[^>]*\bfor\s*=\s*[\"']([^\"']+)", html, re.I))
    labels = 0
    for m in re.finditer(r"<input\b[^>]*>", html, re.I):
        tag = m.group(0)
        if re.search(r"type\s*=\s*[\"']?hidden", tag, re.I):
            continue
        if re.search(r"\b(aria-label|title)\s*=", tag, re.I):
            continue
        own = re.search(r"\bid\s*=\s*[\"']([^\"']+)", tag, re.I)
        if own and own.group(1) in labeled:
            continue
        labels += 1
    if labels:
        errors["label_missing"] = {"count": labels, "description": "Missing form label"}

    contrast = {}
    dim = len(re.findall(r"class\s*=\s*[\"'][^\"']*low-contrast", html, re.I))
    if dim:
        contrast["contrast"] = {"count": dim, "description": "Very low contrast"}

    categories = {}
    if errors:
        categories["error"] = {"items": errors}
    if contrast:
        categories["contrast"] = {"items": contrast}
    print(json.dumps({"categories": categories}))


if __name__ == "__main__":
    main()
