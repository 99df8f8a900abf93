#!/usr/bin/env python3
"""axe-shaped fixture emitter: images without alt text, inputs without labels."""
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


def has_attr(tag, name):
    return re.search(r"\b%s\s*=" % name, tag, re.I) is not None


def attr(tag, name):
    m = re.search(r"\b%s\s*=\s*(\"([^\"]*)\"|'([^']*)'|([^\s>]+))" % name, tag, re.I)
    if not m:
        return None
    return m.group(2) or m.group(3) or m.group(4) or ""


def main():
    url = sys.argv[1] if len(sys.argv) > 1 else ""
    html = load(url)
    violations = []

    bad_imgs = [m.group(0) for m in re.finditer(r"<img\b[^>]*>", html, re.I)
                if not has_attr(m.group(0), "alt")]
    if bad_imgs:
        violations.append({
            "id": "image-alt",
            "impact": "critical",
            "description": "Images must have alternate text",
            "nodes": [{"target": ["img"], "html": tag} for tag in bad_imgs],
        })

    labeled = set(re.findall(r"<label\b[^>]*\bfor\s*=\s*[\"']([^\"']+)", html, re.I))
    bad_inputs = []
    for m in re.finditer(r"<input\b[^>]*>", html, re.I):
        tag = m.group(0)
        if (attr(tag, "type") or "").lower() == "hidden":
            continue
        if has_attr(tag, "aria-label") or has_attr(tag, "title"):
            continue
        if attr(tag, "id") in labeled:
            continue
        bad_inputs.append(tag)
    if bad_inputs:
        violations.append({
            "id": "label",
            "impact": "serious",
            "description": "Form elements must have labels",
            "nodes": [{"target": ["input"], "html": tag} for tag in bad_inputs],
        })

    print(json.dumps({"violations": violations}))


if __name__ == "__main__":
    main()
