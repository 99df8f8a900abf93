#!/usr/bin/env python3
"""nu-shaped fixture emitter: missing doctype and missing document language."""
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


def line_of(html, offset):
    return html.count("\n", 0, offset) + 1


def main():
    url = sys.argv[1] if len(sys.argv) > 1 else ""
    html = load(url)
    messages = []

    if html and not re.match(r"\s*<!doctype\b", html, re.I):
        messages.append({
            "type": "error",
            "subType": "no-doctype",
            "message": "Expected \"<!DOCTYPE html>\".",
            "lastLine": 1,
            "extract": html.split("\n", 1)[0][:80],
        })

    top = re.search(r"<html\b[^>]*>", html, re.I)
    if top and not re.search(r"\blang\s*=", top.group(0), re.I):
        messages.append({
            "type": "error",
            "subType": "no-lang",
            "message": "Consider adding a lang attribute to the html start tag.",
            "lastLine": line_of(html, top.start()),
            "extract": top.group(0),
        })

    print(json.dumps({"messages": messages}))


if __name__ == "__main__":
    main()
