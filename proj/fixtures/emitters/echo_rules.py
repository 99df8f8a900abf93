#!/usr/bin/env python3
"""axe-shaped emitter that reports exactly the rules passed via --rules."""
import json
import sys

rules = []
args = sys.argv[1:]
for i, arg in enumerate(args):
    if arg == "--rules" and i + 1 < len(args):
        rules = [r for r in args[i + 1].split(",") if r]

violations = [{
    "id": rule,
    "impact": "minor",
    "description": "echoed rule",
    "nodes": [{"target": ["html"], "html": "<html>"}],
} for rule in rules]
print(json.dumps({"violations": violations}))
