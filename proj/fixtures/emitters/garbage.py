#!/usr/bin/env python3
"""Prints something that is not JSON; used to exercise parse-failure handling."""
print("this is { not json")
