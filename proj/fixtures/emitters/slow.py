#!/usr/bin/env python3
"""Sleeps past any sensible timeout; used to exercise timeout handling."""
import time

time.sleep(30)
print("{}")
