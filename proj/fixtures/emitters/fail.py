#!/usr/bin/env python3
"""Exits nonzero without output; used to exercise exit-status handling."""
import sys

sys.exit(3)
