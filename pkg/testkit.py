#!/usr/bin/env python3
"""
Shared helpers for the test scripts

Each test_*.py file runs under pytest or directly as a script; run_tests
gives the script mode its ✓/✗ report.
"""

import inspect
import os
import sys
import traceback
from pathlib import Path

import pytest

# Add the project root to Python path
BASE_DIR = Path(__file__).resolve().parent
sys.path.append(str(BASE_DIR))

SLOW_ENV = "RUN_SLOW"


def require_slow() -> None:
    """Skip long statistical runs unless RUN_SLOW=1"""
    if os.getenv(SLOW_ENV) != "1":
        pytest.skip(f"slow acceptance run; set {SLOW_ENV}=1")


def run_tests(namespace: dict) -> int:
    """Call every test_* function in a module namespace and print a report"""
    failures = 0
    for name, fn in list(namespace.items()):
        if not name.startswith("test_") or not callable(fn):
            continue
        if inspect.signature(fn).parameters:
            print(f"- {name} skipped (needs pytest fixtures)")
            continue
        try:
            fn()
            print(f"✓ {name}")
        except pytest.skip.Exception as e:
            print(f"- {name} skipped ({e})")
        except Exception as e:
            failures += 1
            print(f"✗ {name}: {e}")
            traceback.print_exc()
    print(f"\n{failures} failure(s)")
    return 1 if failures else 0
