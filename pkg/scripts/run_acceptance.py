"""Run the acceptance criteria and print one PASS/FAIL line each."""

import runpy
import sys
from pathlib import Path

sys.argv = [sys.argv[0]]
runpy.run_path(str(Path(__file__).resolve().parents[1] / "tests" / "test_acceptance.py"), run_name="__main__")
