"""Run the acceptance suite and print only the per-criterion summary lines."""
import subprocess
import sys
from pathlib import Path


def main():
    root = Path(__file__).resolve().parents[1]
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "-q", str(root / "tests" / "test_acceptance.py")],
        capture_output=True,
        text=True,
    )
    lines = [ln for ln in proc.stdout.splitlines() if ln.startswith("ACCEPTANCE") or "passed" in ln or "failed" in ln]
    print("\n".join(lines))
    return proc.returncode


if __name__ == "__main__":
    sys.exit(main())
