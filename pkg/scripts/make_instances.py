"""Regenerate the bundled benchmark instances in place."""
from pathlib import Path

from stochroute.datasets import write_all

if __name__ == "__main__":
    target = Path(__file__).resolve().parent.parent / "src" / "stochroute" / "datasets" / "instances"
    for path in write_all(target):
        print(path)
