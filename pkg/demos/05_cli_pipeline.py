"""
The same workflow from the command line
=======================================

Everything in the previous demos is reachable without writing Python:
`histmix synth` writes a stream, `histmix estimate` replays it, and
`histmix evaluate` sweeps seeds and checkpoints. Records are key=value
lines, so the output pipes cleanly into awk or pandas.
"""

import subprocess
import sys
import tempfile
from pathlib import Path

CONFIG = """\
source = piecewise-density-iid
levels = 5
n = 4096
checkpoints = 256,1024,4096
seeds = 0,1,2,3,4
"""


def run(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "histmix.cli", *args],
        capture_output=True,
        text=True,
        check=True,
    )
    return proc.stdout


def main():
    with tempfile.TemporaryDirectory() as tmp:
        cfg = Path(tmp) / "run.cfg"
        obs = Path(tmp) / "run.obs"
        cfg.write_text(CONFIG)

        run("synth", "--config", str(cfg), "--output", str(obs), "--quiet")
        print(f"wrote {sum(1 for _ in obs.open()) - 1} observations")

        print("\nestimate on the synthesized stream:")
        for line in run("estimate", "--config", str(cfg), "--input", str(obs)).splitlines():
            print(" ", line)

        print("\nmedian divergence across seeds (from `evaluate`):")
        for line in run("evaluate", "--config", str(cfg), "--quiet").splitlines():
            if line.startswith("record=kl_aggregate"):
                fields = dict(kv.split("=", 1) for kv in line.split()[1:])
                print(f"  n={fields['n']:>5}  median {fields['median_bits']} bits/obs")


if __name__ == "__main__":
    main()
