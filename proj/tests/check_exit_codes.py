"""Exit-status contract of the command-line tool: 0 pass, 1 failure, 2 bad input."""
import subprocess
import sys
import tempfile
from pathlib import Path

cli, networks, data = sys.argv[1], Path(sys.argv[2]), Path(sys.argv[3])


def run(*args):
    return subprocess.run([cli, *map(str, args)], capture_output=True, text=True)


cases = [
    (("verify-coupling", "--network", networks / "single_edge.json", "--replicas", 2000), 0),
    (("verify-coupling", "--network", data / "malformed.json"), 2),
    (("gff-check", "--network", data / "disconnected.json"), 2),
    (("verify-coupling", "--network", data / "negative_beta.json"), 2),
    (("verify-coupling", "--network", data / "does_not_exist.json"), 2),
    (("loopsoup-check", "--network", networks / "triangle.json", "--cutoff", 4), 2),
    (("verify-coupling", "--network", networks / "triangle.json", "--replicas", 10), 2),
    (("no-such-suite", "--network", networks / "triangle.json"), 2),
    (("vrjp-check", "--network", networks / "triangle.json", "--order", "0,0,1", "--replicas", 200), 2),
]
failed = 0
for args, expected in cases:
    r = run(*args)
    ok = r.returncode == expected
    failed += not ok
    print(("ok  " if ok else "BAD ") + f"exit {r.returncode} (want {expected}): {' '.join(map(str, args))}")
    if not ok:
        print(r.stdout[-2000:], r.stderr[-2000:])
    if expected == 2 and "error" not in r.stderr:
        print("BAD no error message on stderr")
        failed += 1

with tempfile.TemporaryDirectory() as tmp:
    config = Path(tmp) / "config.json"
    config.write_text('{"suite": "verify-coupling", "replicas": 2000, "seed": 5, "out": "%s"}' % (Path(tmp) / "out"))
    r = run("--config", config, "--network", networks / "single_edge.json")
    if r.returncode != 0 or not (Path(tmp) / "out" / "report.json").exists():
        print("BAD config run", r.returncode, r.stderr)
        failed += 1
    else:
        print("ok  config file run wrote report.json")

sys.exit(1 if failed else 0)
