"""End-to-end checks of the horizonlab binary: determinism of every shipped
scenario across thread counts, exit codes, and cross-method comparisons.

Usage: check_cli.py <horizonlab binary> <scenario dir> <scratch dir>
"""
import json
import pathlib
import shutil
import subprocess
import sys


def run(binary, *args):
    return subprocess.run([binary, *args], capture_output=True, text=True)


def main() -> int:
    binary, scenario_dir, scratch = sys.argv[1], pathlib.Path(sys.argv[2]), pathlib.Path(sys.argv[3])
    shutil.rmtree(scratch, ignore_errors=True)
    scratch.mkdir(parents=True)
    failures = []

    def expect(cond, what):
        if not cond:
            failures.append(what)

    for path in sorted(scenario_dir.glob("*.json")):
        dirs = []
        for threads in ("1", "4"):
            d = scratch / f"{path.stem}_t{threads}"
            p = run(binary, "run", "--scenario", str(path), "--out", str(d), "--threads", threads)
            expect(p.returncode == 0, f"{path.name} --threads {threads}: exit {p.returncode} {p.stderr}")
            dirs.append(d)
        summary = json.loads((dirs[0] / "summary.json").read_text())
        expect(summary["status"] == "ok", f"{path.name}: status {summary['status']}")
        for name in summary["artifacts"] + ["summary.json"]:
            a, b = (dirs[0] / name).read_bytes(), (dirs[1] / name).read_bytes()
            expect(a == b, f"{path.name}: {name} differs between thread counts")
        stray = [p for p in dirs[0].rglob("*.tmp.*")]
        expect(not stray, f"{path.name}: temporary files left behind: {stray}")

    def compare(a, b, *extra):
        p = run(binary, "compare", str(scratch / f"{a}_t1"), str(scratch / f"{b}_t1"), *extra)
        return p.returncode, (json.loads(p.stdout) if p.stdout.strip() else None)

    code, rep = compare("figures", "figures")
    expect(code == 0 and rep["max_abs"] == 0.0, "identical runs must give an all-zero diff")
    code, rep = compare("horizon_tanh_shooting", "horizon_tanh_picard", "--tolerance", "1e-5", "--range", "0", "50")
    expect(code == 0, f"shooting vs Picard exceeds 1e-5: {rep and rep['max_abs']}")
    minkowski = json.loads((scratch / "wave_dn_minkowski_direct_t1" / "summary.json").read_text())
    h = minkowski["results"]["finest"]["h"]
    code, rep = compare("wave_dn_minkowski_direct", "wave_dn_minkowski_analytic", "--columns", "lambda_f",
                        "--tolerance", repr(10 * h * h))
    expect(code == 0, f"flat DN trace differs from f' by more than 10 h^2: {rep and rep['max_abs']}")
    expect(min(minkowski["results"]["refinement"]["orders"]) >= 1.5, "flat DN order below 1.5")
    code, rep = compare("wave_dn_sink_direct", "wave_dn_sink_characteristic", "--columns", "lambda_f",
                        "--tolerance", "1e-3")
    expect(code == 0, f"sink DN traces differ by more than 1e-3: {rep and rep['max_abs']}")
    code, _ = compare("figures", "horizon_tanh_picard")
    expect(code == 2, f"incompatible task types must exit 2, got {code}")

    bad = scratch / "malformed.json"
    bad.write_text(json.dumps({"name": "bad", "task": "horizon", "params": {"x0_min": 1}}))
    out = scratch / "malformed_out"
    p = run(binary, "run", "--scenario", str(bad), "--out", str(out))
    expect(p.returncode == 2, f"malformed scenario: exit {p.returncode}")
    expect(not out.exists(), "malformed scenario left artifacts")
    expect(p.stderr.count("\n  /") >= 2, f"errors are not listed exhaustively: {p.stderr}")

    p = run(binary, "schema")
    expect(p.returncode == 0 and json.loads(p.stdout)["title"], "schema subcommand")

    for f in failures:
        print("FAIL", f)
    print(f"{len(failures)} failures")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
