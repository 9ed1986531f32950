"""Command-line front end: ``sunchain verify|spectrum|selftest``.

Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error,
3 eigensolver failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import time
from pathlib import Path

from . import __version__, fock, freefermion, selftest, spectra, young
from .config import ExperimentConfig, load_config
from .hamiltonian import ConfigError

log = logging.getLogger("sunchain")

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2, 3

CSV_FIELDS = [
    "draw",
    "M",
    "diagram",
    "sector",
    "feasible",
    "energy",
    "gap",
    "positivity",
    "highest_weight",
    "free_energy",
]


def _free_energy(chain, sector):
    eps = freefermion.single_particle_energies(chain.t, chain.L)
    return freefermion.free_sector_energy(eps, sector)


def _sector_rows(cfg: ExperimentConfig, chain, draw: int, with_checks: bool):
    rows, checks = [], []
    for sector in cfg.sectors:
        res = spectra.analyse_sector(chain, sector, cfg.solver, cfg.tolerances, label_all=True)
        row = {
            "draw": draw,
            "M": sum(sector),
            "diagram": young.diagram_from_sector(sector).label() if any(sector) else "",
            "sector": " ".join(map(str, sector)),
            "feasible": True,
            "energy": res.energy,
            "gap": res.gap,
            "positivity": res.positivity.passed,
            "highest_weight": res.highest_weight.passed if res.highest_weight else None,
            "free_energy": _free_energy(chain, sector) if cfg.is_free else None,
        }
        rows.append(row)
        if with_checks:
            vs = res.verdicts()
            vs.append(spectra.permuted_sector_consistency(chain, sector, cfg.solver, cfg.tolerances))
            if cfg.is_free:
                dev = abs(res.energy - row["free_energy"])
                vs.append(spectra.Verdict("free-fermion", dev <= 1e-10, dev))
            checks += [dict(v.to_dict(), sector=list(sector)) for v in vs]
    return rows, checks


def run(cfg: ExperimentConfig, with_checks: bool = True, jobs: int = 1) -> dict:
    """Run every draw; returns the report document."""
    runs, table = [], []
    for draw, chain in enumerate(cfg.chains()):
        entry = {"draw": draw, "couplings": {"t": list(chain.t), "J": list(chain.J), "K": list(chain.K)}}
        if cfg.M:
            reports = []
            for M in cfg.M:
                rep = spectra.level_ordering_report(chain, M, cfg.solver, cfg.tolerances, jobs)
                doc = rep.to_dict()
                doc.pop("config")
                if cfg.is_free:
                    for d in doc["diagrams"]:
                        if d["feasible"]:
                            d["free_energy"] = _free_energy(chain, d["sector"])
                            if with_checks:
                                dev = abs(d["energy"] - d["free_energy"])
                                d["free_fermion"] = spectra.Verdict("free-fermion", dev <= 1e-10, dev).to_dict()
                if not with_checks:
                    doc = {k: doc[k] for k in ("M", "diagrams", "warnings")}
                reports.append(doc)
                for d in doc["diagrams"]:
                    table.append(
                        {
                            "draw": draw,
                            "M": M,
                            "diagram": d["diagram"],
                            "sector": " ".join(map(str, d["sector"])),
                            "feasible": d["feasible"],
                            "energy": d["energy"],
                            "gap": d["gap"],
                            "positivity": d["positivity"],
                            "highest_weight": d["highest_weight"],
                            "free_energy": d.get("free_energy"),
                        }
                    )
            entry["reports"] = reports
        else:
            rows, checks = _sector_rows(cfg, chain, draw, with_checks)
            table += rows
            entry["sectors"] = rows
            if with_checks:
                entry["checks"] = checks
        runs.append(entry)
    return {
        "schema_version": SCHEMA_VERSION,
        "tool": "sunchain",
        "version": __version__,
        "config": cfg.to_dict(),
        "runs": runs,
        "table": table,
    }


def collect_verdicts(doc: dict) -> list[dict]:
    out = []
    for run_ in doc["runs"]:
        for rep in run_.get("reports", []):
            for s in rep.get("sectors", []):
                out += [dict(c, draw=run_["draw"], M=rep["M"], sector=s["sector"]) for c in s["checks"]]
            if "ground_diagram" in rep:
                out.append(dict(rep["ground_diagram"], draw=run_["draw"], M=rep["M"]))
                out.append(dict(rep["ground_multiplicity"], draw=run_["draw"], M=rep["M"]))
                out.append(
                    {"check": "ordering", "passed": not rep["violations"], "value": len(rep["violations"]),
                     "note": "", "draw": run_["draw"], "M": rep["M"]}
                )
                out += [dict(p, draw=run_["draw"], M=rep["M"]) for p in rep["permutation"]]
            for d in rep["diagrams"]:
                if "free_fermion" in d:
                    out.append(dict(d["free_fermion"], draw=run_["draw"], M=rep["M"], diagram=d["diagram"]))
        out += [dict(c, draw=run_["draw"]) for c in run_.get("checks", [])]
    return out


def table_csv(doc: dict) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in doc["table"]:
        writer.writerow({k: ("" if row.get(k) is None else row[k]) for k in CSV_FIELDS})
    return buf.getvalue()


def write_outputs(doc: dict, out_dir: Path, fmt: str, manifest: dict) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt in ("json", "both"):
        p = out_dir / "report.json"
        p.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        written.append(p)
    if fmt in ("csv", "both"):
        p = out_dir / "table.csv"
        p.write_text(table_csv(doc))
        written.append(p)
    p = out_dir / "manifest.json"
    p.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    written.append(p)
    return written


def _manifest(cfg_echo, seed, verdicts, wall, timing: bool) -> dict:
    passed = sum(1 for v in verdicts if v["passed"] is True)
    failed = sum(1 for v in verdicts if v["passed"] is False)
    indeterminate = sum(1 for v in verdicts if v["passed"] is None)
    return {
        "tool": "sunchain",
        "version": __version__,
        "config": cfg_echo,
        "seed": seed,
        "checks": {"passed": passed, "failed": failed, "indeterminate": indeterminate},
        "wall_time_s": round(wall, 3) if timing else None,
    }


def _load(args) -> ExperimentConfig:
    overrides = {"L": args.L, "N": args.N, "M": args.M, "seed": args.seed, "out_dir": args.out_dir, "format": args.format}
    return load_config(args.config, overrides)


def cmd_verify(args) -> int:
    start = time.perf_counter()
    cfg = _load(args)
    doc = run(cfg, with_checks=True, jobs=args.jobs)
    verdicts = collect_verdicts(doc)
    failures = [v for v in verdicts if v["passed"] is not True]
    doc["failures"] = failures
    doc["passed"] = not failures
    manifest = _manifest(doc["config"], cfg.seed, verdicts, time.perf_counter() - start, not args.no_timing)
    for p in write_outputs(doc, Path(cfg.out_dir), cfg.format, manifest):
        log.info("wrote %s", p)
    if failures:
        for f in failures:
            where = " ".join(f"{k}={f[k]}" for k in ("draw", "M", "sector", "diagram") if k in f)
            print(f"FAIL {f['check']} ({where}) value={f['value']} {f['note']}".rstrip(), file=sys.stderr)
        return EXIT_FAIL
    print(f"all {len(verdicts)} checks passed")
    return EXIT_OK


def cmd_spectrum(args) -> int:
    start = time.perf_counter()
    cfg = _load(args)
    doc = run(cfg, with_checks=False, jobs=args.jobs)
    manifest = _manifest(doc["config"], cfg.seed, [], time.perf_counter() - start, not args.no_timing)
    for p in write_outputs(doc, Path(cfg.out_dir), cfg.format, manifest):
        log.info("wrote %s", p)
    return EXIT_OK


def cmd_selftest(args) -> int:
    results = selftest.run_selftest()
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}")
    if args.out_dir:
        verdicts = [{"check": r.name, "passed": r.passed, "value": None, "note": r.detail} for r in results]
        manifest = _manifest({"selftest": True, "seed": selftest.SELFTEST_SEED}, selftest.SELFTEST_SEED, verdicts, 0.0, False)
        Path(args.out_dir).mkdir(parents=True, exist_ok=True)
        (Path(args.out_dir) / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sunchain", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("config", help="JSON experiment config")
        p.add_argument("--L", type=int, help="override chain.L")
        p.add_argument("--N", type=int, help="override chain.N")
        p.add_argument("--M", type=int, help="override particles with a single M")
        p.add_argument("--seed", type=int, help="override couplings.seed")
        p.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="worker processes for sector diagonalisation")
        p.add_argument("--out-dir", help="override outputs.dir")
        p.add_argument("--format", choices=("json", "csv", "both"), help="override outputs.format")
        p.add_argument("--no-timing", action="store_true", help="omit wall time so manifests are reproducible")

    common(sub.add_parser("verify", help="run every theorem check and gate the exit status"))
    common(sub.add_parser("spectrum", help="dump the lowest energy per Young diagram"))
    st = sub.add_parser("selftest", help="exhaustive small-instance invariant suite")
    st.add_argument("--out-dir", help="also write manifest.json here")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    commands = {"verify": cmd_verify, "spectrum": cmd_spectrum, "selftest": cmd_selftest}
    try:
        return commands[args.command](args)
    except (ConfigError, fock.SectorError, fock.ChainSizeError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except spectra.SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
