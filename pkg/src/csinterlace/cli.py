"""Command-line front end and reproduction pipelines.

Every command is deterministic given its parameters; each output file gets
a sibling ``<name>.manifest.json`` recording the command, full parameter
set, seed, toolkit version, and input digests, so equal manifests imply
byte-identical outputs.  Numeric CSV fields are printed with 9 significant
digits for stable diffs.
"""

from __future__ import annotations

import concurrent.futures
import hashlib
import json
import os
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .fixtures import (
    load_coherent_example,
    load_noncoherent_spread,
    load_reference_pairs,
    reference_set_params,
)
from .golay import GolayPair, cached_enumerate_gcps, enumerate_gcps
from .interlace import (
    InterlaceConfig,
    QPSK_PHASES,
    SparseSpectrum,
    UciPayload,
    build_coherent,
    build_noncoherent,
    build_noncoherent_adjacent,
    cycling_baseline,
    rb_values,
    zadoff_chu_set,
)
from .linksim import SimConfig, run_sim
from .metrics import ccdf, cm_db, papr_db, peak_xcorr, synthesize
from .seqcore import format_quaternary, parse_quaternary, sequence_from_json

PAPR_BOUND_DB = 10 * np.log10(2.0)
DEFAULT_N_IDFT = 4096


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def _write_csv(path: Path, header: list[str], rows: list[tuple]) -> None:
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(
    anchor: Path, command: str, params: dict, inputs: list[Path], outputs: list[Path]
) -> None:
    manifest = {
        "command": command,
        "params": params,
        "toolkit_version": __version__,
        "inputs": {str(p): _sha256(p) for p in inputs},
        "outputs": [str(p) for p in outputs],
    }
    anchor.with_suffix(anchor.suffix + ".manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    )


def _thread_count() -> int:
    raw = os.environ.get("CSINTERLACE_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map_jobs(func, items):
    workers = _thread_count()
    if workers == 1:
        return [func(item) for item in items]
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def _geometry(nrb: int, nsc: int, nnull: int) -> InterlaceConfig:
    return InterlaceConfig(nrb, nsc, nnull)


def _build_spectrum(
    scheme: str, cfg: InterlaceConfig, seq_index: int, shift: float, bits: int, value: int
) -> SparseSpectrum:
    pairs = load_reference_pairs()
    pair = pairs[seq_index % len(pairs)]
    if scheme == "noncoherent":
        return build_noncoherent(cfg, load_noncoherent_spread(), pair, shift)
    if scheme == "noncoherent-adjacent":
        return build_noncoherent_adjacent(cfg, load_noncoherent_spread(), pair, shift)
    if scheme == "coherent":
        spread, half = load_coherent_example()
        payload = UciPayload("coherent", bits, value)
        return build_coherent(cfg, spread, half, payload.phases())
    if scheme == "cycling":
        return cycling_baseline(cfg, pair.a)
    if scheme == "zc":
        return zadoff_chu_set(cfg, 30)[seq_index % 30]
    raise click.ClickException(f"unknown scheme {scheme!r}")


@click.group()
@click.version_option(version=__version__)
def main():
    """Complementary-sequence interlace toolkit."""


@main.command("build-interlace")
@click.option("--scheme", default="noncoherent",
              type=click.Choice(["noncoherent", "noncoherent-adjacent", "coherent", "cycling", "zc"]))
@click.option("--nrb", default=10, show_default=True)
@click.option("--nsc", default=12, show_default=True)
@click.option("--nnull", default=108, show_default=True)
@click.option("--seq-index", default=0, show_default=True)
@click.option("--shift", default=0.0, show_default=True, help="Cyclic-shift resource (non-coherent).")
@click.option("--bits", default=1, show_default=True)
@click.option("--value", default=0, show_default=True, help="Payload value (coherent).")
@click.option("--out", type=click.Path(path_type=Path), default=None)
def build_interlace(scheme, nrb, nsc, nnull, seq_index, shift, bits, value, out):
    """Emit one frequency-domain interlace as JSON."""
    cfg = _geometry(nrb, nsc, nnull)
    spectrum = _build_spectrum(scheme, cfg, seq_index, shift, bits, value)
    payload = json.dumps(spectrum.to_json_dict(), sort_keys=True)
    if out is None:
        click.echo(payload)
    else:
        out.write_text(payload + "\n")
        _write_manifest(
            out, "build-interlace",
            {"scheme": scheme, "nrb": nrb, "nsc": nsc, "nnull": nnull,
             "seq_index": seq_index, "shift": shift, "bits": bits, "value": value},
            [], [out],
        )


def _metric_sweep(cfg: InterlaceConfig, schemes: tuple[str, ...], n_idft: int) -> list[tuple]:
    pairs = load_reference_pairs()
    spread = load_noncoherent_spread()
    rows: list[tuple] = []

    def evaluate(item):
        scheme, index, tag, spectrum = item
        wave = synthesize(spectrum, n_idft)
        return (scheme, index, tag, papr_db(wave), cm_db(wave))

    jobs = []
    if "noncoherent" in schemes:
        for i, pair in enumerate(pairs):
            for shift in range(cfg.n_sc):
                jobs.append(
                    ("noncoherent", i, f"shift={shift}",
                     build_noncoherent(cfg, spread, pair, shift))
                )
    if "noncoherent-adjacent" in schemes:
        for i, pair in enumerate(pairs):
            for shift in range(cfg.n_sc):
                jobs.append(
                    ("noncoherent-adjacent", i, f"shift={shift}",
                     build_noncoherent_adjacent(cfg, spread, pair, shift))
                )
    if "coherent" in schemes:
        spread_c, half = load_coherent_example()
        for w1_idx, w1 in enumerate(QPSK_PHASES):
            for w2_idx, w2 in enumerate(QPSK_PHASES):
                jobs.append(
                    ("coherent", 0, f"phases={w1_idx}{w2_idx}",
                     build_coherent(cfg, spread_c, half, (w1, w2)))
                )
    if "cycling" in schemes:
        for i, pair in enumerate(pairs):
            jobs.append(("cycling", i, "", cycling_baseline(cfg, pair.a)))
    if "zc" in schemes:
        for i, spectrum in enumerate(zadoff_chu_set(cfg, 30, n_idft)):
            jobs.append(("zc", i, "", spectrum))
    rows = _map_jobs(evaluate, jobs)
    return rows


_SWEEP_SCHEMES = ("noncoherent", "noncoherent-adjacent", "coherent", "cycling", "zc")


@main.command("eval-papr")
@click.option("--scheme", default="all",
              type=click.Choice(("all",) + _SWEEP_SCHEMES))
@click.option("--nrb", default=10)
@click.option("--nsc", default=12)
@click.option("--nnull", default=108)
@click.option("--n-idft", default=DEFAULT_N_IDFT, show_default=True)
@click.option("--out", type=click.Path(path_type=Path), required=True)
def eval_papr(scheme, nrb, nsc, nnull, n_idft, out):
    """PAPR/CM sweep: one CSV row per (scheme, sequence, shift/payload)."""
    schemes = _SWEEP_SCHEMES if scheme == "all" else (scheme,)
    rows = _metric_sweep(_geometry(nrb, nsc, nnull), schemes, n_idft)
    _write_csv(out, ["scheme", "seq_index", "selector", "papr_db", "cm_db"], rows)
    _write_manifest(out, "eval-papr",
                    {"scheme": scheme, "nrb": nrb, "nsc": nsc, "nnull": nnull,
                     "n_idft": n_idft}, [], [out])
    worst = max(r[3] for r in rows)
    click.echo(f"{len(rows)} waveforms, max PAPR {worst:.6f} dB")


@main.command("eval-cm")
@click.option("--scheme", default="all",
              type=click.Choice(("all",) + _SWEEP_SCHEMES))
@click.option("--nrb", default=10)
@click.option("--nsc", default=12)
@click.option("--nnull", default=108)
@click.option("--n-idft", default=DEFAULT_N_IDFT, show_default=True)
@click.option("--out", type=click.Path(path_type=Path), required=True)
def eval_cm(scheme, nrb, nsc, nnull, n_idft, out):
    """Cubic-metric sweep (same rows as eval-papr)."""
    schemes = _SWEEP_SCHEMES if scheme == "all" else (scheme,)
    rows = _metric_sweep(_geometry(nrb, nsc, nnull), schemes, n_idft)
    _write_csv(out, ["scheme", "seq_index", "selector", "papr_db", "cm_db"], rows)
    _write_manifest(out, "eval-cm",
                    {"scheme": scheme, "nrb": nrb, "nsc": nsc, "nnull": nnull,
                     "n_idft": n_idft}, [], [out])
    worst = max(r[4] for r in rows)
    click.echo(f"{len(rows)} waveforms, max CM {worst:.6f} dB")


def _xcorr_members(which: str, cfg: InterlaceConfig, seq_file: Path | None):
    if seq_file is not None:
        payload = json.loads(seq_file.read_text())
        return [sequence_from_json(s) for s in payload["sequences"]]
    pairs = load_reference_pairs()
    if which == "reference-c":
        return [p.a for p in pairs]
    if which == "reference-d":
        return [p.b for p in pairs]
    if which == "zc":
        # Per-block slices: cross-correlation that matters for interference
        # is block-by-block, and for this scheme every block differs.
        return [rb_values(s, cfg) for s in zadoff_chu_set(cfg, 30)]
    raise click.ClickException(f"unknown set {which!r}")


def _pairwise_rho(members, n_idft: int) -> list[tuple]:
    rows = []
    for i in range(len(members)):
        for j in range(len(members)):
            if i == j:
                continue
            mi, mj = members[i], members[j]
            if mi.ndim == 2:  # per-block comparison
                rho = max(
                    peak_xcorr(mi[r], mj[r], n_idft) for r in range(mi.shape[0])
                )
            else:
                rho = peak_xcorr(mi, mj, n_idft)
            rows.append((i, j, rho))
    return rows


@main.command("eval-xcorr")
@click.option("--set", "which", default="reference-c",
              type=click.Choice(["reference-c", "reference-d", "zc"]))
@click.option("--seq-file", type=click.Path(path_type=Path, exists=True), default=None,
              help="JSON file with a 'sequences' list; overrides --set.")
@click.option("--nrb", default=10)
@click.option("--nsc", default=12)
@click.option("--nnull", default=108)
@click.option("--n-idft", default=DEFAULT_N_IDFT, show_default=True)
@click.option("--out", type=click.Path(path_type=Path), required=True)
@click.option("--ccdf-out", type=click.Path(path_type=Path), default=None)
def eval_xcorr(which, seq_file, nrb, nsc, nnull, n_idft, out, ccdf_out):
    """Pairwise peak cross-correlation matrix and optional CCDF."""
    cfg = _geometry(nrb, nsc, nnull)
    members = _xcorr_members(which, cfg, seq_file)
    rows = _pairwise_rho(members, n_idft)
    _write_csv(out, ["i", "j", "rho"], rows)
    outputs = [out]
    if ccdf_out is not None:
        values = np.array([r[2] for r in rows])
        thresholds = np.linspace(0.0, 1.0, 101)
        curve = ccdf(values, thresholds)
        _write_csv(
            ccdf_out, ["threshold", "exceed_prob"],
            list(zip(curve.thresholds.tolist(), curve.exceed_prob.tolist())),
        )
        outputs.append(ccdf_out)
    _write_manifest(out, "eval-xcorr",
                    {"set": which, "seq_file": str(seq_file) if seq_file else None,
                     "nrb": nrb, "nsc": nsc, "nnull": nnull, "n_idft": n_idft},
                    [seq_file] if seq_file else [], outputs)
    click.echo(f"max rho {max(r[2] for r in rows):.6f} over {len(rows)} ordered pairs")


@main.command("enumerate-gcps")
@click.option("--length", default=12, show_default=True)
@click.option("--cache-dir", type=click.Path(path_type=Path), default=None)
@click.option("--out", type=click.Path(path_type=Path), required=True)
def enumerate_gcps_cmd(length, cache_dir, out):
    """Exhaustively enumerate canonical quaternary pairs of one length."""
    if cache_dir is not None:
        pairs = cached_enumerate_gcps(length, cache_dir)
    else:
        pairs = enumerate_gcps(length)
    payload = {
        "length": length,
        "count": len(pairs),
        "pairs": [list(p.as_strings()) for p in pairs],
    }
    out.write_text(json.dumps(payload) + "\n")
    _write_manifest(out, "enumerate-gcps",
                    {"length": length, "cache_dir": str(cache_dir) if cache_dir else None},
                    [], [out])
    click.echo(f"{len(pairs)} pairs of length {length}")


@main.command("search-sets")
@click.option("--beta", default=0.715, show_default=True)
@click.option("--u", default=128, show_default=True)
@click.option("--k", "k_target", default=30, show_default=True)
@click.option("--length", default=12, show_default=True)
@click.option("--seed-file", type=click.Path(path_type=Path, exists=True), default=None,
              help="JSON pair library; defaults to the enumerated library.")
@click.option("--cache-dir", type=click.Path(path_type=Path), default=Path(".csinterlace-cache"))
@click.option("--out", type=click.Path(path_type=Path), required=True)
def search_sets(beta, u, k_target, length, seed_file, cache_dir, out):
    """Greedy low-cross-correlation set construction over a seed library."""
    from .setsearch import build_sets, verify_sets

    if seed_file is not None:
        payload = json.loads(seed_file.read_text())
        seeds = [GolayPair.from_strings(sa, sb) for sa, sb in payload["pairs"]]
    else:
        seeds = cached_enumerate_gcps(length, cache_dir)
    sets = build_sets(seeds, beta, u, k_target)
    report = verify_sets(sets)
    payload = {
        "beta": beta,
        "u": u,
        "k_target": k_target,
        "admitted": sets.size,
        "pairs": [list(p.as_strings()) for p in sets.pairs],
        "max_xcorr": {
            "first": report.max_xcorr_first,
            "second": report.max_xcorr_second,
        },
        "verified": report.ok,
        "admission_log": [
            {"seed": r.seed_index, "orbit": r.orbit_index,
             "admitted": r.admitted, "max_xcorr": r.max_xcorr}
            for r in sets.admission_log
        ],
    }
    out.write_text(json.dumps(payload, indent=2) + "\n")
    _write_manifest(out, "search-sets",
                    {"beta": beta, "u": u, "k": k_target, "length": length,
                     "seed_file": str(seed_file) if seed_file else None},
                    [seed_file] if seed_file else [], [out])
    click.echo(
        f"admitted {sets.size}/{k_target}; "
        f"max xcorr {max(report.max_xcorr_first, report.max_xcorr_second):.6f}; "
        f"verified={report.ok}"
    )
    if not report.ok:
        raise click.ClickException("verification failed: " + "; ".join(report.violations))


@main.command("simulate-link")
@click.option("--scheme", default="noncoherent",
              type=click.Choice(["noncoherent", "coherent", "single-rb-noncoherent",
                                 "single-rb-coherent"]))
@click.option("--channel", default="iid_per_rb", type=click.Choice(["flat", "iid_per_rb"]))
@click.option("--snr-from", default=-10.0, show_default=True)
@click.option("--snr-to", default=10.0, show_default=True)
@click.option("--snr-step", default=2.0, show_default=True)
@click.option("--trials", default=10_000, show_default=True)
@click.option("--calibration-trials", default=100_000, show_default=True)
@click.option("--seed", default=1, show_default=True)
@click.option("--energy-norm", default="equal_total",
              type=click.Choice(["equal_total", "per_tone"]))
@click.option("--out", type=click.Path(path_type=Path), required=True)
def simulate_link(scheme, channel, snr_from, snr_to, snr_step, trials,
                  calibration_trials, seed, energy_norm, out):
    """Monte-Carlo DTX/ACK/NACK detection rates over an SNR grid."""
    grid = tuple(np.arange(snr_from, snr_to + snr_step / 2, snr_step).tolist())
    cfg = SimConfig(
        scheme=scheme, channel=channel, snr_grid_db=grid, n_trials=trials,
        calibration_trials=calibration_trials, rng_seed=seed, energy_norm=energy_norm,
    )
    report = run_sim(cfg)
    report.write_csv(out)
    _write_manifest(out, "simulate-link",
                    {"scheme": scheme, "channel": channel, "snr_from": snr_from,
                     "snr_to": snr_to, "snr_step": snr_step, "trials": trials,
                     "calibration_trials": calibration_trials, "seed": seed,
                     "energy_norm": energy_norm}, [], [out])
    click.echo(f"threshold {report.threshold:.6g}; wrote {len(report.points)} SNR points")


@main.command("import-sequences")
@click.argument("path", type=click.Path(path_type=Path, exists=True))
@click.option("--out", type=click.Path(path_type=Path), required=True)
def import_sequences(path, out):
    """Validate an external sequence file and register it for sweeps.

    Accepts a JSON object with a ``sequences`` list of symbol strings or
    [re, im] arrays.  Entries must be unimodular and of one shared length.
    """
    try:
        payload = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise click.ClickException(f"{path}: malformed JSON at line {exc.lineno}: {exc.msg}")
    if not isinstance(payload, dict) or "sequences" not in payload:
        raise click.ClickException(f"{path}: expected an object with a 'sequences' list")
    raw = payload["sequences"]
    if not raw:
        raise click.ClickException(f"{path}: 'sequences' list is empty")
    sequences = []
    length = None
    for index, entry in enumerate(raw):
        try:
            seq = sequence_from_json(entry)
        except (ValueError, TypeError) as exc:
            raise click.ClickException(f"{path}: sequence {index}: {exc}")
        if np.max(np.abs(np.abs(seq) - 1.0)) > 1e-9:
            raise click.ClickException(f"{path}: sequence {index} is not unimodular")
        if length is None:
            length = seq.size
        elif seq.size != length:
            raise click.ClickException(
                f"{path}: sequence {index} has length {seq.size}, expected {length}"
            )
        sequences.append(seq)
    normalized = {
        "length": length,
        "count": len(sequences),
        "sequences": [
            [[float(v.real), float(v.imag)] for v in seq] for seq in sequences
        ],
    }
    out.write_text(json.dumps(normalized) + "\n")
    _write_manifest(out, "import-sequences", {"source": str(path)}, [path], [out])
    click.echo(f"registered {len(sequences)} sequences of length {length}")


@main.command("reproduce")
@click.argument("figure", type=click.Choice(["papr", "cm", "xcorr",
                                             "sim-noncoherent", "sim-coherent"]))
@click.option("--out-dir", type=click.Path(path_type=Path), default=Path("reproduction"))
@click.option("--trials", default=2000, show_default=True,
              help="Trials per SNR point for the sim pipelines.")
@click.option("--seed", default=1, show_default=True)
@click.pass_context
def reproduce(ctx, figure, out_dir, trials, seed):
    """Run one reporting pipeline; exit nonzero if its embedded checks fail."""
    out_dir.mkdir(parents=True, exist_ok=True)
    failures: list[str] = []

    if figure in ("papr", "cm"):
        cfg = _geometry(10, 12, 108)
        rows = _metric_sweep(cfg, _SWEEP_SCHEMES, DEFAULT_N_IDFT)
        out = out_dir / f"{figure}.csv"
        _write_csv(out, ["scheme", "seq_index", "selector", "papr_db", "cm_db"], rows)
        _write_manifest(out, f"reproduce {figure}", {"n_idft": DEFAULT_N_IDFT}, [], [out])
        proposed = [r for r in rows if r[0] in ("noncoherent", "noncoherent-adjacent", "coherent")]
        cycling = [r for r in rows if r[0] == "cycling"]
        worst_papr = max(r[3] for r in proposed)
        if worst_papr > PAPR_BOUND_DB + 1e-6:
            failures.append(f"proposed max PAPR {worst_papr:.6f} dB exceeds the 3 dB bound")
        if figure == "cm":
            worst_cm = max(r[4] for r in proposed)
            cycling_cm = max(r[4] for r in cycling)
            if worst_cm >= cycling_cm:
                failures.append(
                    f"proposed CM {worst_cm:.3f} dB is not below cycling {cycling_cm:.3f} dB"
                )
        click.echo(f"max proposed PAPR {worst_papr:.6f} dB over {len(proposed)} waveforms")

    elif figure == "xcorr":
        cfg = _geometry(10, 12, 108)
        beta, _ = reference_set_params()
        outputs = []
        maxima = {}
        for which in ("reference-c", "reference-d", "zc"):
            members = _xcorr_members(which, cfg, None)
            rows = _pairwise_rho(members, DEFAULT_N_IDFT)
            out = out_dir / f"xcorr_{which}.csv"
            _write_csv(out, ["i", "j", "rho"], rows)
            values = np.array([r[2] for r in rows])
            curve = ccdf(values, np.linspace(0.0, 1.0, 101))
            ccdf_out = out_dir / f"xcorr_{which}_ccdf.csv"
            _write_csv(ccdf_out, ["threshold", "exceed_prob"],
                       list(zip(curve.thresholds.tolist(), curve.exceed_prob.tolist())))
            _write_manifest(out, "reproduce xcorr", {"set": which}, [], [out, ccdf_out])
            outputs += [out, ccdf_out]
            maxima[which] = float(values.max())
        for which in ("reference-c", "reference-d"):
            if maxima[which] > beta + 1e-9:
                failures.append(f"{which} max rho {maxima[which]:.6f} exceeds beta {beta}")
        if not 0.92 <= maxima["zc"] <= 0.98:
            failures.append(f"zc max rho {maxima['zc']:.6f} outside 0.95 +/- 0.03")
        click.echo(" ".join(f"{k}:{v:.4f}" for k, v in maxima.items()))

    else:
        scheme = "noncoherent" if figure == "sim-noncoherent" else "coherent"
        reports = {}
        for channel in ("flat", "iid_per_rb"):
            for sch in (scheme, f"single-rb-{scheme}"):
                cfg = SimConfig(
                    scheme=sch, channel=channel, n_trials=trials, rng_seed=seed,
                    calibration_trials=max(20_000, trials),
                )
                rep = run_sim(cfg)
                out = out_dir / f"{figure}_{channel}_{sch}.csv"
                rep.write_csv(out)
                _write_manifest(out, f"reproduce {figure}",
                                {"scheme": sch, "channel": channel, "trials": trials,
                                 "seed": seed}, [], [out])
                reports[(channel, sch)] = rep
        for (channel, sch), rep in reports.items():
            misses = [p.ack_miss for p in rep.points]
            cis = [p.ci_miss for p in rep.points]
            for k in range(len(misses) - 1):
                if misses[k + 1] > misses[k] + cis[k] + cis[k + 1]:
                    failures.append(
                        f"{channel}/{sch}: ack_miss not monotone within CI at point {k + 1}"
                    )
        iid_pair = [reports[("iid_per_rb", scheme)], reports[("iid_per_rb", f"single-rb-{scheme}")]]
        last_interlace = iid_pair[0].points[-1].ack_miss
        last_single = iid_pair[1].points[-1].ack_miss
        if last_interlace > last_single:
            failures.append("iid fading: interlace misses more than single block at top SNR")
        click.echo(f"wrote {len(reports)} reports to {out_dir}")

    if failures:
        for message in failures:
            click.echo(f"CHECK FAILED: {message}", err=True)
        ctx.exit(1)
    click.echo("embedded checks passed")


if __name__ == "__main__":
    main()
