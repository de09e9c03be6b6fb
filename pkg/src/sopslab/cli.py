"""Command-line front end.

Every subcommand reads an optional JSON experiment spec plus flag
overrides (flags win), validates before computing, writes CSV/JSON
artifacts into --out, and prints a JSON summary to stdout. Exit codes:
0 success, 2 validation error, 3 numerical failure. All output is
deterministic for a fixed spec: keys are sorted and floats are written
at full precision.
"""

from __future__ import annotations

import csv
import functools
import json
import math
import os
import sys

import click
import numpy as np

from . import classify as classify_mod
from .coupling import load_coupling_csv, mean_field, ring
from .ddesolve import integrate_coupled, trajectory_to_csv
from .errors import DomainError, NumericsError
from .feedback import tanh_feedback
from .floquet import monodromy_matrix, spectrum
from .lab import figure_experiment, ramp_history, sync_measure, write_sync_csv
from .limiting import cassini_boundary, hopf_beta, make_profile, nu_star
from .sops import default_step, export_sops, find_sops, limit_residuals

CONTEXT_SETTINGS = {"help_option_names": ["-h", "--help"]}


def _guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except DomainError as exc:
            click.echo(f"validation error: {exc}", err=True)
            sys.exit(2)
        except NumericsError as exc:
            click.echo(f"numerical failure: {exc}", err=True)
            sys.exit(3)

    return wrapper


def _merge_spec(spec_path: str | None, **flags) -> dict:
    cfg: dict = {}
    if spec_path:
        with open(spec_path) as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            raise DomainError(f"spec file {spec_path} must hold a JSON object")
        cfg.update(loaded)
    for key, value in flags.items():
        if value is not None and value != ():
            cfg[key] = value
    return cfg


def _need(cfg: dict, key: str, cast=float):
    if key not in cfg or cfg[key] is None:
        raise DomainError(f"missing required parameter '{key}' (flag or spec file)")
    try:
        return cast(cfg[key])
    except (TypeError, ValueError) as exc:
        raise DomainError(f"parameter '{key}' = {cfg[key]!r} is not a valid {cast.__name__}") from exc


def _get(cfg: dict, key: str, default, cast=float):
    if key not in cfg or cfg[key] is None:
        return default
    return cast(cfg[key])


def _outdir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path


def _emit(payload: dict) -> None:
    click.echo(json.dumps(payload, sort_keys=True, indent=2))


def _write_json(payload: dict, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _profile_payload(prof) -> dict:
    return {
        "alpha": prof.alpha,
        "a": prof.a,
        "b": prof.b,
        "swapped": prof.swapped,
        "rho1": prof.rho1,
        "rho2": prof.rho2,
        "q1": prof.q1,
        "q2": prof.q2,
        "omega_star": prof.omega_star,
        "r0": prof.r0,
        "delta_disc": prof.delta_disc,
    }


spec_option = click.option("--spec", type=click.Path(exists=True, dir_okay=False), default=None,
                           help="JSON experiment spec; flags override its entries.")
out_option = click.option("--out", type=click.Path(file_okay=False), default=".",
                          help="Directory for emitted CSV/JSON artifacts.")


@click.group(context_settings=CONTEXT_SETTINGS)
def main() -> None:
    """Numerical laboratory for delayed-feedback oscillator networks."""


@main.command()
@spec_option
@click.option("--alpha", type=float, default=None)
@click.option("--a", type=float, default=None)
@click.option("--b", type=float, default=None)
@out_option
@_guarded
def profile(spec, alpha, a, b, out):
    """Limit-profile constants and a table of the limit multiplier on the
    real axis."""
    cfg = _merge_spec(spec, alpha=alpha, a=a, b=b)
    prof = make_profile(_need(cfg, "alpha"), _need(cfg, "a"), _need(cfg, "b"))
    payload = _profile_payload(prof)
    payload["beta_hopf"] = hopf_beta(prof.alpha, -1.0)
    outdir = _outdir(out)
    _write_json(payload, os.path.join(outdir, "profile.json"))
    grid = np.linspace(-1.0, 1.25, 91)
    with open(os.path.join(outdir, "nu_table.csv"), "w", newline="") as fh:
        fh.write("lambda,nu,abs_nu\n")
        for lam in grid:
            val = complex(nu_star(prof, lam))
            fh.write(f"{lam:.17g},{val.real:.17g},{abs(val):.17g}\n")
    _emit(payload)


@main.command("sops")
@spec_option
@click.option("--alpha", type=float, default=None)
@click.option("--beta", type=float, default=None)
@click.option("--a", type=float, default=None)
@click.option("--b", type=float, default=None)
@click.option("--h", type=float, default=None)
@click.option("--tol", type=float, default=None)
@click.option("--eps", type=float, default=None, help="Half-width of the windows excluded from the derivative residual.")
@out_option
@_guarded
def sops_cmd(spec, alpha, beta, a, b, h, tol, eps, out):
    """Find the periodic orbit and report its distance from the limit
    profile."""
    cfg = _merge_spec(spec, alpha=alpha, beta=beta, a=a, b=b, h=h, tol=tol, eps=eps)
    alpha_v = _need(cfg, "alpha")
    beta_v = _need(cfg, "beta")
    f = tanh_feedback(_need(cfg, "a"), _need(cfg, "b"))
    s = find_sops(
        alpha_v,
        beta_v,
        f,
        h=_get(cfg, "h", None),
        tol=_get(cfg, "tol", 1e-6),
        transient=_get(cfg, "transient", 50.0),
        max_time=_get(cfg, "max_time", 500.0),
    )
    prof = make_profile(alpha_v, f.a, f.b)
    q1_eff = prof.q2 if prof.swapped else prof.q1
    eps_v = _get(cfg, "eps", q1_eff / 4.0)
    report = limit_residuals(s, prof, eps_v)
    outdir = _outdir(out)
    export_sops(s, os.path.join(outdir, "sops.csv"), os.path.join(outdir, "sops.json"))
    _write_json(report.as_dict(), os.path.join(outdir, "residuals.json"))
    _emit(
        {
            "omega": s.omega,
            "z1": s.z1,
            "z2": s.z2,
            "residual": s.residual,
            "eps": eps_v,
            "residuals": report.as_dict(),
        }
    )


def _parse_lambda(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError as exc:
        raise DomainError(f"cannot parse '{text}' as a complex number (use forms like 0.3 or 0.5+0.9j)") from exc


@main.command("floquet")
@spec_option
@click.option("--alpha", type=float, default=None)
@click.option("--beta", type=float, default=None)
@click.option("--a", type=float, default=None)
@click.option("--b", type=float, default=None)
@click.option("--h", type=float, default=None)
@click.option("--tol", type=float, default=None)
@click.option("--m", type=int, default=None)
@click.option("--lam", "lams", multiple=True, help="Mode eigenvalue; repeatable. Defaults to 1.")
@out_option
@_guarded
def floquet_cmd(spec, alpha, beta, a, b, h, tol, m, lams, out):
    """Dominant multipliers of the period map over a list of mode
    eigenvalues."""
    cfg = _merge_spec(spec, alpha=alpha, beta=beta, a=a, b=b, h=h, tol=tol, m=m, lam=list(lams))
    alpha_v = _need(cfg, "alpha")
    beta_v = _need(cfg, "beta")
    f = tanh_feedback(_need(cfg, "a"), _need(cfg, "b"))
    m_v = int(_get(cfg, "m", 64, cast=int))
    lam_list = [_parse_lambda(str(t)) for t in cfg.get("lam", ["1"])] or [1.0 + 0.0j]
    s = find_sops(alpha_v, beta_v, f, h=_get(cfg, "h", None), tol=_get(cfg, "tol", 1e-6))
    rows = []
    for lam in lam_list:
        rep = spectrum(monodromy_matrix(lam, s, m_v))
        dom = rep.dominant
        rows.append(
            {
                "lambda_re": lam.real,
                "lambda_im": lam.imag,
                "dominant_re": None if dom is None else dom.real,
                "dominant_im": None if dom is None else dom.imag,
                "spectral_radius": rep.spectral_radius,
            }
        )
    outdir = _outdir(out)
    with open(os.path.join(outdir, "multipliers.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lambda_re", "lambda_im", "dominant_re", "dominant_im", "spectral_radius"])
        for row in rows:
            writer.writerow(
                [
                    f"{row['lambda_re']:.17g}",
                    f"{row['lambda_im']:.17g}",
                    "" if row["dominant_re"] is None else f"{row['dominant_re']:.17g}",
                    "" if row["dominant_im"] is None else f"{row['dominant_im']:.17g}",
                    f"{row['spectral_radius']:.17g}",
                ]
            )
    _emit({"omega": s.omega, "modes": rows})


def _load_square(path: str) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = [[float(c) for c in row] for row in csv.reader(fh) if row]
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DomainError(f"matrix CSV {path} must be square")
    return arr


def _coupling_from_cfg(cfg: dict):
    if cfg.get("matrix"):
        return load_coupling_csv(str(cfg["matrix"]))
    n = int(_need(cfg, "n", cast=int))
    if cfg.get("kappa1") is not None or cfg.get("kappa2") is not None:
        return ring(n, _need(cfg, "kappa1"), _need(cfg, "kappa2"))
    return mean_field(n, _need(cfg, "kappa"))


@main.command("classify")
@spec_option
@click.option("--rule", type=click.Choice(
    ["general", "weak", "near-uniform", "doubly-nonneg", "mean-field", "ring", "empirical"]),
    required=True)
@click.option("--alpha", type=float, default=None)
@click.option("--a", type=float, default=None)
@click.option("--b", type=float, default=None)
@click.option("--beta", type=float, default=None)
@click.option("--n", type=int, default=None)
@click.option("--kappa", type=float, default=None)
@click.option("--kappa1", type=float, default=None)
@click.option("--kappa2", type=float, default=None)
@click.option("--delta", type=float, default=None, help="Margin for the general spectral criterion.")
@click.option("--eps", type=float, default=None, help="Collar width for the band rules.")
@click.option("--sign", type=click.Choice(["1", "-1"]), default="1", help="Perturbation direction for the weak rule.")
@click.option("--matrix", type=click.Path(exists=True, dir_okay=False), default=None,
              help="CSV coupling (or perturbation) matrix.")
@click.option("--m", type=int, default=None)
@click.option("--margin", type=float, default=None, help="Collar for the empirical rule.")
@click.option("--h", type=float, default=None)
@click.option("--tol", type=float, default=None)
@out_option
@_guarded
def classify_cmd(spec, rule, alpha, a, b, beta, n, kappa, kappa1, kappa2, delta, eps,
                 sign, matrix, m, margin, h, tol, out):
    """Stability verdict for the synchronous periodic state under the
    chosen rule."""
    cfg = _merge_spec(spec, rule=rule, alpha=alpha, a=a, b=b, beta=beta, n=n, kappa=kappa,
                      kappa1=kappa1, kappa2=kappa2, delta=delta, eps=eps, sign=sign,
                      matrix=matrix, m=m, margin=margin, h=h, tol=tol)
    rule = str(cfg["rule"])
    if rule == "weak":
        H = _load_square(str(_need(cfg, "matrix", cast=str)))
        verdict = classify_mod.classify_weak(H, int(_get(cfg, "sign", 1, cast=int)))
    elif rule == "near-uniform":
        prof = make_profile(_need(cfg, "alpha"), _need(cfg, "a"), _need(cfg, "b"))
        H = _load_square(str(_need(cfg, "matrix", cast=str)))
        verdict = classify_mod.classify_near_uniform(prof, H)
    elif rule == "empirical":
        f = tanh_feedback(_need(cfg, "a"), _need(cfg, "b"))
        s = find_sops(
            _need(cfg, "alpha"),
            _need(cfg, "beta"),
            f,
            h=_get(cfg, "h", None),
            tol=_get(cfg, "tol", 1e-6),
        )
        G = _coupling_from_cfg(cfg)
        verdict = classify_mod.classify_empirical(
            s, G, m=int(_get(cfg, "m", 64, cast=int)), margin=_get(cfg, "margin", 0.1)
        )
    else:
        prof = make_profile(_need(cfg, "alpha"), _need(cfg, "a"), _need(cfg, "b"))
        if rule == "general":
            G = _coupling_from_cfg(cfg)
            verdict = classify_mod.classify_general(prof, G, _get(cfg, "delta", 0.1))
        elif rule == "doubly-nonneg":
            G = _coupling_from_cfg(cfg)
            verdict = classify_mod.classify_doubly_nonneg(prof, G, _get(cfg, "eps", None))
        elif rule == "mean-field":
            # The verdict does not depend on the population size, so n may
            # be omitted; 2 is the smallest legal network.
            verdict = classify_mod.classify_mean_field(
                prof, int(_get(cfg, "n", 2, cast=int)), _need(cfg, "kappa"), _get(cfg, "eps", None)
            )
        else:
            verdict = classify_mod.classify_ring_symmetric(
                prof, int(_need(cfg, "n", cast=int)), _need(cfg, "kappa"), _get(cfg, "eps", None)
            )
    payload = classify_mod.verdict_to_json(verdict, os.path.join(_outdir(out), "verdict.json"))
    _emit(payload)


@main.command("region")
@spec_option
@click.option("--alpha", type=float, default=None)
@click.option("--a", type=float, default=None)
@click.option("--b", type=float, default=None)
@click.option("--delta", type=float, default=None, help="Offset of the sampled modulus level from 1.")
@click.option("--samples", type=int, default=None)
@out_option
@_guarded
def region_cmd(spec, alpha, a, b, delta, samples, out):
    """Sample the level set where the limit multiplier modulus equals
    1 + delta."""
    cfg = _merge_spec(spec, alpha=alpha, a=a, b=b, delta=delta, samples=samples)
    prof = make_profile(_need(cfg, "alpha"), _need(cfg, "a"), _need(cfg, "b"))
    delta_v = _get(cfg, "delta", 0.0)
    nsamples = int(_get(cfg, "samples", 64, cast=int))
    points = cassini_boundary(prof, delta=delta_v, nsamples=nsamples)
    outdir = _outdir(out)
    with open(os.path.join(outdir, "boundary.csv"), "w", newline="") as fh:
        fh.write("re,im\n")
        for z in points:
            fh.write(f"{z.real:.17g},{z.imag:.17g}\n")
    _emit({"delta": delta_v, "count": int(len(points))})


@main.command("simulate")
@spec_option
@click.option("--alpha", type=float, default=None)
@click.option("--beta", type=float, default=None)
@click.option("--a", type=float, default=None)
@click.option("--b", type=float, default=None)
@click.option("--n", type=int, default=None)
@click.option("--kappa", type=float, default=None)
@click.option("--kappa1", type=float, default=None)
@click.option("--kappa2", type=float, default=None)
@click.option("--matrix", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--horizon", type=float, default=None)
@click.option("--h", type=float, default=None)
@click.option("--history", "history_kind", type=click.Choice(["constant", "ramp"]), default="constant")
@click.option("--x0", type=float, default=None, help="Constant history value.")
@click.option("--perturb", type=float, default=None, help="Zero-sum offset magnitude between units.")
@out_option
@_guarded
def simulate_cmd(spec, alpha, beta, a, b, n, kappa, kappa1, kappa2, matrix, horizon, h,
                 history_kind, x0, perturb, out):
    """Integrate the coupled system and report the synchrony gap."""
    cfg = _merge_spec(spec, alpha=alpha, beta=beta, a=a, b=b, n=n, kappa=kappa, kappa1=kappa1,
                      kappa2=kappa2, matrix=matrix, horizon=horizon, h=h,
                      history=history_kind, x0=x0, perturb=perturb)
    alpha_v = _need(cfg, "alpha")
    beta_v = _need(cfg, "beta")
    f = tanh_feedback(_need(cfg, "a"), _need(cfg, "b"))
    G = _coupling_from_cfg(cfg)
    n_units = G.n
    pert_mag = _get(cfg, "perturb", 0.0)
    pert = np.zeros(n_units)
    if pert_mag:
        if n_units >= 3:
            pert[1], pert[2] = pert_mag, -pert_mag
        else:
            pert[0], pert[1] = pert_mag, -pert_mag
    kind = str(_get(cfg, "history", "constant", cast=str))
    if kind == "ramp":
        history = ramp_history(beta_v, pert)
    elif kind == "constant":
        base = _get(cfg, "x0", 1.0)
        const = base + pert
        history = lambda t: const
    else:
        raise DomainError(f"unknown history kind '{kind}'")
    T = _get(cfg, "horizon", 50.0)
    h_v = _get(cfg, "h", 1e-3)
    traj = integrate_coupled(alpha_v, beta_v, f, G.entries, history, T, h_v)
    prof = make_profile(alpha_v, f.a, f.b)
    sample_times = np.arange(0.0, T + 1e-9, max(10 * h_v, 0.05))
    sync = sync_measure(traj, prof.omega_star, sample_times)
    outdir = _outdir(out)
    trajectory_to_csv(traj, os.path.join(outdir, "trajectory.csv"))
    write_sync_csv(sync, os.path.join(outdir, "sync.csv"))
    _emit(
        {
            "t_end": traj.t_end,
            "g_final": float(sync.g[-1]),
            "g_max": float(sync.g.max()),
            "n": n_units,
        }
    )


@main.command("figure")
@spec_option
@click.option("--alpha", type=float, default=None)
@click.option("--a", type=float, default=None)
@click.option("--b", type=float, default=None)
@click.option("--beta", type=float, default=None)
@click.option("--n", type=int, default=None)
@click.option("--level", "levels", multiple=True, type=float,
              help="Limit-multiplier level to target; repeatable. Defaults to 0.9 and 1.1.")
@click.option("--horizon", type=float, default=None)
@click.option("--h", type=float, default=None)
@out_option
@_guarded
def figure_cmd(spec, alpha, a, b, beta, n, levels, horizon, h, out):
    """Ring destabilization bundle: one run per multiplier level, with
    trajectory and synchrony series emitted per run."""
    cfg = _merge_spec(spec, alpha=alpha, a=a, b=b, beta=beta, n=n, horizon=horizon, h=h,
                      level=list(levels))
    level_list = [float(v) for v in cfg.get("level", [0.9, 1.1])]
    outdir = _outdir(out)
    summary = []
    for level in level_list:
        result = figure_experiment(
            level,
            alpha=_get(cfg, "alpha", 0.125),
            a=_get(cfg, "a", 24.0),
            b=_get(cfg, "b", 1.0),
            n=int(_get(cfg, "n", 3, cast=int)),
            beta=_get(cfg, "beta", None),
            T=_get(cfg, "horizon", 100.0),
            h=_get(cfg, "h", 1e-3),
        )
        stem = f"figure_{level:g}".replace(".", "p").replace("-", "m")
        trajectory_to_csv(result.trajectory, os.path.join(outdir, f"{stem}_trajectory.csv"))
        write_sync_csv(result.sync, os.path.join(outdir, f"{stem}_sync.csv"))
        summary.append(
            {
                "level": result.level,
                "lambda": result.lam,
                "kappa": result.kappa,
                "beta": result.beta,
                "slope": result.slope,
            }
        )
    _emit({"runs": summary})


if __name__ == "__main__":
    main()
