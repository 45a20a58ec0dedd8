"""Command-line front end: integrate, verify, series, schlesinger.

Configuration is one JSON document.  Complex scalars are plain numbers or
``[re, im]`` pairs; complex arrays are real nested lists or
``{"re": ..., "im": ...}``.  Missing initial data is drawn from
the seeded sampler so that ``{"system": "P2"}`` is a complete config.

Exit codes: 0 success, 1 a verification failed, 2 bad configuration,
3 integration aborted.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import verify as V
from .algebra import INFINITY
from .errors import ConfigError, GuardError, IntegrationAbort, IsotauError
from .integrate import PathSpec, Tolerances, dense_samples, integrate_path
from .sampling import draw_trajectory
from .schlesinger import MultiTimePath, SchlesingerModel, SchlesingerState, random_model_and_state
from .systems import STATE_SLOTS, THETA_SLOTS, ExtendedState, PainleveKind, ThetaParams, get_system

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_ABORT = 0, 1, 2, 3

PAINLEVE_CHECKS = (
    "lax_compatibility",
    "hamilton_equations",
    "series_recursion",
    "action_identity",
    "variational_identity",
    "tau_log_derivative",
    "scalar_equation",
    "integrator_consistency",
)
SCHLESINGER_CHECKS = ("schlesinger_suite", "mixed_partials")
VARIATIONAL_KINDS = (PainleveKind.P2, PainleveKind.P6)


# --- serialization ----------------------------------------------------------

def _num(x) -> str:
    return repr(float(x))


def _cplx_json(z):
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _parse_complex(v, what: str) -> complex:
    if isinstance(v, bool):
        raise ConfigError(f"{what}: expected a number, got a boolean")
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
        return complex(v[0], v[1])
    raise ConfigError(f"{what}: expected a number or [re, im], got {v!r}")


def _parse_array(v, what: str) -> np.ndarray:
    """A real nested list, or ``{"re": nested, "im": nested}``."""
    try:
        if isinstance(v, dict):
            if set(v) != {"re", "im"}:
                raise ConfigError(f"{what}: complex arrays need exactly 're' and 'im'")
            re, im = np.array(v["re"], dtype=float), np.array(v["im"], dtype=float)
            if re.shape != im.shape:
                raise ConfigError(f"{what}: 're' and 'im' shapes differ")
            return re + 1j * im
        return np.array(v, dtype=float).astype(complex)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{what}: {exc}") from None


# --- config -----------------------------------------------------------------

class RunConfig:
    """Validated view of the JSON configuration."""

    def __init__(self, raw: dict, seed: int | None = None):
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        self.raw = raw
        self.seed = int(seed if seed is not None else raw.get("seed", 0))
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        self.rng = np.random.default_rng(self.seed)
        tag = raw.get("system")
        if not isinstance(tag, str):
            raise ConfigError("'system' must be a kind tag (P1..P6) or 'schlesinger'")
        self.is_schlesinger = tag.lower() == "schlesinger"
        if not self.is_schlesinger:
            try:
                self.kind = PainleveKind(tag.upper())
            except ValueError:
                raise ConfigError(f"unknown system {tag!r}") from None
        self.tol = self._tolerances(raw.get("tolerances", {}))
        self.samples = raw.get("samples")
        if self.samples is not None and (not isinstance(self.samples, int) or self.samples < 2):
            raise ConfigError("'samples' must be an integer >= 2")
        self.checks = self._checks(raw.get("checks", "all"))
        self.corruption = self._corruption(raw.get("corruption"))
        if self.is_schlesinger:
            self._init_schlesinger(raw)
        else:
            self._init_painleve(raw)

    @staticmethod
    def _tolerances(d) -> Tolerances:
        if not isinstance(d, dict):
            raise ConfigError("'tolerances' must be an object")
        allowed = {"rel_tol", "abs_tol", "max_step", "min_step", "method"}
        extra = set(d) - allowed
        if extra:
            raise ConfigError(f"unknown tolerance fields {sorted(extra)}")
        try:
            return Tolerances(**d)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"tolerances: {exc}") from None

    def _checks(self, v) -> list:
        known = SCHLESINGER_CHECKS if self.is_schlesinger else PAINLEVE_CHECKS
        if v == "all":
            if self.is_schlesinger:
                return ["schlesinger_suite"]
            return [c for c in known if c != "variational_identity" or self.kind in VARIATIONAL_KINDS]
        if not isinstance(v, list) or not all(isinstance(c, str) for c in v):
            raise ConfigError("'checks' must be 'all' or a list of names")
        bad = [c for c in v if c not in known]
        if bad:
            raise ConfigError(f"unknown checks {bad}; known: {list(known)}")
        return list(v)

    def _corruption(self, v):
        if v is None:
            return None
        if not isinstance(v, dict) or "name" not in v:
            raise ConfigError("'corruption' must be an object with a 'name'")
        if v["name"] not in V.CORRUPTIONS:
            raise ConfigError(f"unknown corruption {v['name']!r}")
        amount = v.get("amount", 1.0)
        if not isinstance(amount, (int, float)):
            raise ConfigError("corruption amount must be real")
        return v["name"], float(amount)

    def _init_painleve(self, raw):
        sysm = get_system(self.kind)
        self.system = sysm
        have = [k in raw for k in ("theta", "state", "path")]
        if any(have) and not all(have):
            raise ConfigError("give all of 'theta', 'state', 'path' or none of them")
        self.path_given = all(have)
        if self.path_given:
            th = raw["theta"]
            if not isinstance(th, dict) or set(th) - set(THETA_SLOTS):
                raise ConfigError(f"'theta' must map names from {THETA_SLOTS} to numbers")
            self.theta = ThetaParams(**{k: _parse_complex(v, f"theta.{k}") for k, v in th.items()})
            st = raw["state"]
            if not isinstance(st, dict) or set(st) - set(STATE_SLOTS) or not {"q", "p"} <= set(st):
                raise ConfigError(f"'state' needs q and p, optional slots from {STATE_SLOTS}")
            self.state = ExtendedState(**{k: _parse_complex(v, f"state.{k}") for k, v in st.items()})
            self.path = self._path(raw["path"], scalar=True)
            try:
                sysm.check(self.theta, self.state, self.path.waypoints[0])
            except GuardError as exc:
                raise ConfigError(f"initial data not admissible: {exc}") from None
        else:
            try:
                self.theta, self.state, self.path, _, _ = draw_trajectory(self.kind, self.rng, tol=self.tol)
            except RuntimeError as exc:
                raise ConfigError(str(exc)) from None
        t = raw.get("t")
        self.t = _parse_complex(t, "t") if t is not None else self.path.waypoints[0]
        z = raw.get("z_samples")
        if z is None:
            self.z_samples = [self.t + 1.5 * np.exp(2j * np.pi * (k + 0.3) / 8) for k in range(8)]
        else:
            if not isinstance(z, list) or not z:
                raise ConfigError("'z_samples' must be a non-empty list")
            self.z_samples = [_parse_complex(x, "z_samples") for x in z]
        d = raw.get("direction", {"q": 1, "p": 1})
        if not isinstance(d, dict) or set(d) - set(STATE_SLOTS):
            raise ConfigError("'direction' must map state slots to numbers")
        self.direction = {k: _parse_complex(v, f"direction.{k}") for k, v in d.items()}

    def _init_schlesinger(self, raw):
        m = raw.get("model", {})
        if not isinstance(m, dict):
            raise ConfigError("'model' must be an object")
        N = m.get("mat_dim", 2)
        n = m.get("pole_count", 3)
        if not all(isinstance(x, int) and x >= 2 for x in (N, n)):
            raise ConfigError("mat_dim and pole_count must be integers >= 2")
        try:
            if "state" in raw:
                st = raw["state"]
                thetas = _parse_array(m["thetas"], "model.thetas")
                theta_inf = _parse_array(m["theta_inf"], "model.theta_inf")
                self.model = SchlesingerModel(N, n, thetas, theta_inf)
                self.state = SchlesingerState(_parse_array(st["poles"], "state.poles"),
                                              _parse_array(st["q_mats"], "state.q_mats"),
                                              _parse_array(st["p_mats"], "state.p_mats"))
                self.state.validate(self.model)
            else:
                poles = _parse_array(raw["poles"], "poles") if "poles" in raw else None
                self.model, self.state = random_model_and_state(self.rng, N, n, poles)
        except KeyError as exc:
            raise ConfigError(f"missing field {exc}") from None
        except (ValueError, IsotauError) as exc:
            raise ConfigError(f"schlesinger data: {exc}") from None
        if "path" in raw:
            self.path = self._path(raw["path"], scalar=False)
        else:
            side = raw.get("loop_side", 0.1)
            i, j = raw.get("loop_poles", [0, 1])
            loop = MultiTimePath.rectangle(self.state.poles, i, j, side)
            self.path = PathSpec(tuple(loop.waypoints))
        if not np.allclose(self.path.waypoints[0], self.state.poles):
            raise ConfigError("path must start at the pole positions of the state")
        try:
            MultiTimePath(np.array(self.path.waypoints)).check(self.path.guard_radius)
        except (GuardError, ValueError) as exc:
            raise ConfigError(f"path not admissible: {exc}") from None

    @staticmethod
    def _path(v, scalar: bool) -> PathSpec:
        if isinstance(v, list):
            v = {"waypoints": v}
        if not isinstance(v, dict) or "waypoints" not in v:
            raise ConfigError("'path' must be a list of waypoints or an object with 'waypoints'")
        wps = v["waypoints"]
        if not isinstance(wps, list):
            raise ConfigError("waypoints must be a list")
        if scalar:
            pts = tuple(_parse_complex(w, "path.waypoints") for w in wps)
        else:
            pts = tuple(_parse_array(w, "path.waypoints") for w in wps)
        try:
            return PathSpec(pts, float(v.get("guard_radius", 1e-3)))
        except ValueError as exc:
            raise ConfigError(f"path: {exc}") from None

    def system_arg(self):
        return "schlesinger" if self.is_schlesinger else self.kind

    def params(self):
        return self.model if self.is_schlesinger else self.theta


# --- commands -----------------------------------------------------------------

def _trajectory_rows(cfg: RunConfig, res):
    count = cfg.samples or len(res.sigmas)
    rows = dense_samples(res, count)
    dim = res.state_dim
    names = res.column_names
    tdim = 1 if np.ndim(rows[0][1]) == 0 else len(rows[0][1])
    header = ["s"]
    if tdim == 1:
        header += ["re_t", "im_t"]
    else:
        for i in range(tdim):
            header += [f"re_t{i + 1}", f"im_t{i + 1}"]
    for nme in names + ["ln_tau", "S"]:
        header += [f"re_{nme}", f"im_{nme}"]
    body = []
    for sig, t, _, y in rows:
        ts = np.atleast_1d(np.asarray(t, dtype=complex))
        vals = [sig]
        for z in ts:
            vals += [z.real, z.imag]
        for z in y[: dim + 2]:
            vals += [z.real, z.imag]
        body.append([_num(x) for x in vals])
    return header, body


def _summary(cfg: RunConfig, res) -> dict:
    return {
        "system": "schlesinger" if cfg.is_schlesinger else cfg.kind.value,
        "seed": cfg.seed,
        "delta_ln_tau": _cplx_json(res.delta_ln_tau),
        "delta_action": _cplx_json(res.delta_action),
        "g_start": _cplx_json(res.g_start),
        "g_end": _cplx_json(res.g_end),
        "step_stats": {"accepted": res.step_stats.accepted, "rejected": res.step_stats.rejected,
                       "nfev": res.step_stats.nfev},
    }


def _integrate_outputs(cfg: RunConfig, fmt: str) -> dict:
    """Run the integration and return {filename: text}; nothing is written here."""
    res = integrate_path(cfg.system_arg(), cfg.params(), cfg.state, cfg.path, cfg.tol)
    header, body = _trajectory_rows(cfg, res)
    files = {}
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(body)
        files["trajectory.csv"] = buf.getvalue()
    else:
        recs = [dict(zip(header, (float(x) for x in row))) for row in body]
        files["trajectory.json"] = json.dumps(recs, indent=2, sort_keys=True) + "\n"
    files["summary.json"] = json.dumps(_summary(cfg, res), indent=2, sort_keys=True) + "\n"
    return files


def _run_painleve_checks(cfg: RunConfig) -> list:
    k, th, st, t, path = cfg.kind, cfg.theta, cfg.state, cfg.t, cfg.path
    hook_check, hooks = None, {}
    if cfg.corruption:
        hook_check, hooks = V.corruption_hooks(cfg.corruption[0], k, th, cfg.corruption[1])
    kw = lambda name: dict(hooks) if name == hook_check else {}
    reports = []
    shared = None
    for name in cfg.checks:
        if name == "lax_compatibility":
            reports.append(V.check_lax_compatibility(k, th, st, t, cfg.z_samples, seed=cfg.seed, **kw(name)))
        elif name == "hamilton_equations":
            reports.append(V.check_hamilton_equations(k, th, st, t, seed=cfg.seed, **kw(name)))
        elif name == "series_recursion":
            reports.append(V.check_series_recursion(k, th, st, t, seed=cfg.seed, **kw(name)))
        elif name == "action_identity":
            reports.append(V.check_action_identity(k, th, st, path, cfg.tol, seed=cfg.seed, **kw(name)))
        elif name == "variational_identity":
            reports.append(V.check_variational_identity(k, th, st, path, cfg.direction, seed=cfg.seed, **kw(name)))
        elif name in ("tau_log_derivative", "scalar_equation"):
            if shared is None:
                shared = integrate_path(k, th, st, path, V.DENSE_TOL)
            fn = V.check_tau_log_derivative if name == "tau_log_derivative" else V.check_scalar_equation
            reports.append(fn(k, th, st, path, result=shared, seed=cfg.seed, **kw(name)))
        elif name == "integrator_consistency":
            reports.extend(V.check_integrator_consistency(k, th, st, path, cfg.tol, seed=cfg.seed))
    return reports


def _run_schlesinger_checks(cfg: RunConfig) -> list:
    reports = []
    hooks = {}
    if cfg.corruption:
        target, hooks = V.corruption_hooks(cfg.corruption[0], cfg.model, None, cfg.corruption[1])
        if target != "schlesinger_suite":
            hooks = {}
    for name in cfg.checks:
        if name == "schlesinger_suite":
            loop = MultiTimePath(np.array(cfg.path.waypoints))
            reports.extend(V.check_schlesinger_suite(cfg.model, cfg.state, loop, cfg.tol, seed=cfg.seed, **hooks))
        elif name == "mixed_partials":
            r = V.schlesinger_mixed_partials(cfg.model, cfg.state)
            reports.append(V.ResidualReport.make("mixed_partials", r, 1e-6, seed=cfg.seed))
    return reports


def _reports_text(reports) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True) + "\n"


def _series_text(cfg: RunConfig) -> str:
    k, th, st, t = cfg.kind, cfg.theta, cfg.state, cfg.t
    frames = get_system(k).local_frames(th, st, t)
    resid = V.series_recursion_residuals(k, th, st, t, frames)
    out = []
    for fr, r in zip(frames, resid):
        loc = "inf" if fr.location is INFINITY else _cplx_json(fr.location)
        out.append({
            "location": loc,
            "gauge": [[_cplx_json(x) for x in row] for row in fr.gauge],
            "g": [[[_cplx_json(x) for x in row] for row in m] for m in fr.series_coeffs],
            "exponent_polar": [[_cplx_json(x) for x in np.diag(m)] for m in fr.exponent.polar_coeffs],
            "exponent_log": [_cplx_json(x) for x in np.diag(fr.exponent.log_coeff)],
            "order": fr.order,
            "rank": r["rank"],
            "residual": r["residual"],
        })
    doc = {"system": k.value, "seed": cfg.seed, "t": _cplx_json(t), "frames": out,
           "theta": {n: _cplx_json(th.get(n)) for n in THETA_SLOTS},
           "state": {n: _cplx_json(st.get(n)) for n in STATE_SLOTS}}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _write(out: Path, files: dict):
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out / name).write_text(text)


def _execute(args) -> int:
    try:
        raw = json.loads(Path(args.config).read_text()) if args.config else {}
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    if args.command == "schlesinger":
        raw = dict(raw)
        raw.setdefault("system", "schlesinger")
        if str(raw["system"]).lower() != "schlesinger":
            raise ConfigError("the schlesinger command needs system 'schlesinger'")
    cfg = RunConfig(raw, args.seed)
    out = Path(args.out)
    if args.command == "series" and cfg.is_schlesinger:
        raise ConfigError("series output exists only for Painleve kinds")
    files = {}
    status = EXIT_OK
    if args.command == "integrate" or (args.command == "schlesinger" and not raw.get("checks")):
        files.update(_integrate_outputs(cfg, args.format))
    if args.command == "verify" or (args.command == "schlesinger" and raw.get("checks")):
        reports = _run_schlesinger_checks(cfg) if cfg.is_schlesinger else _run_painleve_checks(cfg)
        files["reports.json"] = _reports_text(reports)
        if not all(r.passed for r in reports):
            status = EXIT_FAILED
            for r in reports:
                if not r.passed:
                    print(f"FAILED {r.name}: residual {r.residual:.3e} > {r.threshold:.1e}", file=sys.stderr)
    if args.command == "series":
        files["series.json"] = _series_text(cfg)
    _write(out, files)
    return status


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="isotau", description="Isomonodromic tau functions: integration and checks.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, hlp in (("integrate", "integrate a path, write trajectory and summary"),
                      ("verify", "run residual checks, write reports.json"),
                      ("series", "dump local frames and series-recursion residuals"),
                      ("schlesinger", "Schlesinger model: integrate, or verify when 'checks' is given")):
        p = sub.add_parser(name, help=hlp)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="seed for sampled inputs (overrides config)")
        p.add_argument("--format", choices=("csv", "json"), default="csv", help="trajectory format")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _execute(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegrationAbort as exc:
        where = "" if exc.last_t is None else f" (last good t = {exc.last_t})"
        print(f"integration aborted: {exc}{where}", file=sys.stderr)
        return EXIT_ABORT
    except GuardError as exc:
        print(f"integration aborted: {exc}", file=sys.stderr)
        return EXIT_ABORT


if __name__ == "__main__":
    sys.exit(main())
