"""Command-line driver: build, quotient, harmonic, cusps, euler, verify, all."""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import random
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path

from .building import ball, base_vertex
from .cochain import (d, delta, laplacian, pairing, random_cochain)
from .cusps import enumerate_cusps, support_locus, truncation_complex
from .errors import (BuildingError, CertificationFailure, ConfigError, InstabilityError,
                     InsufficientPrecision)
from .euler import (alternating_count, choose_patch, euler_characteristic, euler_from_cohomology,
                    identified_counts, replay_collapses)
from .gamma_action import GroupSpec, QuotientComplex, orbit_quotient, parse_poly, replay_certificate
from .harmonic import cohomology_report, harmonic_space, verify_decomposition
from .matrices import mat_str

EXIT_OK, EXIT_CONFIG, EXIT_PRECISION, EXIT_UNSTABLE, EXIT_CERT = 0, 2, 3, 4, 5
STAGES = ("build", "quotient", "harmonic", "cusps", "euler", "verify")


@dataclass
class RunConfig:
    n: int = 1
    q: int = 2
    level: str = "full"
    radius: int = 8
    support_radius: int | None = None
    l: int = 1
    precision: int | None = None
    out: str | None = None
    workers: int | None = None
    seed: int = 0
    verify_samples: int = 100
    quotient_file: str | None = None

    def resolved(self):
        c = RunConfig(**asdict(self))
        if c.support_radius is None:
            c.support_radius = max(0, c.radius - 4)
        return c

    def validate(self):
        if self.n < 1:
            raise ConfigError("n must be >= 1")
        if self.q < 2 or not _is_prime_power(self.q):
            raise ConfigError(f"q = {self.q} is not a prime power")
        if self.radius < 1:
            raise ConfigError("window radius must be >= 1")
        if self.support_radius < 0 or self.radius < self.support_radius + 2:
            raise ConfigError("window radius must be at least support radius + 2")
        if self.precision is not None and self.precision < self.radius + self.n + 5:
            raise ConfigError("precision must be at least window radius + n + 5")
        if self.l < 0:
            raise ConfigError("truncation level must be >= 0")
        try:
            self.spec()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def spec(self):
        return GroupSpec(self.n, self.q, parse_poly(self.level, self.q))

    def digest(self):
        keys = ("n", "q", "level", "radius", "support_radius", "l", "precision", "seed", "verify_samples")
        blob = json.dumps({k: getattr(self, k) for k in keys}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _is_prime_power(x):
    p = next(k for k in range(2, x + 1) if x % k == 0)
    while x % p == 0:
        x //= p
    return x == 1


class Pipeline:
    """Lazily computed stages sharing one window and quotient."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.spec = cfg.spec()
        self._ball = self._quotient = self._report = self._cusps = None
        self._truncations = {}

    @property
    def ball(self):
        if self._ball is None:
            self._ball = ball(base_vertex(self.cfg.n), self.cfg.radius, self.cfg.q)
        return self._ball

    @property
    def quotient(self):
        if self._quotient is None:
            if self.cfg.quotient_file:
                self._quotient = QuotientComplex.parse(Path(self.cfg.quotient_file).read_text())
            else:
                self._quotient = orbit_quotient(self.ball, self.spec)
        return self._quotient

    @property
    def report(self):
        if self._report is None:
            self._report = cohomology_report(self.quotient, self.cfg.support_radius)
        return self._report

    @property
    def cusps(self):
        if self._cusps is None:
            self._cusps = enumerate_cusps(self.spec)
        return self._cusps

    def truncation(self, l):
        if l not in self._truncations:
            self._truncations[l] = truncation_complex(self.spec, self.cusps, l, self.ball, self.quotient)
        return self._truncations[l]

    # stages ----------------------------------------------------------------

    def build(self):
        B = self.ball
        return {"vertices": len(B.dist), "counts": B.counts(), "alternating_sum": B.euler_sum()}

    def quotient_stage(self):
        Q = self.quotient
        return {"counts": Q.counts(),
                "interior_counts": [sum(Q.interior(d_, k) for k in range(len(o)))
                                    for d_, o in enumerate(Q.orbits)],
                "stabilizers": [[r.stab for r in o] for o in Q.orbits],
                "depths": [[r.depth for r in o] for o in Q.orbits]}

    def harmonic(self):
        return self.report.to_json()

    def cusps_stage(self):
        cusps = self.cusps
        out = {"count": len(cusps),
               "representatives": [{"index": c.index, "flag": mat_str(c.flag)} for c in cusps],
               "truncations": []}
        truncs = []
        for l in range(self.cfg.l + 1):
            T = self.truncation(l)
            truncs.append(T)
            out["truncations"].append({"l": l, "quotient_counts": T.quotient_counts(self.quotient)})
        # stabilization against the next smaller window
        if self.cfg.radius - 1 > self.cfg.l + 2:
            B2 = ball(base_vertex(self.cfg.n), self.cfg.radius - 1, self.cfg.q)
            Q2 = orbit_quotient(B2, self.spec, with_certificates=False)
            rows = []
            for l in range(self.cfg.l + 1):
                T2 = truncation_complex(self.spec, cusps, l, B2, Q2)
                rows.append({"l": l, "counts": [T2.quotient_counts(Q2),
                                                 truncs[l].quotient_counts(self.quotient)]})
            out["stabilization"] = {"radii": [self.cfg.radius - 1, self.cfg.radius], "rows": rows,
                                    "stabilized": all(r["counts"][0] == r["counts"][1] for r in rows)}
        basis = [f for fs in self.report.harmonic_basis.values() for f in fs]
        out["support_locus"] = {str(k): v for k, v in sorted(support_locus(basis, truncs).items())}
        return out

    def euler(self):
        Q = self.quotient
        T = self.truncation(self.cfg.l)
        supports = {(f.degree, k) for fs in self.report.harmonic_basis.values() for f in fs for k in f.values}
        patch = choose_patch(Q, T, self.ball, supports=supports, seed=self.cfg.seed)
        g = identified_counts(patch, Q)
        chi = euler_characteristic(g)
        out = {"l": self.cfg.l, "patch_counts": patch.counts(self.cfg.n),
               "patch_alternating_sum": alternating_count(patch.simplices),
               "collapse_certified": replay_collapses(patch.simplices, patch.collapses),
               "identified": g, "euler_identified": chi}
        if self.report.stable:
            chi_coh = euler_from_cohomology(self.report)
            out["euler_cohomology"] = chi_coh
            out["agree"] = chi == chi_coh
        else:
            out["euler_cohomology"] = None
            out["agree"] = None
        return out

    def verify(self):
        return run_verification(self.quotient, self.cfg, ball_complex=None if self.cfg.quotient_file else self.ball)


def check_dd(Q):
    """Return None if d o d = 0 on the incidence data, else a description naming an orbit."""
    for dim in range(2, len(Q.faces)):
        for big, fl in enumerate(Q.faces[dim]):
            acc = {}
            for mid, s1 in fl:
                for small, s2 in Q.faces[dim - 1][mid]:
                    acc[small] = acc.get(small, 0) + s1 * s2
            bad = {k: v for k, v in acc.items() if v}
            if bad:
                return f"d o d != 0 at orbit {dim}:{big} (faces {dim - 2}:{sorted(bad)})"
    return None


def run_verification(Q, cfg, ball_complex=None):
    rng = random.Random(cfg.seed)
    results = {}

    def record(name, ok, detail=None):
        results[name] = {"pass": bool(ok)}
        if detail:
            results[name]["counterexample"] = detail

    top = len(Q.orbits) - 1
    bad = check_dd(Q)
    record("incidence_dd_zero", bad is None, bad)
    fails = {"d_d": None, "delta_delta": None, "adjoint": None, "energy": None}
    for _ in range(cfg.verify_samples):
        for deg in range(top + 1):
            f = random_cochain(Q, deg, rng)
            if deg + 2 <= top and fails["d_d"] is None and not d(d(f)).is_zero():
                fails["d_d"] = f.serialize()
            if deg >= 2 and fails["delta_delta"] is None and not delta(delta(f)).is_zero():
                fails["delta_delta"] = f.serialize()
            if deg < top and fails["adjoint"] is None:
                g = random_cochain(Q, deg + 1, rng)
                if pairing(d(f), g) != pairing(f, delta(g)):
                    fails["adjoint"] = f.serialize() + "--\n" + g.serialize()
            if fails["energy"] is None:
                lhs = pairing(laplacian(f), f)
                rhs = Fraction(0)
                if deg < top:
                    df = d(f)
                    rhs += pairing(df, df)
                if deg > 0:
                    de = delta(f)
                    rhs += pairing(de, de)
                if lhs != rhs:
                    fails["energy"] = f.serialize()
    for k, v in fails.items():
        record(k, v is None, v)
    r = cfg.support_radius
    kernel_ok, decomp_ok = True, True
    for deg in range(top + 1):
        H = harmonic_space(deg, Q, r)
        if not all(laplacian(h).is_zero() for h in H if h.support_depth() <= Q.radius - 2):
            kernel_ok = False
        ok, _ = verify_decomposition(deg, Q, r, seed=cfg.seed)
        decomp_ok = decomp_ok and ok
    record("harmonic_in_laplacian_kernel", kernel_ok)
    record("decomposition_orthogonal", decomp_ok)
    if ball_complex is not None:
        record("ball_alternating_sum", ball_complex.euler_sum() == 1)
        bad_cert = next((s for s in sorted(Q.certificates) if not replay_certificate(Q, s)), None)
        record("certificates_replay", bad_cert is None, None if bad_cert is None else str(bad_cert))
    return {"all_pass": all(v["pass"] for v in results.values()), "properties": results}


def _parser():
    p = argparse.ArgumentParser(prog="btcohom", description=__doc__)
    p.add_argument("stage", choices=STAGES + ("all",))
    p.add_argument("--config", help="JSON file with RunConfig fields")
    p.add_argument("--n", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--level")
    p.add_argument("--radius", type=int)
    p.add_argument("--support-radius", dest="support_radius", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--precision", type=int)
    p.add_argument("--out")
    p.add_argument("--workers", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", dest="verify_samples", type=int)
    p.add_argument("--quotient-file", dest="quotient_file")
    return p


def load_config(args):
    base = {}
    if args.config:
        base = json.loads(Path(args.config).read_text())
        unknown = set(base) - set(RunConfig.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
    for k in RunConfig.__dataclass_fields__:
        v = getattr(args, k, None)
        if v is not None:
            base[k] = v
    cfg = RunConfig(**base).resolved()
    cfg.validate()
    return cfg


def _emit(cfg, name, payload):
    doc = {"config": {k: v for k, v in asdict(cfg).items() if k not in ("out", "workers")},
           "config_hash": cfg.digest(), "stage": name, "result": payload}
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if cfg.out:
        os.makedirs(cfg.out, exist_ok=True)
        Path(cfg.out, f"{name}.json").write_text(text)
    sys.stdout.write(text)


def run(cfg, stage):
    """Run one stage (or all); returns the exit status."""
    pipe = Pipeline(cfg)
    stages = STAGES if stage == "all" else (stage,)
    handlers = {"build": pipe.build, "quotient": pipe.quotient_stage, "harmonic": pipe.harmonic,
                "cusps": pipe.cusps_stage, "euler": pipe.euler, "verify": pipe.verify}
    status = EXIT_OK
    for name in stages:
        try:
            payload = handlers[name]()
        except InsufficientPrecision as exc:
            _emit(cfg, name, {"error": str(exc)})
            return EXIT_PRECISION
        except InstabilityError as exc:
            _emit(cfg, name, {"error": str(exc)})
            return EXIT_UNSTABLE
        except (CertificationFailure, BuildingError) as exc:
            _emit(cfg, name, {"error": f"{type(exc).__name__}: {exc}"})
            return EXIT_CERT
        _emit(cfg, name, payload)
        if name == "harmonic" and not pipe.report.stable:
            status = EXIT_UNSTABLE
        if name == "cusps" and payload.get("stabilization", {}).get("stabilized") is False:
            status = EXIT_UNSTABLE
        if name == "verify" and not payload["all_pass"]:
            status = EXIT_CERT
    return status


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        cfg = load_config(args)
    except (ConfigError, ValueError, TypeError, json.JSONDecodeError, OSError) as exc:
        sys.stderr.write(f"invalid config: {exc}\n")
        return EXIT_CONFIG
    return run(cfg, args.stage)


if __name__ == "__main__":
    sys.exit(main())
