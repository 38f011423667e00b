"""Config files, snapshot persistence and initial-data generators."""

import os
import struct
import tempfile

import numpy as np

from .basis import Grid
from .fields import SpectralField
from .sampling import random_field, single_mode_field
from .solver import SolverConfig

SNAPSHOT_MAGIC = b"HSTK1"
SNAPSHOT_VERSION = 1

CONFIG_KEYS = {
    "grid.n": int,
    "grid.k": int,
    "grid.h": float,
    "norm.p": float,
    "time.dt": float,
    "time.horizon": float,
    "split.delta": float,
    "split.eps0": float,
    "picard.max_iter": int,
    "picard.tol": float,
    "dealias": bool,
    "reproject": bool,
    "seed": int,
    "output.dir": str,
    # initial-data generator selection
    "data.kind": str,
    "data.amplitude": float,
    "data.mode_m": int,
    "data.mode_n": int,
    "data.mode_k": int,
    "data.decay": float,
    "data.rough": float,
    "snapshot.every": int,
    # parameters for the recursion-lemma verification suite
    "recursion.a0": float,
    "recursion.c1": float,
    "recursion.c2": float,
}


class ConfigError(ValueError):
    pass


def _parse_bool(s: str) -> bool:
    if s.lower() in ("true", "1", "yes", "on"):
        return True
    if s.lower() in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {s!r}")


def parse_config(path: str) -> dict:
    """Read `key = value` lines; '#' starts a comment; unknown keys rejected."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if key not in CONFIG_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            kind = CONFIG_KEYS[key]
            try:
                out[key] = _parse_bool(val) if kind is bool else kind(val)
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    return out


def solver_config(cfg: dict) -> SolverConfig:
    try:
        return SolverConfig(
            N=cfg.get("grid.n", 16),
            K=cfg.get("grid.k", 16),
            h=cfg.get("grid.h", 1.0),
            p=cfg.get("norm.p", 4.0),
            dt=cfg.get("time.dt", 0.005),
            T=cfg.get("time.horizon", 0.1),
            delta=cfg.get("split.delta", 0.01),
            eps0=cfg.get("split.eps0"),
            max_picard=cfg.get("picard.max_iter", 20),
            picard_tol=cfg.get("picard.tol", 1e-10),
            dealias=cfg.get("dealias", True),
            reproject=cfg.get("reproject", True),
            seed=cfg.get("seed", 0),
            snapshot_every=cfg.get("snapshot.every", 1),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def initial_data(cfg: dict, grid: Grid) -> SpectralField:
    """Named generators: random-decay, single-mode, rough-perturbation, zero."""
    kind = cfg.get("data.kind", "random-decay")
    amp = cfg.get("data.amplitude", 1.0)
    seed = cfg.get("seed", 0)
    if kind == "zero":
        return SpectralField.zeros(grid)
    if kind == "single-mode":
        a = single_mode_field(
            grid,
            m=cfg.get("data.mode_m", 1),
            n=cfg.get("data.mode_n", 0),
            k=cfg.get("data.mode_k", 0),
            amplitude=amp,
        )
        from .projection import project_hydrostatic

        return project_hydrostatic(a)
    if kind == "random-decay":
        return random_field(
            grid, seed=seed, decay=cfg.get("data.decay", 3.0), solenoidal=True, amplitude=amp
        )
    if kind == "rough-perturbation":
        return random_field(
            grid,
            seed=seed,
            decay=cfg.get("data.decay", 3.0),
            rough_amplitude=cfg.get("data.rough", 0.1),
            solenoidal=True,
            amplitude=amp,
        )
    raise ConfigError(f"unknown data.kind {kind!r}")


def write_snapshot(path: str, field: SpectralField, time: float):
    """Binary snapshot, written to a temp file then renamed (no partial files)."""
    g = field.grid
    header = SNAPSHOT_MAGIC + struct.pack(
        "<IIIIdd", SNAPSHOT_VERSION, field.ncomp, g.N, g.K, g.h, time
    )
    payload = np.ascontiguousarray(field.coeffs, dtype=np.complex128)
    # interleaved (re, im) little-endian f64 in index order comp, m, n, k
    body = payload.astype("<c16").tobytes()
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(os.path.abspath(path)) or ".")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(header)
            fh.write(body)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_snapshot(path: str):
    """Inverse of :func:`write_snapshot`; returns (field, time)."""
    with open(path, "rb") as fh:
        magic = fh.read(5)
        if magic != SNAPSHOT_MAGIC:
            raise ConfigError(f"bad snapshot magic {magic!r} in {path}")
        version, ncomp, N, K, h, time = struct.unpack("<IIIIdd", fh.read(struct.calcsize("<IIIIdd")))
        if version != SNAPSHOT_VERSION:
            raise ConfigError(f"unsupported snapshot version {version}")
        body = fh.read()
    coeffs = np.frombuffer(body, dtype="<c16").reshape(ncomp, N, N, K).astype(complex)
    return SpectralField(coeffs, Grid(N, K, h)), time
