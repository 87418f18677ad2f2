"""Run configuration: dataclasses, defaults and the key-value file format.

A config file has ``[section]`` headers and ``key = value`` lines.  Physical
values may carry unit suffixes (``822.7 Hz``, ``40 mm``, ``1.9 D``).  JSON
with the same section/key nesting is accepted too.  Unknown sections or keys
are rejected.
"""

from __future__ import annotations

import configparser
import hashlib
import json
import logging
import math
from dataclasses import asdict, dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Any

from . import cavity as cav
from .dynamics import DissipationParams, DriveConfig, IntegratorConfig, SampleConfig
from .molecule import PRESETS, PROPANEDIOL, MoleculeSpec, hypothesis_inversion
from .units import TWO_PI, UnitError, parse_quantity

logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Malformed or inconsistent configuration."""


@dataclass(frozen=True)
class HomodyneConfig:
    phi_lo: float = -math.pi / 2
    N_lo: float = 1e8
    M_Y: float = 0.7
    t0: float | None = None
    tf: float | None = None


@dataclass(frozen=True)
class RunConfig:
    molecule: MoleculeSpec
    cavity: cav.CavityDesign
    drive: DriveConfig
    sample: SampleConfig
    detection: HomodyneConfig = HomodyneConfig()
    integrator: IntegratorConfig = IntegratorConfig()
    dissipation: DissipationParams = DissipationParams()
    seed: int = 0
    t_end: float | None = None

    @property
    def tau(self) -> float:
        """Transit time w0 / v."""
        return self.cavity.w0 / self.sample.v

    @property
    def n_cr(self) -> float:
        return 4.0 * self.drive.Delta_m**2 / self.cavity.g0**2

    def window(self) -> tuple[float, float]:
        """Detection window; centred on the cavity axis crossing by default."""
        det = self.detection
        if det.t0 is not None and det.tf is not None:
            return det.t0, det.tf
        if self.sample.trapped:
            t_end = 10.0 if self.t_end is None else self.t_end
            return 0.0, t_end
        centre = -self.sample.Ybar0 / self.sample.v
        half = det.M_Y * self.tau
        return centre - half, centre + half

    def with_(self, **changes) -> "RunConfig":
        """Copy with nested overrides; ``lam`` and ``Delta_m`` re-derive eta."""
        sample_keys = {"N_m", "v", "Ybar0", "trapped", "sigma_z0", "L"}
        drive_keys = {"lam", "Delta_m", "Delta_c"}
        det_keys = {"phi_lo", "N_lo", "M_Y", "t0", "tf"}
        s = {k: changes.pop(k) for k in list(changes) if k in sample_keys}
        d = {k: changes.pop(k) for k in list(changes) if k in drive_keys}
        h = {k: changes.pop(k) for k in list(changes) if k in det_keys}
        cfg = self
        if s:
            cfg = replace(cfg, sample=replace(cfg.sample, **s))
        if d:
            lam = d.get("lam", cfg.drive.lam)
            cfg = replace(
                cfg,
                drive=DriveConfig.from_lambda(
                    lam,
                    cfg.cavity.kappa,
                    cfg.cavity.g0,
                    d.get("Delta_m", cfg.drive.Delta_m),
                    d.get("Delta_c", cfg.drive.Delta_c),
                ),
            )
        if h:
            cfg = replace(cfg, detection=replace(cfg.detection, **h))
        if changes:
            cfg = replace(cfg, **changes)
        return cfg

    def digest(self) -> str:
        """Content hash, stable across processes."""
        blob = json.dumps(to_dict(self), sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()


def to_dict(cfg: RunConfig) -> dict[str, Any]:
    d = asdict(cfg)
    d["molecule"]["chirality"] = cfg.molecule.chirality.value
    return d


def build_config(
    *,
    molecule: MoleculeSpec = PROPANEDIOL,
    R_m: float = 40e-3,
    q: int = 0,
    f_target: float | None = None,
    mirror: cav.MirrorReference = cav.HAROCHE_REFERENCE,
    lam: float = 0.01,
    Delta_m: float = TWO_PI * 822.7,
    Delta_c: float = 0.0,
    eta: float | None = None,
    N_m: float = 1000,
    v: float = 1.0,
    Ybar0: float | None = None,
    trapped: bool = False,
    sigma_z0: float | None = None,
    L: float | None = None,
    detection: HomodyneConfig = HomodyneConfig(),
    integrator: IntegratorConfig = IntegratorConfig(),
    dissipation: DissipationParams = DissipationParams(),
    seed: int = 0,
    t_end: float | None = None,
) -> RunConfig:
    """Assemble a validated :class:`RunConfig` with every derived quantity filled in.

    The cavity is designed for ``f_target`` (default: the molecule's 3-2
    transition).  ``sigma_z0`` defaults to the inversion left by a perfect
    transfer at phi = -pi/2 for the molecule's chirality.
    """
    if f_target is None:
        f_target = molecule.omega_32 / TWO_PI
    design = cav.design_cavity(R_m, q, f_target, molecule.mu_b, mirror)
    drive = DriveConfig.from_lambda(lam, design.kappa, design.g0, Delta_m, Delta_c)
    if eta is not None and abs(eta - drive.eta) > 1e-9 * max(abs(drive.eta), 1.0):
        raise ConfigError(
            f"explicit eta={eta!r} contradicts eta = kappa*sqrt(lambda*N_cr) = {drive.eta!r}"
        )
    if sigma_z0 is None:
        sigma_z0 = hypothesis_inversion(molecule.chirality, -math.pi / 2)
    if Ybar0 is None:
        Ybar0 = -4.0 * design.w0
    if L is None:
        L = 0.1 * design.w0
    sample = SampleConfig(N_m=N_m, v=v, Ybar0=Ybar0, trapped=trapped, sigma_z0=sigma_z0, L=L)
    if not 0 <= seed < 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    return RunConfig(molecule, design, drive, sample, detection, integrator, dissipation, seed, t_end)


# section -> key -> (quantity kind or python type, build_config argument)
_SCHEMA: dict[str, dict[str, tuple[str, str]]] = {
    "molecule": {
        "preset": ("str", "preset"),
        "chirality": ("str", "chirality"),
        "A": ("rate", "A"),
        "B": ("rate", "B"),
        "C": ("rate", "C"),
        "mu_a": ("dipole", "mu_a"),
        "mu_b": ("dipole", "mu_b"),
        "mu_c": ("dipole", "mu_c"),
    },
    "cavity": {
        "R_m": ("length", "R_m"),
        "q": ("int", "q"),
        "f_target": ("frequency", "f_target"),
        "Q_ref": ("dimensionless", "Q_ref"),
        "f_ref": ("frequency", "f_ref"),
        "d_ref": ("length", "d_ref"),
        "stroke": ("length", "stroke"),
        "step": ("length", "step"),
    },
    "drive": {
        "lambda": ("dimensionless", "lam"),
        "Delta_m": ("rate", "Delta_m"),
        "Delta_c": ("rate", "Delta_c"),
        "eta": ("rate", "eta"),
    },
    "sample": {
        "N_m": ("dimensionless", "N_m"),
        "v": ("speed", "v"),
        "Ybar0": ("length", "Ybar0"),
        "trapped": ("bool", "trapped"),
        "sigma_z0": ("dimensionless", "sigma_z0"),
        "L": ("length", "L"),
    },
    "detection": {
        "phi_lo": ("angle", "phi_lo"),
        "N_lo": ("photon_rate", "N_lo"),
        "M_Y": ("dimensionless", "M_Y"),
        "t0": ("time", "t0"),
        "tf": ("time", "tf"),
    },
    "integrator": {
        "rtol": ("dimensionless", "rtol"),
        "atol": ("dimensionless", "atol"),
        "method": ("str", "method"),
        "max_step": ("time", "max_step"),
    },
    "dissipation": {
        "gamma": ("rate", "gamma"),
        "V_max": ("rate", "V_max"),
    },
    "run": {
        "seed": ("int", "seed"),
        "t_end": ("time", "t_end"),
    },
}


def _convert(kind: str, raw, where: str):
    try:
        if kind == "str":
            return str(raw).strip()
        if kind == "int":
            value = int(str(raw).strip(), 0) if not isinstance(raw, int) else raw
            return value
        if kind == "bool":
            if isinstance(raw, bool):
                return raw
            key = str(raw).strip().lower()
            if key in ("1", "true", "yes", "on"):
                return True
            if key in ("0", "false", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        return parse_quantity(raw, kind)
    except (UnitError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def from_mapping(data: dict[str, dict[str, Any]], source: str = "<mapping>") -> RunConfig:
    """Validate a section -> key -> value mapping and build the run config."""
    values: dict[str, dict[str, Any]] = {}
    for section, entries in data.items():
        if section not in _SCHEMA:
            raise ConfigError(f"{source}: unknown section [{section}]")
        if not isinstance(entries, dict):
            raise ConfigError(f"{source}: section [{section}] must hold key/value pairs")
        for key, raw in entries.items():
            if key not in _SCHEMA[section]:
                raise ConfigError(f"{source}: unknown key {key!r} in [{section}]")
            kind, name = _SCHEMA[section][key]
            values.setdefault(section, {})[name] = _convert(kind, raw, f"{source} [{section}] {key}")

    mol = values.get("molecule")
    if mol is None:
        logger.info("%s: no [molecule] section, using the propanediol preset", source)
        molecule = PROPANEDIOL
    else:
        preset = mol.pop("preset", None)
        chirality = mol.pop("chirality", None)
        if preset is not None:
            try:
                molecule = PRESETS[preset.lower()]
            except KeyError:
                raise ConfigError(f"{source}: unknown molecule preset {preset!r}") from None
            if mol:
                molecule = replace(molecule, **mol, name="custom")
        else:
            missing = {"A", "B", "C", "mu_a", "mu_b", "mu_c"} - set(mol)
            if missing:
                raise ConfigError(f"{source}: [molecule] needs a preset or all of {sorted(missing)}")
            try:
                molecule = MoleculeSpec(**mol)
            except ValueError as exc:
                raise ConfigError(f"{source}: {exc}") from None
        if chirality is not None:
            try:
                molecule = molecule.with_chirality(chirality)
            except ValueError as exc:
                raise ConfigError(f"{source}: {exc}") from None

    kwargs: dict[str, Any] = {"molecule": molecule}
    c = values.get("cavity", {})
    for k in ("R_m", "q", "f_target"):
        if k in c:
            kwargs[k] = c[k]
    ref_keys = {k: c[k] for k in ("f_ref", "d_ref", "Q_ref", "stroke", "step") if k in c}
    if ref_keys:
        kwargs["mirror"] = replace(cav.HAROCHE_REFERENCE, **ref_keys)
    kwargs.update(values.get("drive", {}))
    kwargs.update(values.get("sample", {}))
    if "detection" in values:
        kwargs["detection"] = HomodyneConfig(**values["detection"])
    if "integrator" in values:
        kwargs["integrator"] = IntegratorConfig(**values["integrator"])
    if "dissipation" in values:
        kwargs["dissipation"] = DissipationParams(**values["dissipation"])
    kwargs.update(values.get("run", {}))
    try:
        cfg = build_config(**kwargs)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"{source}: invalid configuration: {exc}") from None
    det = cfg.detection
    if (det.t0 is None) != (det.tf is None):
        raise ConfigError(f"{source}: give both t0 and tf or neither")
    if det.t0 is not None and not det.tf > det.t0:
        raise ConfigError(f"{source}: detection window needs tf > t0")
    return cfg


def _read_text(path: str | Path) -> tuple[str, str]:
    p = Path(path)
    if p.exists():
        return p.read_text(), str(p)
    bundled = resources.files("chiralcavity") / "configs" / p.name
    if bundled.is_file():
        return bundled.read_text(), f"<bundled>/{p.name}"
    raise ConfigError(f"config file not found: {path}")


def parse_config(path: str | Path) -> RunConfig:
    """Load a ``.cfg`` (key-value) or ``.json`` file.

    Names of bundled configs (``propanediol_fig2a.cfg`` ...) resolve even when
    no such file exists in the working directory.
    """
    text, source = _read_text(path)
    if source.endswith(".json"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
        return from_mapping(data, source)
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";"), strict=True
    )
    parser.optionxform = str  # keys are case-sensitive
    try:
        parser.read_string(text, source=source)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError(f"{source}:{exc.lineno}:1: key outside of any [section]") from None
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0] if exc.errors else (0, "")
        raise ConfigError(f"{source}:{lineno}:1: cannot parse line {line!r}") from None
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"{source}:{exc.lineno}:1: duplicate key {exc.option!r}") from None
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"{source}:{exc.lineno}:1: duplicate section {exc.section!r}") from None
    data = {s: dict(parser.items(s)) for s in parser.sections()}
    return from_mapping(data, source)


def bundled_configs() -> list[str]:
    root = resources.files("chiralcavity") / "configs"
    return sorted(p.name for p in root.iterdir() if p.name.endswith((".cfg", ".json")))
