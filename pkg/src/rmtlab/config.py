"""Experiment configuration.

Flat ``key = value`` text files with ``#`` comments, mirrored by the
typed ExperimentConfig dataclass.  Parsing is strict (unknown keys are
errors) and serialization round-trips losslessly.
"""

from dataclasses import dataclass, fields, replace

from .ensembles import ATOM_KINDS

__all__ = [
    "ConfigError",
    "EXPERIMENTS",
    "ExperimentConfig",
    "parse_config_text",
    "load_config",
    "config_to_text",
    "apply_overrides",
]


class ConfigError(ValueError):
    """Invalid configuration input: unknown key, bad value, bad combination."""


EXPERIMENTS = (
    "circular-law",
    "clt",
    "least-sv",
    "cumulants",
    "universality",
    "sv-profile",
    "girko-swap",
)

# field name -> coercion family used by the parser and the serializer
_FIELD_TYPES = {
    "experiment": "str",
    "n": "int",
    "m": "int",
    "atoms": "str",
    "atoms_b": "str",
    "tau": "opt_float",
    "replicas": "int",
    "master_seed": "int",
    "workers": "int",
    "out": "str",
    "n_grid": "int_tuple",
    "test_function": "str",
    "big_a": "float",
    "rho": "float",
    "z_angle": "float",
    "t0": "float",
    "etas": "float_tuple",
    "grid_resolution": "int",
    "profile_exponents": "float_tuple",
    "c0": "float",
    "ks_threshold": "float",
    "variance_window": "float",
    "decay_factor": "float",
    "zero_floor": "float",
    "cov_tolerance": "float",
    "asym_const_max": "float",
    "c2_check_n": "int",
    "moment_match_tol": "float",
    "local_law_d": "float",
    "local_law_const": "float",
    "center_radii": "float_tuple",
    "center_angles": "float_tuple",
    "window_radius": "float",
    "band_lo": "float",
    "band_hi": "float",
    "corollary_exponent": "float",
    "girko_threshold": "float",
    "swap_ratio_lo": "float",
    "swap_ratio_hi": "float",
    "failure_budget": "float",
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one experiment run needs, with documented defaults.

    Ensemble: ``tau`` set selects truncated-unitary factors (``atoms``
    ignored); ``tau`` unset selects iid factors with the ``atoms`` entry
    law.  ``atoms_b`` names the comparison ensemble where one is used.
    All gate thresholds are explicit so every tolerance is overridable.
    """

    experiment: str = "circular-law"
    n: int = 64
    m: int = 2
    atoms: str = "complex-gaussian"
    atoms_b: str = "four-moment-complex"
    tau: float = None
    replicas: int = 40
    master_seed: int = 20260816
    workers: int = 1
    out: str = "runs"
    n_grid: tuple = ()
    test_function: str = "re:2"
    big_a: float = 0.5           # tail exponent in n^{-1/2 - A}
    rho: float = 0.5             # relative bulk radius of the probe point
    z_angle: float = 0.0
    t0: float = 0.4              # swap shift magnitude
    etas: tuple = (0.1, 1.0)     # resolvent offsets for the swap check
    grid_resolution: int = 256   # quadrature grid for the identity check
    profile_exponents: tuple = (0.25,)
    c0: float = 0.1              # singular value profile constant
    ks_threshold: float = 0.02
    variance_window: float = 0.15
    decay_factor: float = 1.7    # required shrink per doubling
    zero_floor: float = 1e-12    # cumulants below this count as zero
    cov_tolerance: float = 10.0  # C2 within cov_tolerance/n of the limit
    asym_const_max: float = 10.0
    c2_check_n: int = 1024
    moment_match_tol: float = 1e-12
    local_law_d: float = 0.25
    local_law_const: float = 5.0
    center_radii: tuple = (0.35, 0.55)
    center_angles: tuple = (0.0, 1.0)
    window_radius: float = 1.5
    band_lo: float = 0.05
    band_hi: float = 50.0
    corollary_exponent: float = 0.1
    girko_threshold: float = 0.02
    swap_ratio_lo: float = 16.0
    swap_ratio_hi: float = 64.0
    failure_budget: float = 0.01

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(
                f"unknown experiment {self.experiment!r}; "
                f"choose from {', '.join(EXPERIMENTS)}"
            )
        for name in ("n", "m", "replicas", "workers"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.master_seed < 0:
            raise ConfigError("master_seed must be nonnegative")
        if self.tau is not None and not (self.tau > 0):
            raise ConfigError("tau must be positive when given")
        if self.atoms not in ATOM_KINDS:
            raise ConfigError(f"unknown atom kind {self.atoms!r}")
        if self.atoms_b not in ATOM_KINDS:
            raise ConfigError(f"unknown atom kind {self.atoms_b!r}")
        # rho = 0 is allowed only as the out-of-regime least-sv control
        if not (0.0 <= self.rho < 1.0):
            raise ConfigError("rho must lie in [0, 1)")
        if not (0.0 < self.failure_budget <= 1.0):
            raise ConfigError("failure_budget must lie in (0, 1]")
        if not (0.0 < self.local_law_d < 0.5):
            raise ConfigError("local_law_d must lie in (0, 1/2)")
        if len(self.center_radii) != len(self.center_angles):
            raise ConfigError("center radii and angles must pair up")
        if any(not (0.0 < r < 1.0) for r in self.center_radii):
            raise ConfigError("center radii must lie strictly inside (0, 1)")
        for name in (
            "big_a", "t0", "ks_threshold", "variance_window",
            "decay_factor", "cov_tolerance", "asym_const_max",
            "moment_match_tol", "local_law_const", "window_radius",
            "band_lo", "band_hi", "corollary_exponent",
            "girko_threshold", "swap_ratio_lo", "swap_ratio_hi",
        ):
            if not (getattr(self, name) > 0):
                raise ConfigError(f"{name} must be positive")
        if any(not (0.0 < t < 1.0) for t in self.profile_exponents):
            raise ConfigError("profile exponents must lie in (0, 1)")
        if any(not (e > 0) for e in self.etas):
            raise ConfigError("etas must be positive")


def _coerce(name, text):
    kind = _FIELD_TYPES[name]
    text = text.strip()
    try:
        if kind == "str":
            return text
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
        if kind == "opt_float":
            return None if text.lower() in ("", "none") else float(text)
        if kind == "int_tuple":
            return tuple(
                int(p) for p in text.split(",") if p.strip() != ""
            )
        if kind == "float_tuple":
            return tuple(
                float(p) for p in text.split(",") if p.strip() != ""
            )
    except ValueError as exc:
        raise ConfigError(f"bad value for {name!r}: {text!r}") from exc
    raise ConfigError(f"unhandled field type for {name!r}")


def _format(name, value):
    kind = _FIELD_TYPES[name]
    if kind == "str":
        return value
    if kind == "int":
        return str(value)
    if kind == "float":
        return repr(float(value))
    if kind == "opt_float":
        return "none" if value is None else repr(float(value))
    if kind == "int_tuple":
        return ",".join(str(v) for v in value)
    if kind == "float_tuple":
        return ",".join(repr(float(v)) for v in value)
    raise ConfigError(f"unhandled field type for {name!r}")


def parse_config_text(text, base=None):
    """Parse ``key = value`` lines into an ExperimentConfig.

    Blank lines and ``#`` comments (full-line or trailing) are ignored.
    Unknown keys and malformed lines raise ConfigError.  ``base`` supplies
    the starting values (defaults when omitted).
    """
    updates = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _FIELD_TYPES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        updates[key] = _coerce(key, value)
    base = base if base is not None else ExperimentConfig()
    try:
        return replace(base, **updates)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path):
    """Read and parse a config file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text)


def config_to_text(cfg):
    """Serialize to the flat text format; parsing it back is lossless."""
    lines = []
    for f in fields(ExperimentConfig):
        lines.append(f"{f.name} = {_format(f.name, getattr(cfg, f.name))}")
    return "\n".join(lines) + "\n"


def apply_overrides(cfg, **overrides):
    """Replace fields with non-None override values (CLI flags)."""
    updates = {}
    for key, value in overrides.items():
        if value is None:
            continue
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown config key {key!r}")
        updates[key] = value
    if not updates:
        return cfg
    try:
        return replace(cfg, **updates)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
