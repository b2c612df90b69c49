"""Experiment configuration: presets, flat key=value files, flag overrides.

Config files are plain text with dotted keys, one ``key=value`` pair per
line; ``#`` starts a comment.  Command-line flags override file keys.
Example::

    symbol.preset=fig1
    n=500
    sigma=1/n
    noise.dist=paper-binomial
    mode=perturbed
    seed=1234

Symbols come from a named preset, inline tridiagonal fields (``symbol.d``,
``symbol.b``, ``symbol.c``), or a coefficient list (``symbol.coeff.-2=...``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .build import NoiseSpec
from .exprparse import ParseError
from .symbols import LaurentSymbol, TridiagonalSymbol

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "PRESETS",
    "build_preset",
    "parse_config_text",
    "load_config",
]


class ConfigError(ValueError):
    """Invalid configuration (exit code 2 at the CLI)."""


# Named symbol presets (coefficient expressions per power of z).
PRESETS: dict[str, dict[int, str]] = {
    "fig1": {-1: "i", 0: "1-2*x", 1: "i/4"},
    "fig2": {-1: "i/(x+1)", 1: "i/(x^2+100)"},
    "ex4": {-1: "i*(1-x/2)", 0: "1-x", 1: "(i/4)*(1+x)", 2: "3/2"},
    "ex5": {-2: "-(1/5)*(x+i)", -1: "i*(3/4+x)", 0: "(i/3)*x", 1: "1-2*x", 2: "(x^2-1)/5"},
}

MODES = ("deterministic", "perturbed", "randomized")


def build_preset(name: str) -> LaurentSymbol:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return LaurentSymbol.from_strings(PRESETS[name])


def parse_config_text(text: str) -> dict[str, str]:
    mapping: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        mapping[key.strip()] = value.strip()
    return mapping


def load_config(path: str | Path) -> dict[str, str]:
    try:
        return parse_config_text(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


@dataclass
class ExperimentConfig:
    symbol: LaurentSymbol
    symbol_spec: dict[str, str]  # echoed in metrics.json
    n_values: tuple[int, ...] = (500,)
    sigma: str = "1/n"  # literal number or the token "1/n"
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    mode: str = "perturbed"
    seed: int = 1234
    limit_samples: int = 100_000
    angles: int = 32
    out_dir: Path = Path("runs")
    range_nx: int = 100
    range_nt: int = 256

    def sigma_value(self, n: int) -> float:
        if self.sigma == "1/n":
            return 1.0 / n
        return float(self.sigma)

    def tridiagonal(self) -> TridiagonalSymbol | None:
        sym = self.symbol
        if sym.lower <= 1 and sym.upper <= 1:
            from .exprparse import parse_expr

            zero = parse_expr("0")
            return TridiagonalSymbol(
                d=sym.coefficient(-1) or zero,
                b=sym.coefficient(0) or zero,
                c=sym.coefficient(1) or zero,
            )
        return None

    def echo(self) -> dict[str, str]:
        flat = dict(self.symbol_spec)
        flat.update(
            {
                "n": ",".join(str(n) for n in self.n_values),
                "sigma": str(self.sigma),
                "noise.dist": self.noise.distribution,
                "noise.complex": str(self.noise.complex_valued).lower(),
                "mode": self.mode,
                "seed": str(self.seed),
                "samples": str(self.limit_samples),
                "angles": str(self.angles),
                "out": str(self.out_dir),
            }
        )
        if self.noise.distribution == "paper-binomial":
            flat["noise.center"] = repr(self.noise.binomial_center)
        if self.noise.distribution == "uniform-sym":
            flat["noise.half_width"] = repr(self.noise.half_width)
        return flat


def _parse_bool(value: str, key: str) -> bool:
    lowered = value.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {value!r}")


def _symbol_from_mapping(mapping: dict[str, str]) -> tuple[LaurentSymbol, dict[str, str]]:
    spec: dict[str, str] = {}
    preset = mapping.get("symbol.preset")
    if preset:
        spec["symbol.preset"] = preset
        return build_preset(preset), spec
    coeff_keys = sorted(k for k in mapping if k.startswith("symbol.coeff."))
    try:
        if coeff_keys:
            coeffs: dict[int, str] = {}
            for key in coeff_keys:
                power = key.rsplit(".", 1)[1]
                try:
                    j = int(power)
                except ValueError as exc:
                    raise ConfigError(f"{key}: power must be an integer") from exc
                coeffs[j] = mapping[key]
                spec[key] = mapping[key]
            return LaurentSymbol.from_strings(coeffs), spec
        if any(f"symbol.{f}" in mapping for f in "dbc"):
            d = mapping.get("symbol.d", "0")
            b = mapping.get("symbol.b", "0")
            c = mapping.get("symbol.c", "0")
            spec.update({"symbol.d": d, "symbol.b": b, "symbol.c": c})
            return TridiagonalSymbol.from_strings(d, b, c).as_laurent(), spec
    except (ParseError, ValueError) as exc:
        raise ConfigError(f"invalid symbol: {exc}") from exc
    raise ConfigError(
        "no symbol given: set symbol.preset, symbol.d/b/c, or symbol.coeff.<j>"
    )


def _noise_from_mapping(mapping: dict[str, str]) -> NoiseSpec:
    kwargs: dict = {}
    if "noise.dist" in mapping:
        kwargs["distribution"] = mapping["noise.dist"]
    if "noise.complex" in mapping:
        kwargs["complex_valued"] = _parse_bool(mapping["noise.complex"], "noise.complex")
    if "noise.center" in mapping:
        kwargs["binomial_center"] = float(mapping["noise.center"])
    if "noise.trials" in mapping:
        kwargs["binomial_trials"] = int(mapping["noise.trials"])
    if "noise.p" in mapping:
        kwargs["binomial_p"] = float(mapping["noise.p"])
    if "noise.half_width" in mapping:
        kwargs["half_width"] = float(mapping["noise.half_width"])
    try:
        return NoiseSpec(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def config_from_mapping(mapping: dict[str, str]) -> ExperimentConfig:
    """Validate a flat key=value mapping into an ExperimentConfig."""
    known_prefixes = ("symbol.", "noise.")
    known_keys = {"n", "sigma", "mode", "seed", "samples", "angles", "out"}
    for key in mapping:
        if not key.startswith(known_prefixes) and key not in known_keys:
            raise ConfigError(f"unknown config key {key!r}")
    symbol, spec = _symbol_from_mapping(mapping)
    cfg = ExperimentConfig(symbol=symbol, symbol_spec=spec)
    if "n" in mapping:
        try:
            cfg.n_values = tuple(int(part) for part in mapping["n"].split(","))
        except ValueError as exc:
            raise ConfigError(f"n: expected integers, got {mapping['n']!r}") from exc
        if any(n < 1 for n in cfg.n_values):
            raise ConfigError("n: all values must be >= 1")
    if "sigma" in mapping:
        sigma = mapping["sigma"]
        if sigma != "1/n":
            try:
                if float(sigma) < 0:
                    raise ConfigError("sigma must be >= 0")
            except ValueError as exc:
                raise ConfigError(f"sigma: number or '1/n', got {sigma!r}") from exc
        cfg.sigma = sigma
    cfg.noise = _noise_from_mapping(mapping)
    if "mode" in mapping:
        if mapping["mode"] not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        cfg.mode = mapping["mode"]
    if "seed" in mapping:
        try:
            cfg.seed = int(mapping["seed"])
        except ValueError as exc:
            raise ConfigError(f"seed: expected an integer") from exc
    if "samples" in mapping:
        cfg.limit_samples = int(mapping["samples"])
        if cfg.limit_samples < 1:
            raise ConfigError("samples must be >= 1")
    if "angles" in mapping:
        cfg.angles = int(mapping["angles"])
        if cfg.angles < 1:
            raise ConfigError("angles must be >= 1")
    if "out" in mapping:
        cfg.out_dir = Path(mapping["out"])
    return cfg
