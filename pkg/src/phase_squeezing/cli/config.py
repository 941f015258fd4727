from dataclasses import dataclass
from typing import Dict, Optional, Tuple
import math
import re

from phase_squeezing.core.params import SystemParams, make_params
from phase_squeezing.errors import ParameterError, ParseError, ValidationError
from phase_squeezing.experiments.presets import PRESETS

MODES = ('spectrum', 'spectrum-oracle', 'dressed', 'variance', 'omega3-sweep', 'phi-sweep', 'preset')
PARAM_KEYS = ('gamma1', 'gamma2', 'delta1', 'delta2', 'delta3', 'omega1', 'omega2', 'omega3', 'phi')
NUMERIC_KEYS = PARAM_KEYS + ('theta',)
KNOWN_KEYS = ('mode', 'preset', 'grid', 'output', 'workers') + NUMERIC_KEYS
GRID_MODES = ('omega3-sweep', 'phi-sweep')

# pi, -pi/2, 3*pi/4, 0.5*pi
PI_MULTIPLE = re.compile(r'^([+-]?)(?:(\d+(?:\.\d*)?|\.\d+)\s*\*\s*)?pi(?:\s*/\s*(\d+(?:\.\d*)?))?$')


@dataclass(frozen=True)
class RunConfig:
    mode: str
    output: str
    params: Optional[SystemParams] = None
    theta: float = 0.0
    grid: Optional[Tuple[float, float, int]] = None
    preset: Optional[str] = None
    workers: int = 1


def parse_number(text: str) -> float:
    """Plain float or a rational multiple of pi"""
    text = text.strip()
    try:
        value = float(text)
    except ValueError:
        match = PI_MULTIPLE.match(text)
        if match is None:
            raise ValueError(f"not a number: {text!r}")
        sign, coefficient, denominator = match.groups()
        if denominator is not None and float(denominator) == 0:
            raise ValueError(f"division by zero in {text!r}")
        value = float(coefficient or 1.0) * math.pi / float(denominator or 1.0)
        if sign == '-':
            value = -value
    if not math.isfinite(value):
        raise ValueError(f"not a finite number: {text!r}")
    return value


def parse_grid(text: str) -> Tuple[float, float, int]:
    """Parse low,high,points; both ends may be pi multiples"""
    parts = [part.strip() for part in text.split(',')]
    if len(parts) != 3:
        raise ValueError(f"grid needs min,max,points, got {text!r}")
    low, high = parse_number(parts[0]), parse_number(parts[1])
    try:
        points = int(parts[2])
    except ValueError:
        raise ValueError(f"grid point count must be an integer, got {parts[2]!r}")
    return low, high, points


def parse_config(text: str) -> RunConfig:
    """
    Parse key=value lines; blank lines and # comments are skipped.
    Syntax problems raise ParseError with the line number, semantic ones ValidationError with the key.
    """
    values: Dict[str, object] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ParseError(number, f"expected key=value, got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split('=', 1))
        if key not in KNOWN_KEYS:
            raise ValidationError(key, "unknown key")
        if key in values:
            raise ParseError(number, f"duplicate key {key!r}")

        try:
            if key in NUMERIC_KEYS:
                values[key] = parse_number(value)
            elif key == 'grid':
                values[key] = parse_grid(value)
            elif key == 'workers':
                values[key] = int(value)
            else:
                values[key] = value
        except ValueError as exc:
            raise ParseError(number, f"{key}: {exc}")

    return validate_config(values)


def validate_config(values: Dict[str, object]) -> RunConfig:
    mode = values.get('mode')
    if mode is None:
        raise ValidationError('mode', "required")
    if mode not in MODES:
        raise ValidationError('mode', f"must be one of {', '.join(MODES)}, got {mode!r}")
    output = values.get('output')
    if not output:
        raise ValidationError('output', "required")

    workers = values.get('workers', 1)
    if workers < 1:
        raise ValidationError('workers', f"must be at least 1, got {workers}")

    grid = values.get('grid')
    if grid is not None:
        low, high, points = grid
        if points < 2:
            raise ValidationError('grid', f"needs at least 2 points, got {points}")
        if high <= low:
            raise ValidationError('grid', f"max must exceed min, got {low:g},{high:g}")

    if mode == 'preset':
        preset = values.get('preset')
        if preset not in PRESETS:
            raise ValidationError('preset', f"must be one of {', '.join(PRESETS)}, got {preset!r}")
        return RunConfig(mode=mode, output=output, preset=preset, workers=workers)

    if 'preset' in values:
        raise ValidationError('preset', "only valid with mode=preset")
    if mode in GRID_MODES and grid is None:
        raise ValidationError('grid', f"required for mode={mode}")
    if mode == 'omega3-sweep' and grid[0] < 0:
        raise ValidationError('grid', "omega3 values must be non-negative")
    if mode == 'phi-sweep' and not (-math.pi < grid[0] and grid[1] <= math.pi + 1e-12):
        raise ValidationError('grid', "phase grid must lie in (-pi, pi]")
    if 'gamma1' not in values:
        raise ValidationError('gamma1', "required")

    raw = {key: values[key] for key in PARAM_KEYS if key in values}
    try:
        params = make_params(**raw)
    except ParameterError as exc:
        raise ValidationError(_offending_key(str(exc)), str(exc))

    return RunConfig(
        mode=mode,
        output=output,
        params=params,
        theta=values.get('theta', 0.0),
        grid=grid,
        workers=workers
    )


def _offending_key(message: str) -> str:
    if message.startswith('delta4'):
        return 'delta3'
    for key in PARAM_KEYS:
        if message.startswith(key):
            return key
    return 'params'
