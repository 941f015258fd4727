# presets is imported by module path: it depends on analysis, which depends on sweep
from .sweep import GridRunner, SweepOutcome

__all__ = [
    'GridRunner',
    'SweepOutcome'
]
