"""Run the command-line front end from a source checkout without installing"""
from pathlib import Path
import sys

sys.path.insert(0, str(Path(__file__).parent / "src"))

from phase_squeezing.cli.main import main  # noqa: E402

if __name__ == '__main__':
    sys.exit(main())
