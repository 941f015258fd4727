from pathlib import Path
import sys

# Tests import phase_squeezing from the source tree
SRC_PATH = Path(__file__).parent.parent / "src"
if str(SRC_PATH) not in sys.path:
    sys.path.insert(0, str(SRC_PATH))
