import sys
from pathlib import Path

# make `from tests...` imports work regardless of invocation directory
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))
