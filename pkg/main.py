import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent / "scripts"))

from main import main  # noqa: E402  (scripts/main.py)


if __name__ == "__main__":
    sys.exit(main())
