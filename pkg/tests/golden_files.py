"""Golden-file comparison; set GIBBSFREE_REGEN_GOLDEN=1 to rewrite the files."""

import os
from pathlib import Path

GOLDEN = Path(__file__).parent / "golden"


def check_golden(name, text):
    path = GOLDEN / name
    if os.environ.get("GIBBSFREE_REGEN_GOLDEN") == "1" or not path.exists():
        path.write_text(text)
    assert text == path.read_text(), f"{name} differs from its golden copy"
