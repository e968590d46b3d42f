import os
from pathlib import Path

import pytest

from helpers import build_corpus

DATA_DIR = Path(os.environ.get("BISECT_ORDER_DATA", Path(__file__).parent.parent / "data"))


@pytest.fixture(scope="session")
def corpus():
    return build_corpus()


def dataset_path(*names) -> Path | None:
    """First existing dataset file among the given names, or None."""
    for name in names:
        p = DATA_DIR / name
        if p.is_file():
            return p
    return None
