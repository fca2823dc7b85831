import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from attnplan.taskfile import load_bundled


@pytest.fixture(scope="session")
def two_facts_doc():
    return load_bundled("two_facts.task")


@pytest.fixture(scope="session")
def muddy_doc():
    return load_bundled("muddy_children.task")
