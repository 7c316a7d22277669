import json
import os
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parents[2]


@pytest.fixture(scope="session")
def cli():
    """Path to the command-line binary, injected by ctest."""
    path = os.environ.get("DUALGP_CLI", "")
    if not path or not Path(path).exists():
        pytest.skip("DUALGP_CLI does not point at the command-line binary")
    return path


@pytest.fixture(scope="session")
def validate_schema():
    jsonschema = pytest.importorskip("jsonschema")

    def validate(doc, schema_name):
        schema = json.loads((REPO_ROOT / "schemas" / schema_name).read_text())
        jsonschema.validate(doc, schema)

    return validate
