import json

import pytest

from splitwise import toy3


@pytest.fixture(scope="session")
def toy3_profile():
    return toy3()


@pytest.fixture()
def toy3_path(tmp_path):
    """Copy of the bundled toy3 fixture as an on-disk file."""
    from splitwise.profile import profile_to_obj

    path = tmp_path / "toy3.json"
    path.write_text(json.dumps(profile_to_obj(toy3())))
    return path
