import os
import shutil

import pytest

CLIPS_DIR = os.path.join(os.path.dirname(__file__), "..", "clips")
PRIMARY_CLI = shutil.which("mklvc")


@pytest.fixture(scope="session")
def clip_a():
    return os.path.join(CLIPS_DIR, "clip_a.wav")


@pytest.fixture(scope="session")
def clip_b():
    return os.path.join(CLIPS_DIR, "clip_b.wav")


def require_primary_cli():
    if PRIMARY_CLI is None:
        pytest.skip("primary mklvc CLI not installed; interop tests need it on PATH")
    return PRIMARY_CLI
