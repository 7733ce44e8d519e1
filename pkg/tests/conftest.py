from __future__ import annotations

from pathlib import Path

import pytest

from sspc_testgen import load_model
from sspc_testgen.lang import Model

MODELS_DIR = Path(__file__).resolve().parent.parent / "models"
GOLDEN_DIR = Path(__file__).resolve().parent / "golden"

CORPUS = ["wing_mirror", "pulse", "echo", "radio_watch", "scanner", "narrow_guard"]

# Models small enough for whole-domain brute forcing (narrow_guard's input
# domain exceeds the enumeration cap by design).
CORPUS_BRUTE = ["wing_mirror", "pulse", "echo", "radio_watch", "scanner"]


def corpus_model(name: str) -> Model:
    result = load_model(str(MODELS_DIR / f"{name}.smx"))
    assert result.model is not None, [d.render() for d in result.diagnostics]
    return result.model


@pytest.fixture(scope="session")
def wing_mirror() -> Model:
    return corpus_model("wing_mirror")


@pytest.fixture(scope="session")
def pulse() -> Model:
    return corpus_model("pulse")


@pytest.fixture(scope="session")
def echo() -> Model:
    return corpus_model("echo")


@pytest.fixture(scope="session")
def radio_watch() -> Model:
    return corpus_model("radio_watch")


@pytest.fixture(scope="session")
def scanner() -> Model:
    return corpus_model("scanner")


@pytest.fixture(scope="session")
def narrow_guard() -> Model:
    return corpus_model("narrow_guard")
