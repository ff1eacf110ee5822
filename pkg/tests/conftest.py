from importlib.resources import files
from pathlib import Path

import pytest

from crwlf import load_program, parse_term

CORPUS = Path(str(files("crwlf") / "corpus"))


def corpus(name, **kw):
    return load_program(CORPUS / f"{name}.crwlf", **kw)


@pytest.fixture(scope="session")
def coin():
    return corpus("coin")


@pytest.fixture(scope="session")
def graph():
    return corpus("graph")


@pytest.fixture(scope="session")
def safe():
    return corpus("safe")


@pytest.fixture(scope="session")
def nim():
    return corpus("nim")


@pytest.fixture(scope="session")
def defaults():
    return corpus("defaults")


@pytest.fixture(scope="session")
def lists():
    return corpus("lists")


def T(program, text):
    return parse_term(text, program.signature)
