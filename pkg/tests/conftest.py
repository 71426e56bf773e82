import json
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from paxdt import load_tree, make_instance

TESTS_DIR = os.path.dirname(__file__)
DATA_DIR = os.path.join(TESTS_DIR, "data")


def data_path(name):
    return os.path.join(DATA_DIR, name)


def minisolver_command():
    return f"{sys.executable} {os.path.join(TESTS_DIR, 'tools', 'minisolver.py')}"


@pytest.fixture(scope="session")
def fixture_doc():
    with open(data_path("fixture_tree.json"), "r", encoding="utf-8") as fh:
        return json.load(fh)


@pytest.fixture(scope="session")
def fixture_tree():
    return load_tree(data_path("fixture_tree.json"))


@pytest.fixture()
def fixture_instance(fixture_tree):
    return make_instance(fixture_tree, [4, 4, 2], expected="1")
