import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from archive_lens.catalogue import CategoryNode, CategoryTree

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def golden_page_bytes() -> bytes:
    return (FIXTURES / "golden_record.xml").read_bytes()


@pytest.fixture()
def golden_tree() -> CategoryTree:
    return CategoryTree([
        CategoryNode(code="D30000", parent=None, label="Humanities"),
        CategoryNode(code="D34000", parent="D30000", label="History"),
        CategoryNode(code="D34200", parent="D34000", label="Medieval history"),
    ])


@pytest.fixture()
def chain_tree() -> CategoryTree:
    return CategoryTree([
        CategoryNode(code="A1", parent=None, label="Root"),
        CategoryNode(code="B1", parent="A1", label="Middle"),
        CategoryNode(code="C1", parent="B1", label="Leaf"),
    ])


@pytest.fixture()
def sibling_tree() -> CategoryTree:
    return CategoryTree([
        CategoryNode(code="A1", parent=None, label="Root"),
        CategoryNode(code="B1", parent="A1", label="Left"),
        CategoryNode(code="C1", parent="A1", label="Right"),
    ])
