import pytest

from sftpij import core, gallery
from sftpij.battery import run_battery

ENTRIES = gallery.entry_names()


def test_entries_present():
    assert {"triangle", "sqrt2", "full2", "cycle3", "cycle5", "constant-first-coordinate",
            "ashley"} <= set(ENTRIES)


@pytest.mark.parametrize("name", ENTRIES)
def test_entry_reproduces_expectations(name):
    res = gallery.run_entry(name)
    assert res.status in (gallery.OK, gallery.SKIPPED), res.to_json()


@pytest.mark.parametrize("name", sorted(gallery.gallery_matrices()))
def test_expected_verdict_reproduced(name):
    M = gallery.gallery_matrices()[name]
    assert run_battery(M).verdict == gallery.load_entry(name)["expected_verdict"]


def test_externally_sourced_matrix_can_be_supplied():
    res = gallery.run_entry("ashley", core.full_shift(2))
    assert res.status == gallery.OK


def test_unknown_entry():
    with pytest.raises(KeyError):
        gallery.load_entry("does-not-exist")
