import pytest

from hpda.designs import (
    Design,
    builtin_design,
    catalog_names,
    count_blocks_containing,
    lambda_s,
    load_design,
    trivial_design,
    validate_design,
)
from hpda.errors import ParameterError

FANO_BLOCKS = ((1, 2, 7), (1, 4, 5), (1, 3, 6), (4, 6, 7), (2, 5, 6), (3, 5, 7), (2, 3, 4))


def test_fano_catalog_order_and_validity():
    d = builtin_design("fano-7-3-1")
    assert d.blocks == FANO_BLOCKS
    assert (d.v, d.k, d.b, d.t, d.lam) == (7, 3, 7, 2, 1)
    assert validate_design(d).ok


@pytest.mark.parametrize("name", ["fano-7-3-1", "steiner-3-8-4-1", "affine-2-9-3-1", "trivial-6-5", "trivial-4-4"])
def test_catalog_entries_validate(name):
    assert validate_design(builtin_design(name)).ok


def test_catalog_lists_known_names():
    assert "fano-7-3-1" in catalog_names()


def test_unknown_design_is_a_lookup_error():
    with pytest.raises(KeyError):
        builtin_design("no-such-design")


def test_lambda_s_matches_direct_count():
    d = builtin_design("fano-7-3-1")
    assert lambda_s(d, 0) == 7
    assert lambda_s(d, 1) == 3 == count_blocks_containing(d, [1])
    assert lambda_s(d, 2) == 1
    with pytest.raises(ParameterError):
        lambda_s(d, 3)
    s = builtin_design("steiner-3-8-4-1")
    assert [lambda_s(s, x) for x in range(4)] == [14, 7, 3, 1]


def test_trivial_design_blocks():
    d = trivial_design(6, 5)
    assert d.blocks == ((1, 2, 3, 4, 5), (1, 2, 3, 4, 6), (1, 2, 3, 5, 6), (1, 2, 4, 5, 6), (1, 3, 4, 5, 6), (2, 3, 4, 5, 6))
    assert d.t == 5 and d.lam == 1
    with pytest.raises(ParameterError):
        trivial_design(4, 5)


def test_unbalanced_design_reports_the_subset():
    blocks = FANO_BLOCKS[:-1] + ((2, 3, 5),)
    d = Design.from_blocks(7, blocks, 2, 1, validate=False)
    rep = validate_design(d)
    assert not rep.ok
    assert "balance" in rep.clauses()
    assert any(v.witness[0] == (2, 4) and v.witness[1] == 0 for v in rep.violations)


def test_block_with_repeated_point():
    d = Design.from_blocks(3, ((1, 1, 2), (1, 2, 3)), 1, 1, validate=False)
    assert "block-size" in validate_design(d).clauses()


def test_load_design_accepts_catalog_name_and_file(tmp_path):
    from hpda.formats import write_design

    d = builtin_design("fano-7-3-1")
    path = tmp_path / "fano.json"
    write_design(d, path)
    assert load_design(str(path)).blocks == d.blocks
    assert load_design("fano-7-3-1").blocks == d.blocks
