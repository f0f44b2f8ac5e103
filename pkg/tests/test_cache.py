import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from objects.sections import ThetaFamily
from utils.cache import (
    canonical_json,
    group_cache_key,
    load_basis,
    load_group,
    payload_hash,
    save_basis,
    save_group,
)
from utils.errors import CacheIntegrityError
from utils.quotient import quotient_kernel


def test_flat_group_roundtrip_is_exact(tmp_path, flat_space):
    enumeration = flat_space.enumerate(20.0)
    assert len(enumeration) > 1000
    path = save_group(enumeration, tmp_path / "flat.npz")
    loaded = load_group(path, flat_space)
    assert_array_equal(loaded.data["m"], enumeration.data["m"])
    assert_array_equal(loaded.data["n"], enumeration.data["n"])
    assert_array_equal(loaded.displacements, enumeration.displacements)
    assert loaded.radius == enumeration.radius
    assert [g.key for g in loaded[:10]] == [g.key for g in enumeration[:10]]


def test_disc_group_roundtrip_keeps_words(tmp_path, disc_space, disc_enumeration):
    path = save_group(disc_enumeration, tmp_path / "disc.npz")
    loaded = load_group(path, disc_space)
    assert_array_equal(loaded.data["words"], disc_enumeration.data["words"])
    assert loaded[3].word == disc_enumeration[3].word


def test_truncated_file_is_refused(tmp_path, flat_space):
    path = save_group(flat_space.enumerate(5.0), tmp_path / "flat.npz")
    content = path.read_bytes()
    path.write_bytes(content[: len(content) // 2])
    with pytest.raises(CacheIntegrityError):
        load_group(path, flat_space)


def test_tampered_payload_is_refused(tmp_path, flat_space):
    path = save_group(flat_space.enumerate(5.0), tmp_path / "flat.npz")
    with np.load(path) as archive:
        arrays = {name: archive[name] for name in archive.files}
    arrays["m"] = arrays["m"][::-1].copy()
    np.savez(path, **arrays)
    with pytest.raises(CacheIntegrityError, match="hash"):
        load_group(path, flat_space)


def test_wrong_model_is_refused(tmp_path, flat_space, disc_space):
    path = save_group(flat_space.enumerate(2.0), tmp_path / "flat.npz")
    with pytest.raises(CacheIntegrityError):
        load_group(path, disc_space)


def test_basis_roundtrip_reproduces_the_kernel(tmp_path, flat_space, theta_bases):
    basis = theta_bases[3]
    path = save_basis(basis, tmp_path / "basis.npz")
    loaded = load_basis(path)
    assert isinstance(loaded.family, ThetaFamily)
    assert loaded.rank == basis.rank
    x, y = np.array([0.3 + 0.2j, 1.7 - 0.4j]), np.array([0.5j, 0.9 + 0.9j])
    assert_allclose(quotient_kernel(x, y, loaded, flat_space, 3).unitary,
                    quotient_kernel(x, y, basis, flat_space, 3).unitary, atol=1e-12)


def test_cache_keys_and_hashes(flat_space):
    caps = {"elements": 1000}
    assert group_cache_key(flat_space, 2.0, caps) != group_cache_key(flat_space, 3.0, caps)
    assert group_cache_key(flat_space, 2.0, caps).startswith("flat-")
    a = {"x": np.arange(3)}
    assert payload_hash(a) == payload_hash({"x": np.arange(3)})
    assert payload_hash(a) != payload_hash({"x": np.arange(3.0)})
    assert canonical_json({"b": 1, "a": [1, 2]}) == '{"a":[1,2],"b":1}'
