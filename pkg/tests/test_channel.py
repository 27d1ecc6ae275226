import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from macc.channel import (
    ChannelFormatError,
    ChannelShapeError,
    GaussianMaccParams,
    HalfDuplexParams,
    MaccChannel,
    build_halfduplex_channel,
    build_wiretap_channel,
    channel_from_dict,
    channel_to_dict,
    load_channel,
    marginalize,
    random_channel,
    save_channel,
    validate_channel,
)

NULL = 0


def test_degenerate_channel_is_valid():
    assert validate_channel(MaccChannel(np.ones((1, 1, 1, 1)))).ok


def test_deficit_reported_on_offending_slice():
    p = np.full((2, 2, 1, 2), 0.5)
    p[1, 0, 0, 1] = 0.499
    rep = validate_channel(MaccChannel(p))
    assert not rep.ok
    (v,) = rep.violations
    assert (v.x1, v.x2) == (1, 0)
    assert v.deficit == pytest.approx(0.001, abs=1e-12)


def test_negative_entry_is_a_violation():
    p = np.zeros((1, 1, 1, 3))
    p[0, 0, 0] = [1.5, -0.5, 0.0]
    rep = validate_channel(MaccChannel(p))
    assert not rep.ok and rep.negative_entries == 1


def test_dimension_mismatch_is_structural():
    ch = MaccChannel(np.full((2, 2, 2, 2), 0.25))
    with pytest.raises(ChannelShapeError):
        validate_channel(ch, sizes=(2, 2, 2, 3))
    with pytest.raises(ChannelShapeError):
        MaccChannel(np.ones((2, 2, 2)))


def test_alphabet_cap_is_configurable():
    ch = MaccChannel(np.full((1, 1, 1, 70), 1 / 70))
    with pytest.raises(ChannelShapeError):
        validate_channel(ch)
    assert validate_channel(ch, max_alphabet=128).ok


def test_halfduplex_builder():
    ch = build_halfduplex_channel()
    assert ch.sizes == (3, 2, 2, 3)
    assert validate_channel(ch).ok
    # listening: Y = X2 and Y1 = Y (Y1 symbol 1 + bit)
    assert ch.p[NULL, 1, 1, 2] == 1.0
    assert ch.p[NULL, 0, 0, 1] == 1.0
    # transmitting X1 = 1 (index 2) with X2 = 1: Y = 0, Y1 null
    assert ch.p[2, 1, 0, NULL] == 1.0
    assert ch.p[1, 0, 0, NULL] == 1.0
    assert np.all(np.count_nonzero(ch.p.reshape(6, -1), axis=1) == 1)


def test_channel_is_immutable():
    ch = build_halfduplex_channel()
    with pytest.raises(ValueError):
        ch.p[0, 0, 0, 0] = 0.3


def test_marginalize_examples():
    ch = build_halfduplex_channel()
    py = marginalize(ch, {"Y"})
    assert py.shape == (3, 2, 2)
    assert py[NULL, 1, 1] == 1.0
    assert np.array_equal(marginalize(ch, {"Y", "Y1"}), ch.p)
    uni = MaccChannel(np.full((2, 2, 2, 2), 0.25))
    assert np.allclose(marginalize(uni, "Y"), 0.5)
    with pytest.raises(ValueError):
        marginalize(ch, set())
    with pytest.raises(ValueError):
        marginalize(ch, {"Z"})


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["Y", "Y1"]))
def test_marginal_sums_and_idempotence(seed, axis):
    ch = random_channel(np.random.default_rng(seed), 2, 3, 2, 3)
    m = marginalize(ch, {axis})
    assert np.allclose(m.sum(axis=2), 1.0, atol=1e-12, rtol=0)
    both = marginalize(ch, {"Y", "Y1"})
    again = marginalize(MaccChannel(both), {axis})
    assert np.array_equal(again, m)


def test_wiretap_builder_is_valid():
    for e in (0.0, 0.3, 0.5):
        ch = build_wiretap_channel(e, 0.1)
        assert validate_channel(ch).ok
        py1 = marginalize(ch, "Y1")
        assert py1[0, 1, 1] == pytest.approx(1 - e)


def test_params_validation():
    HalfDuplexParams(0.5, 0.5, 0.2)
    with pytest.raises(ValueError):
        HalfDuplexParams(0.6, 0.5)
    with pytest.raises(ValueError):
        HalfDuplexParams(0.2, 0.1, 1.2)
    assert np.allclose(HalfDuplexParams(0.25, 0.25).px1, [0.25, 0.5, 0.25])
    with pytest.raises(ValueError):
        GaussianMaccParams(1, 1, 0, 1)
    with pytest.raises(ValueError):
        GaussianMaccParams(-1, 1, 1, 1)


def test_json_round_trip(tmp_path):
    ch = build_halfduplex_channel()
    path = tmp_path / "hd.json"
    save_channel(ch, path)
    back = load_channel(path)
    assert np.array_equal(back.p, ch.p)
    assert back.labels["X1"] == ["null", "0", "1"]


@pytest.mark.parametrize("mutate, err", [
    (lambda d: d.pop("ny1"), ChannelFormatError),
    (lambda d: d["p"][0][0].append([0.0, 0.0, 0.0]), ChannelFormatError),
    (lambda d: d["p"][1][1][0].pop(), ChannelFormatError),
    (lambda d: d.__setitem__("nx1", 4), ChannelShapeError),
    (lambda d: d["p"][0][0][0].__setitem__(1, 0.999), ChannelFormatError),
    (lambda d: d["p"][0][0][0].__setitem__(1, "1"), ChannelFormatError),
])
def test_parser_rejects_bad_documents(mutate, err):
    doc = channel_to_dict(build_halfduplex_channel())
    mutate(doc)
    with pytest.raises(err):
        channel_from_dict(json.loads(json.dumps(doc)))


def test_malformed_json_reports_position(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"nx1": 1,\n "nx2": }')
    with pytest.raises(ChannelFormatError, match="line 2"):
        load_channel(path)
