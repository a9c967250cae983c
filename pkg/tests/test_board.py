"""Board scene graph: transform algebra, grouping, z-order, cut-out holes,
and forest invariants."""

import numpy as np
import pytest

from hollowcut.board import (
    IDENTITY,
    Board,
    Element,
    Group,
    add_element,
    apply_cutout,
    apply_transform,
    compose,
    duplicate,
    export_paths,
    group,
    invert,
    mint_id,
    new_board,
    op_matrix,
    parent_map,
    to3,
    translation,
    ungroup,
    validate_board,
    world_transform,
)
from hollowcut.errors import (
    CrossParentGroup,
    DuplicateId,
    NoOverlap,
    NotACutout,
    NotAGroup,
    SchemaError,
    SingularTransform,
    UnknownId,
)
from hollowcut.patterns import VectorPath


def rect_path(x0, y0, w, h):
    pts = np.array(
        [[x0, y0], [x0 + w, y0], [x0 + w, y0 + h], [x0, y0 + h], [x0, y0]],
        dtype=float,
    )
    return VectorPath((pts,))


def apply_pt(m, x, y):
    v = to3(m) @ np.array([x, y, 1.0])
    return v[0], v[1]


def board_abc():
    b = new_board(canvas=(64, 64))
    for nid, x in (("a", 0), ("b", 22), ("c", 44)):
        b = add_element(b, Element(id=nid, path=rect_path(x, 0, 10, 10)))
    return b


def test_op_matrices():
    assert np.array_equal(op_matrix("translate", {"dx": 3, "dy": -4}), translation(3, -4))
    s = op_matrix("scale", {"sx": 2.0})
    assert np.array_equal(s, np.array([[2.0, 0, 0], [0, 2.0, 0]]))
    r = op_matrix("rotate", {"degrees": 90, "center": (10, 10)})
    x, y = apply_pt(r, 10, 0)
    assert abs(x - 20) < 1e-12 and abs(y - 10) < 1e-12
    f = op_matrix("flip_h", {"center": (16, 0)})
    assert apply_pt(f, 0, 5) == (32, 5)


def test_flip_squared_is_identity_exact():
    for op in ("flip_h", "flip_v"):
        for params in ({}, {"center": (13.7, 42.1)}, {"center": (1024.0, 768.0)}):
            f = op_matrix(op, params)
            assert np.array_equal(compose(f, f), IDENTITY)


def test_singular_guards():
    with pytest.raises(SingularTransform):
        op_matrix("scale", {"sx": 0})
    with pytest.raises(SingularTransform):
        invert(np.zeros((2, 3)))
    with pytest.raises(SchemaError):
        op_matrix("shear", {})
    t = translation(5, 7)
    assert np.allclose(compose(invert(t), t), IDENTITY, atol=1e-15)


def test_element_validation():
    path = rect_path(0, 0, 4, 4)
    for bad in ("", "has space", "canvas", 7):
        with pytest.raises(SchemaError):
            Element(id=bad, path=path)
    with pytest.raises(SchemaError):
        Element(id="x", path=path, transform=np.eye(3))
    with pytest.raises(SingularTransform):
        Element(id="x", path=path, transform=np.zeros((2, 3)))
    with pytest.raises(SchemaError):
        Element(id="x", path=path, kind="sticker")
    with pytest.raises(SchemaError):
        Element(id="x", path=path, kind="cutout", fill="foreground")


def test_add_and_mint():
    b = board_abc()
    assert b.roots == ("a", "b", "c")
    with pytest.raises(DuplicateId):
        add_element(b, Element(id="a", path=rect_path(0, 0, 1, 1)))
    b2 = add_element(b, Element(id="n1", path=rect_path(0, 0, 1, 1)))
    b2, fresh = mint_id(b2)
    assert fresh == "n2"  # n1 is taken, minting skips it


def test_apply_transform_left_composes():
    b = board_abc()
    b = apply_transform(b, "a", "translate", {"dx": 3, "dy": 4})
    b = apply_transform(b, "a", "translate", {"dx": 1, "dy": 2})
    assert np.array_equal(b.nodes["a"].transform, translation(4, 6))
    with pytest.raises(UnknownId):
        apply_transform(b, "zzz", "translate", {})
    with pytest.raises(SingularTransform):
        apply_transform(b, "a", "scale", {"sx": 0.0})


def test_flip_twice_restores_element_exactly():
    b = board_abc()
    b = apply_transform(b, "a", "rotate", {"degrees": 30})
    b = apply_transform(b, "a", "translate", {"dx": 12.5, "dy": 7.25})
    before = b.nodes["a"].transform.copy()
    b = apply_transform(b, "a", "flip_h", {"center": (16.0, 16.0)})
    b = apply_transform(b, "a", "flip_h", {"center": (16.0, 16.0)})
    assert np.array_equal(b.nodes["a"].transform, before)


def test_group_structure_and_z_order():
    b = board_abc()
    b, gid = group(b, ["a", "c"])
    # the group takes the frontmost member's slot, members keep their order
    assert b.roots == ("b", gid)
    assert b.nodes[gid].children == ("a", "c")
    assert parent_map(b)["a"] == gid and parent_map(b)["b"] is None
    b = ungroup(b, gid)
    assert b.roots == ("b", "a", "c")
    assert gid not in b.nodes
    assert validate_board(b) == []


def test_group_ungroup_preserves_world_transforms():
    b = board_abc()
    b = apply_transform(b, "a", "rotate", {"degrees": 33, "center": (5, 5)})
    b = apply_transform(b, "c", "scale", {"sx": 1.5, "sy": 0.75})
    before = {nid: world_transform(b, nid) for nid in ("a", "b", "c")}

    b, gid = group(b, ["a", "c"])
    for nid in ("a", "b", "c"):
        assert np.array_equal(world_transform(b, nid), before[nid])

    b = apply_transform(b, gid, "rotate", {"degrees": 37, "center": (10, 4)})
    rotated = {nid: world_transform(b, nid) for nid in ("a", "c")}
    b = ungroup(b, gid)
    for nid in ("a", "c"):
        diff = np.abs(world_transform(b, nid) - rotated[nid]).max()
        assert diff <= 1e-9
    assert np.array_equal(world_transform(b, "b"), before["b"])


def test_group_errors():
    b = board_abc()
    with pytest.raises(CrossParentGroup):
        group(b, ["a"])
    with pytest.raises(CrossParentGroup):
        group(b, ["a", "a"])
    with pytest.raises(UnknownId):
        group(b, ["a", "zzz"])
    b2, gid = group(b, ["a", "b"])
    with pytest.raises(CrossParentGroup):
        group(b2, ["a", "c"])  # a now lives inside the group
    with pytest.raises(NotAGroup):
        ungroup(b2, "c")
    with pytest.raises(UnknownId):
        ungroup(b2, "zzz")


def test_duplicate_leaf_is_isolated():
    b = board_abc()
    b = apply_transform(b, "b", "translate", {"dx": 2, "dy": 3})
    b, copy_id = duplicate(b, "b")
    assert b.roots == ("a", "b", copy_id, "c")
    assert np.array_equal(b.nodes[copy_id].transform, b.nodes["b"].transform)
    b = apply_transform(b, copy_id, "translate", {"dx": 50, "dy": 0})
    assert np.array_equal(b.nodes["b"].transform, translation(2, 3))
    assert validate_board(b) == []


def test_duplicate_subtree_deep_copies():
    b = board_abc()
    b, gid = group(b, ["a", "b"])
    b, copy_id = duplicate(b, gid)
    copy = b.nodes[copy_id]
    assert isinstance(copy, Group) and len(copy.children) == 2
    assert set(copy.children).isdisjoint({"a", "b"})
    for src, dup_id in zip(("a", "b"), copy.children):
        assert b.nodes[dup_id].path is b.nodes[src].path
        assert np.array_equal(b.nodes[dup_id].transform, b.nodes[src].transform)
    assert validate_board(b) == []


def cutout_board():
    b = new_board(canvas=(64, 64))
    b = add_element(b, Element(id="t", path=rect_path(0, 0, 20, 20)))
    b = add_element(
        b, Element(id="c", path=rect_path(5, 5, 6, 6), kind="cutout", fill="hole")
    )
    return b


def test_apply_cutout_consumes_the_cutout():
    b = cutout_board()
    b = apply_transform(b, "c", "translate", {"dx": 2, "dy": 1})
    rel = compose(invert(world_transform(b, "t")), world_transform(b, "c"))
    b2 = apply_cutout(b, "c", "t")
    assert "c" not in b2.nodes and b2.roots == ("t",)
    holes = b2.nodes["t"].holes
    assert len(holes) == 1 and holes[0].id == "c"
    assert np.array_equal(holes[0].transform, rel)
    merged = export_paths(b2, "t")
    assert len(merged.subpaths) == 2
    assert validate_board(b2) == []


def test_hole_rides_with_the_target():
    b = apply_cutout(cutout_board(), "c", "t")
    before = export_paths(b, "t")
    b = apply_transform(b, "t", "translate", {"dx": 100, "dy": -3})
    after = export_paths(b, "t")
    # local geometry is untouched; the hole moves because the target does
    for p, q in zip(before.subpaths, after.subpaths):
        assert np.array_equal(p, q)


def test_apply_cutout_errors():
    b = cutout_board()
    with pytest.raises(NotACutout):
        apply_cutout(b, "t", "c")  # contour used as the cut-out
    with pytest.raises(NotACutout):
        apply_cutout(b, "c", "c")
    with pytest.raises(UnknownId):
        apply_cutout(b, "zzz", "t")
    far = add_element(
        b, Element(id="far", path=rect_path(500, 500, 4, 4), kind="cutout", fill="hole")
    )
    with pytest.raises(NoOverlap):
        apply_cutout(far, "far", "t")
    grouped, gid = group(add_element(b, Element(id="d", path=rect_path(30, 0, 5, 5))), ["t", "d"])
    with pytest.raises(NotACutout):
        apply_cutout(grouped, "c", gid)  # groups cannot take holes


def test_validate_board_flags_corruption():
    b = board_abc()
    assert validate_board(b) == []

    dangling = Board(nodes=dict(b.nodes), roots=b.roots + ("ghost",))
    assert any("dangling" in p for p in validate_board(dangling))

    repeated = Board(nodes=dict(b.nodes), roots=("a", "a", "b", "c"))
    assert any("repeats a root" in p or "referenced 2" in p for p in validate_board(repeated))

    orphaned = Board(nodes=dict(b.nodes), roots=("a", "b"))
    assert any("not reachable" in p for p in validate_board(orphaned))

    wrong_key = Board(nodes={"zz": b.nodes["a"]}, roots=("zz",))
    assert any("does not match" in p for p in validate_board(wrong_key))


def test_world_transform_unknown_id():
    with pytest.raises(UnknownId):
        world_transform(board_abc(), "nope")


def test_randomized_ops_keep_invariants():
    rng = np.random.default_rng(20250817)
    b = new_board(canvas=(256, 256))
    for i in range(6):
        b = add_element(b, Element(id=f"e{i}", path=rect_path(10 + 30 * i, 10, 20, 20)))

    for step in range(300):
        roots = list(b.roots)
        choice = rng.integers(0, 7)
        if choice == 0:
            b = apply_transform(
                b,
                roots[rng.integers(len(roots))],
                "translate",
                {"dx": float(rng.uniform(-20, 20)), "dy": float(rng.uniform(-20, 20))},
            )
        elif choice == 1:
            b = apply_transform(
                b,
                roots[rng.integers(len(roots))],
                "rotate",
                {"degrees": float(rng.uniform(0, 360)), "center": (128.0, 128.0)},
            )
        elif choice == 2:
            b = apply_transform(
                b,
                roots[rng.integers(len(roots))],
                "scale",
                {"sx": float(rng.uniform(0.5, 2.0)), "sy": float(rng.uniform(0.5, 2.0))},
            )
        elif choice == 3:
            nid = roots[rng.integers(len(roots))]
            before = b.nodes[nid].transform.copy()
            flip = "flip_h" if rng.integers(2) else "flip_v"
            f = op_matrix(flip, {"center": (128.0, 96.0)})
            assert np.array_equal(compose(f, f), IDENTITY)
            b = apply_transform(b, nid, flip, {"center": (128.0, 96.0)})
            b = apply_transform(b, nid, flip, {"center": (128.0, 96.0)})
            # restoring the stored transform reassociates the float products,
            # so the translation column can move by an ulp of the center
            assert np.abs(b.nodes[nid].transform - before).max() <= 1e-12
        elif choice == 4 and len(roots) >= 2:
            pick = rng.choice(len(roots), size=2, replace=False)
            b, _ = group(b, [roots[pick[0]], roots[pick[1]]])
        elif choice == 5:
            groups = [r for r in roots if isinstance(b.nodes[r], Group)]
            if groups:
                b = ungroup(b, groups[rng.integers(len(groups))])
        elif choice == 6 and len(b.nodes) < 60:
            b, _ = duplicate(b, roots[rng.integers(len(roots))])
        problems = validate_board(b)
        assert problems == [], f"step {step}: {problems}"
