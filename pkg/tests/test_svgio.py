"""Canonical document export and the strict import profile."""

import numpy as np
import pytest

from hollowcut.board import (
    Element,
    Group,
    add_element,
    apply_cutout,
    apply_transform,
    group,
    mint_id,
    new_board,
    validate_board,
)
from hollowcut.errors import UnsupportedFeature
from hollowcut.patterns import VectorPath
from hollowcut.svgio import export_svg, fnum, import_svg, tnum


def rect_path(x0, y0, w, h):
    pts = np.array(
        [[x0, y0], [x0 + w, y0], [x0 + w, y0 + h], [x0, y0 + h], [x0, y0]],
        dtype=float,
    )
    return VectorPath((pts,))


def test_number_formatting():
    assert fnum(1.0) == "1"
    assert fnum(3.14159) == "3.1416"
    assert fnum(-0.00004) == "0"
    assert fnum(-2.5) == "-2.5"
    assert tnum(-0.0) == "0.0"
    rng = np.random.default_rng(3)
    for x in rng.uniform(-1e3, 1e3, size=50):
        assert float(tnum(float(x))) == float(x)


def test_export_canonical_document():
    b = add_element(new_board(canvas=(64, 64)), Element(id="a", path=rect_path(10, 10, 20, 20)))
    expected = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        '<svg xmlns="http://www.w3.org/2000/svg" width="64" height="64" viewBox="0 0 64 64">\n'
        '  <g id="canvas">\n'
        '    <path id="a" d="M 10 10 L 30 10 L 30 30 L 10 30 Z" fill="#000000"'
        ' fill-rule="evenodd" transform="matrix(1.0 0.0 0.0 1.0 0.0 0.0)"/>\n'
        "  </g>\n"
        "</svg>\n"
    ).encode()
    assert export_svg(b) == expected


def test_scale_touches_size_attributes_only():
    b = add_element(new_board(canvas=(64, 64)), Element(id="a", path=rect_path(0, 0, 5, 5)))
    plain = export_svg(b).decode()
    scaled = export_svg(b, scale=2.5).decode()
    assert 'width="160" height="160" viewBox="0 0 64 64"' in scaled
    assert scaled.replace('width="160" height="160"', 'width="64" height="64"') == plain


def sample_board():
    b = new_board(canvas=(128, 96))
    b = add_element(b, Element(id="body", path=rect_path(10, 10, 40, 40)))
    b = add_element(b, Element(id="wing", path=rect_path(60, 20, 25, 30)))
    b = add_element(
        b, Element(id="eye", path=rect_path(20, 20, 8, 8), kind="cutout", fill="hole")
    )
    b = apply_transform(b, "wing", "rotate", {"degrees": 30, "center": (70, 30)})
    b, gid = group(b, ["body", "wing"])
    b = apply_transform(b, gid, "translate", {"dx": 3.25, "dy": -1.5})
    return b


def test_export_import_export_byte_stable():
    b = sample_board()
    b = apply_cutout(b, "eye", "body")
    first = export_svg(b)
    restored = import_svg(first)
    assert validate_board(restored) == []
    assert restored.canvas == (128.0, 96.0)
    assert export_svg(restored) == first


def test_import_reconstructs_structure():
    b = sample_board()
    restored = import_svg(export_svg(b))
    assert restored.roots == b.roots
    g = restored.nodes["n1"]
    assert isinstance(g, Group) and g.children == ("body", "wing")
    assert np.array_equal(g.transform, b.nodes["n1"].transform)
    eye = restored.nodes["eye"]
    assert eye.kind == "cutout" and eye.fill == "hole"
    assert restored.nodes["body"].kind == "contour"


def test_holes_come_back_as_subpaths():
    b = apply_cutout(sample_board(), "eye", "body")
    restored = import_svg(export_svg(b))
    body = restored.nodes["body"]
    assert body.holes == ()
    assert len(body.path.subpaths) == 2


def test_import_continues_minted_ids():
    b = sample_board()  # grouping minted n1
    restored = import_svg(export_svg(b))
    _, fresh = mint_id(restored)
    assert fresh == "n2"


def test_empty_board_round_trip():
    b = new_board(canvas=(32, 48))
    data = export_svg(b)
    restored = import_svg(data)
    assert restored.roots == () and restored.nodes == {}
    assert export_svg(restored) == data


def doc(body, svg_attrs='width="64" height="64" viewBox="0 0 64 64"'):
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" {svg_attrs}>\n'
        '  <g id="canvas">\n'
        f"{body}\n"
        "  </g>\n"
        "</svg>\n"
    )


PATH_OK = (
    '    <path id="a" d="M 0 0 L 4 0 L 4 4 Z" fill="#000000"'
    ' fill-rule="evenodd" transform="matrix(1.0 0.0 0.0 1.0 0.0 0.0)"/>'
)


@pytest.mark.parametrize(
    "data",
    [
        "not xml at all",
        '<div xmlns="http://www.w3.org/2000/svg"/>',
        '<svg xmlns="http://example.com/other" viewBox="0 0 8 8"><g id="canvas"/></svg>',
        # unexpected svg attribute
        doc(PATH_OK, svg_attrs='viewBox="0 0 64 64" onload="x()"'),
        # viewBox origin must be 0 0
        doc(PATH_OK, svg_attrs='viewBox="1 0 64 64"'),
        # missing canvas group
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 8 8"></svg>\n',
        # structural group must be alone at top level
        doc(PATH_OK).replace('<g id="canvas">', '<g id="canvas"></g><g id="extra">'),
        # foreign element
        doc('    <rect id="a" width="4" height="4"/>'),
        # text content
        doc(PATH_OK.replace("/>", ">hello</path>")),
        # unexpected path attribute
        doc(PATH_OK.replace('id="a"', 'id="a" class="x"')),
        # transform outside matrix form
        doc(PATH_OK.replace('matrix(1.0 0.0 0.0 1.0 0.0 0.0)', "translate(3 4)")),
        # five-entry matrix
        doc(PATH_OK.replace("matrix(1.0 0.0 0.0 1.0 0.0 0.0)", "matrix(1 0 0 1 0)")),
        # fill outside the two-color profile
        doc(PATH_OK.replace("#000000", "#ff0000")),
        # fill-rule is mandatory
        doc(PATH_OK.replace(' fill-rule="evenodd"', "")),
        # curve commands are outside the profile
        doc(PATH_OK.replace("L 4 0", "C 1 1 2 2 4 0")),
        # unclosed subpath
        doc(PATH_OK.replace(" Z", "")),
        # degenerate two-point subpath
        doc(PATH_OK.replace("d=\"M 0 0 L 4 0 L 4 4 Z\"", "d=\"M 0 0 L 4 0 Z\"")),
        # malformed id
        doc(PATH_OK.replace('id="a"', 'id="bad id"')),
        # reserved id
        doc(PATH_OK.replace('id="a"', 'id="canvas"')),
        # duplicate ids
        doc(PATH_OK + "\n" + PATH_OK),
    ],
)
def test_import_rejects_out_of_profile(data):
    with pytest.raises(UnsupportedFeature):
        import_svg(data)


def test_import_accepts_minimal_document():
    restored = import_svg(doc(PATH_OK))
    assert restored.roots == ("a",)
    assert len(restored.nodes["a"].path.subpaths) == 1


def test_random_boards_round_trip_stable():
    rng = np.random.default_rng(11)
    for trial in range(10):
        b = new_board(canvas=(200, 150))
        for i in range(int(rng.integers(1, 6))):
            b = add_element(
                b,
                Element(
                    id=f"e{i}",
                    path=rect_path(*rng.uniform(5, 80, size=2), *rng.uniform(4, 30, size=2)),
                ),
            )
            b = apply_transform(
                b, f"e{i}", "rotate", {"degrees": float(rng.uniform(0, 360))}
            )
        first = export_svg(b)
        assert export_svg(import_svg(first)) == first, f"trial {trial}"
