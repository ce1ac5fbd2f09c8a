import xml.etree.ElementTree as ET

from fsclust.infoplane import FsPoint
from fsclust.svg import fs_plane_svg, silhouette_svg

NS = "{http://www.w3.org/2000/svg}"


def pts():
    return [FsPoint("Bern", 40.0, 0.05, 2.0, 1.0, 100), FsPoint("Rigi", 3.0, 0.6, 1.8, 1.0, 100), FsPoint("Basel", 10.0, 0.2, 2.0, 1.0, 100)]


def test_fs_plane_is_valid_svg_with_labels():
    root = ET.fromstring(fs_plane_svg(pts(), [0, 1, 0], "NO2"))
    texts = [t.text for t in root.iter(NS + "text")]
    for name in ("Bern", "Rigi", "Basel", "NO2"):
        assert name in texts
    # one marker per point; cluster 1 drawn with a different shape
    assert len(list(root.iter(NS + "circle"))) == 2
    assert len(list(root.iter(NS + "polygon"))) == 1


def test_fs_plane_without_labels_and_single_point():
    root = ET.fromstring(fs_plane_svg(pts()[:1]))
    assert root.tag == NS + "svg"


def test_silhouette_chart():
    svg = silhouette_svg({"NO2": {2: 0.6, 3: 0.4, 4: 0.3}, "O3": {2: 0.5, 3: 0.45}})
    root = ET.fromstring(svg)
    assert len(list(root.iter(NS + "polyline"))) == 2
    texts = [t.text for t in root.iter(NS + "text")]
    assert "NO2" in texts and "O3" in texts


def test_rendering_is_deterministic():
    assert fs_plane_svg(pts(), [0, 1, 0]) == fs_plane_svg(pts(), [0, 1, 0])
