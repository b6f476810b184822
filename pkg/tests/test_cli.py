import json

import pytest

from strokeseg.cli import main
from strokeseg.detect import oracle_boxes
from strokeseg.sketch_io import load_scene, load_segmentation, save_boxes


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    assert main(["compose", "--count", "3", "--out", str(root), "--seed", "4", "--max-pair-iou", "0"]) == 0
    return root


def scene_files(root):
    return sorted((root / "scenes").glob("*.json"))


def test_compose_is_deterministic(tmp_path, corpus):
    assert main(["compose", "--count", "3", "--out", str(tmp_path), "--seed", "4", "--max-pair-iou", "0"]) == 0
    for a, b in zip(scene_files(corpus), scene_files(tmp_path)):
        assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "annotations.json").exists()


def test_segment_then_evaluate(tmp_path, corpus, capsys):
    scene = scene_files(corpus)[0]
    pred = tmp_path / "pred.json"
    assert main(["segment", str(scene), "--detector", "oracle", "-o", str(pred)]) == 0
    res = load_segmentation(pred)
    assert res.config_used.iou_threshold == 0.65
    assert main(["evaluate", str(scene), "--pred", str(pred), "--csv", str(tmp_path / "rows.csv")]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["aon"] == 1.0 and report["s_iou"] == 1.0
    assert (tmp_path / "rows.csv").read_text().startswith("scene_id,aon")


def test_segment_with_box_file(tmp_path, corpus):
    scene_path = scene_files(corpus)[1]
    scene = load_scene(scene_path)
    boxes = tmp_path / "boxes.json"
    save_boxes(oracle_boxes(scene), boxes)
    out = tmp_path / "seg.json"
    assert main(["segment", str(scene_path), "--boxes", str(boxes), "-o", str(out)]) == 0
    assert load_segmentation(out).grouping() == frozenset(g.stroke_indices for g in scene.gt_instances)


def test_config_file_and_flag_precedence(tmp_path, corpus):
    conf = tmp_path / "conf.json"
    conf.write_text(json.dumps({"iou_threshold": 0.3, "num_repeats": 5}))
    out = tmp_path / "seg.json"
    scene = str(scene_files(corpus)[0])
    assert main(["segment", scene, "--detector", "cluster", "--config", str(conf), "--num-repeats", "2", "-o", str(out)]) == 0
    cfg = load_segmentation(out).config_used
    assert (cfg.iou_threshold, cfg.num_repeats) == (0.3, 2)


def test_tune_writes_reports(tmp_path, corpus):
    prefix = tmp_path / "grid"
    argv = ["tune", "--set", f"a={corpus / 'scenes'}", "--sigma", "10", "--iou-thresholds", "0.45,0.65",
            "--or-thresholds", "0.6", "--num-repeats-options", "1,3", "--thickness-options", "2", "--out", str(prefix)]
    assert main(argv) == 0
    doc = json.loads(prefix.with_suffix(".json").read_text())
    assert len(doc["rows"]) == 4 and "best" in doc
    assert prefix.with_suffix(".csv").read_text().count("\n") == 5


def test_render_and_rasterize(tmp_path, corpus):
    scene = str(scene_files(corpus)[0])
    svg, png = tmp_path / "s.svg", tmp_path / "s.png"
    assert main(["render", scene, "-o", str(svg)]) == 0
    assert "<svg" in svg.read_text()
    assert main(["rasterize", scene, "-o", str(png)]) == 0
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_exit_codes(tmp_path, capsys):
    with pytest.raises(SystemExit) as e:
        main(["segment", "--bogus"])
    assert e.value.code == 2
    assert main(["render", str(tmp_path / "missing.json"), "-o", str(tmp_path / "x.svg")]) == 1
    assert "error" in capsys.readouterr().err
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["rasterize", str(bad), "-o", str(tmp_path / "x.png")]) == 1
