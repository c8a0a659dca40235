import json
import os
import random
from pathlib import Path

import pytest

import errata

SOURCE = Path(os.environ.get("ERRATA_SOURCE_DIR", Path(__file__).resolve().parents[2]))


def test_distance_and_alignment():
    assert errata.damerau_distance("litel", "little") == 2
    assert errata.damerau_distance("ab", "ba") == 1
    ops = errata.align("emty", "empty")
    assert ops == [{"kind": "insert", "position": 2, "expected": "p", "written": ""}]


def test_classification():
    ann = errata.classify_pair("alot", "a lot", "en")
    assert [i["type"] for i in ann["instances"]] == ["boundary"]
    assert ann["error_count"] == 1
    assert errata.classify_pair("litel", "little", "en")["error_count"] == 2
    with pytest.raises(errata.ErrataError) as info:
        errata.classify_pair("", "casa")
    assert info.value.code == "EmptyAfterNormalization"
    assert isinstance(info.value, ValueError)


def test_scores():
    s = errata.score_writing(["little"], ["litel"], "en")
    assert s["total_errors"] == 2
    assert s["errors_per_wrong_word"] == 2.0
    assert errata.score_writing(["el", "sol"], ["el", "sol"])["errors_per_wrong_word"] is None
    r = errata.score_reading(["el", "sol"], ["sol"])
    assert r["total_errors"] == 1 and r["errors_per_word"] == 0.5
    assert abs(errata.delta(0.360, 0.288) + 0.072) < 1e-12


def test_statistics():
    w, p = errata.shapiro_wilk([148, 154, 158, 160, 161, 162, 166, 170, 182, 195, 236])
    assert abs(w - 0.7888146948631716) < 1e-3
    t = errata.paired_t([1, 2, 3], [0, 0, 0])
    assert t["method"] == "paired_t" and t["df"] == 2
    assert abs(t["statistic"] - 3.4641016151377544) < 1e-9
    x = errata.wilcoxon_signed_rank([0, 1, 2, 3, -4, 5], [0] * 6)
    assert x["exact"] and x["p"] == 0.4375 and x["n"] == 5
    rng = random.Random(4)
    a = [rng.gauss(0, 1) for _ in range(40)]
    assert errata.choose_and_run(a, [0.0] * 40, 0.0)["method"] == "paired_t"


def test_pipeline(tmp_path):
    bank = errata.analyze_corpus(SOURCE / "data/corpus/es_fixture.tsv", "es")
    assert bank["language"] == "es" and len(bank["patterns"]) > 10
    patterns = tmp_path / "patterns.json"
    patterns.write_text(json.dumps(bank))
    words = sorted({correct for p in bank["patterns"] for _, correct in p["examples"] if " " not in correct})
    lexicon = tmp_path / "lexicon.tsv"
    lexicon.write_text("".join(f"{w}\t{1000 - i}\n" for i, w in enumerate(words)))
    exercises = errata.generate_bank(patterns, lexicon, per_level=2, seed=3, allow_shortfall=True)
    assert exercises["version"] == 1
    assert exercises["exercises"]
    for ex in exercises["exercises"]:
        assert ex["type"] in {"add_letter", "remove_letter", "change_letter", "reorder_letters", "split_words", "word_ending"}


def test_study_and_replay(tmp_path):
    rows = ["child_id,group,test_index,variable,value"]
    rng = random.Random(9)
    for child in range(12):
        group = "AB"[child % 2]
        for test in (1, 2, 3):
            rows.append(f"c{child},{group},{test},epw,{0.3 + rng.random() / 10:.4f}")
    csv = tmp_path / "study.csv"
    csv.write_text("\n".join(rows) + "\n")
    summary = errata.summarize_study(csv)
    assert summary["children"] == 12
    assert summary["variables"][0]["data_points"] == 24

    log = tmp_path / "events.jsonl"
    log.write_text("")
    assert errata.replay(log) == {}
    log.write_text('{"seq":1,"kind":"player_created","at":5,"player_id":"p1"')
    with pytest.raises(errata.ErrataError) as info:
        errata.replay(log)
    assert info.value.code == "CorruptLog"
