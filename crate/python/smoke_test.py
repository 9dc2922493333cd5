"""Quick check that the spamtrack_py extension imports and its main calls work."""

import json
import tempfile
from pathlib import Path

import spamtrack_py as st

SMALL = """
seed = 7
n_windows = 4

[background]
n_users = 600
n_videos = 60
comments_per_window = 150

[campaign1]
active_windows = [1, 2]

[campaign2]
n_accounts = 6
active_windows = [2, 3]
"""


def main():
    text = st.normalize_comment("Check out the BEST deals at 77deals. com, right now!!!")
    assert text is not None and text == text.lower() and "!" not in text, text
    assert st.normalize_comment("too short") is None

    a = st.shingle(text)
    assert a == sorted(set(a))
    assert st.jaccard_distance(a, a) == 0.0
    assert st.jaccard_distance(a, st.shingle("something else entirely different")) > 0.6

    star = st.user_video_star(4)
    assert star == st.canonical_motif("VVUVV", [(2, 0), (2, 1), (2, 3), (2, 4)]), star
    print(st.render_motif(star))

    support, rows = st.ratio_profiles([{star: 10}, {star: 0}], epsilon=4)
    assert support == [star] and rows[0][0] > 0 > rows[1][0]
    unit = st.normalize_profile([3.0, 4.0])
    assert abs(unit[0] - 0.6) < 1e-12 and abs(unit[1] - 0.8) < 1e-12

    jsonl, truth = st.generate_scenario(config=SMALL)
    assert {"BG", "C1", "C2"} == set(truth.values())
    first = json.loads(jsonl.splitlines()[0])
    assert {"user_id", "video_id", "text", "published_at"} <= set(first)

    net = st.CommentNetwork.from_jsonl(jsonl)
    assert net.user_count > 0 and net.edge_count > 0
    spammer = next(u for u, g in sorted(truth.items()) if g == "C1")
    counts = net.ego_motif_counts(spammer, sizes=[3, 4])
    assert counts and all(v > 0 for v in counts.values())
    print(net, f"{spammer}: {len(counts)} motifs")

    with tempfile.TemporaryDirectory() as tmp:
        src = Path(tmp, "comments.jsonl")
        src.write_text(jsonl)
        out = Path(tmp, "out")
        summary = st.run_pipeline(str(src), str(out), config="window_count = 4\nmotif_sizes = [3, 4, 5]")
        assert summary["windows"] == 4
        assert (out / "run_manifest.json").exists() and (out / "series.csv").exists()
        print("pipeline:", summary["records"], "records")

    print("smoke test ok")


if __name__ == "__main__":
    main()
