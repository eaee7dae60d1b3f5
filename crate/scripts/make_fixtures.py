#!/usr/bin/env python3
"""Regenerate the synthetic fixtures under fixtures/.

Output is fully determined by SEED; rerunning rewrites identical files.
"""

import json
import random
from datetime import datetime, timedelta, timezone
from pathlib import Path

SEED = 2018
ROOT = Path(__file__).resolve().parent.parent / "fixtures"

LEXICON = [
    # very positive
    ("love", 0.9), ("amazing", 0.9), ("excellent", 0.85), ("great", 0.8),
    ("wonderful", 0.8), ("well done", 0.8), ("proud", 0.7), ("brilliant", 0.75),
    # positive
    ("hope", 0.3), ("fair", 0.2), ("helpful", 0.35), ("interesting", 0.3),
    ("calm", 0.25), ("would be very easy", 0.472),
    # negative
    ("sad", -0.35), ("wrong", -0.3), ("worried", -0.3), ("unfair", -0.4),
    ("boring", -0.25), ("not good", -0.45),
    # very negative
    ("hate", -0.9), ("disgusting", -1.0), ("liar", -0.9), ("corrupt", -0.8),
    ("terrible", -0.9), ("idiot", -0.9), ("shame on you", -0.95), ("pathetic", -0.85),
    ("waste of time", -0.7),
]

CLASS_WORDS = {
    0: ["hate", "disgusting", "liar", "corrupt", "terrible", "idiot", "shame on you", "pathetic"],
    1: ["sad", "wrong", "worried", "unfair", "boring", "not good"],
    2: [],
    3: ["hope", "fair", "helpful", "interesting", "calm", "would be very easy"],
    4: ["love", "amazing", "excellent", "great", "wonderful", "well done", "proud", "brilliant"],
}

FILLER = (
    "news today government election minister people report road price city budget "
    "police match team weather school train bus market river bridge village council "
    "doctor hospital farmer tea rice fuel tax office station park street festival"
).split()

EMOJI = [("😀", "+1"), ("😍", "+1"), ("👍", "+1"), ("❤", "+1"), ("😡", "-1"), ("😢", "-1"), ("👎", "-1"), ("🤬", "-1")]

PAGES = ["dailynews", "citypost", "nationtv", "morningherald"]
POSTS = 200
COMMENTS = 500
PLANTED = {17: 30, 88: 30, 151: 30}
NORMAL_MIX = [0.08, 0.2, 0.32, 0.2, 0.2]


def comment_text(rng, cls, long=False):
    n = rng.randint(22, 45) if long else rng.randint(2, 9)
    words = [rng.choice(FILLER) for _ in range(n)]
    for _ in range(rng.randint(1, 2) if cls != 2 else 0):
        words.insert(rng.randint(0, len(words)), rng.choice(CLASS_WORDS[cls]))
    text = " ".join(words)
    if cls in (0, 4) and rng.random() < 0.2:
        text += "!"
    if rng.random() < 0.1:
        text = "@" + rng.choice(["anil", "kumari", "nimal"]) + " " + text
    if rng.random() < 0.05:
        text += " https://example.com/" + rng.choice(FILLER)
    return text


def build_corpus(rng):
    start = datetime(2018, 2, 1, tzinfo=timezone.utc)
    post_times = [start + timedelta(minutes=rng.randint(0, 27 * 24 * 60)) for _ in range(POSTS)]
    counts = [1] * POSTS
    for p, n in PLANTED.items():
        counts[p] = n
    spare = COMMENTS - sum(counts)
    normal = [p for p in range(POSTS) if p not in PLANTED]
    for _ in range(spare):
        counts[rng.choice(normal)] += 1

    rows = []
    for p in range(POSTS):
        post_id = f"{PAGES[p % len(PAGES)]}_{p:04d}"
        for k in range(counts[p]):
            if p in PLANTED:
                cls = 0 if k < int(0.8 * counts[p]) else rng.choice([1, 2, 3])
                minutes = rng.randint(5, 150) if cls == 0 else rng.randint(0, 2880)
            else:
                cls = rng.choices(range(5), weights=NORMAL_MIX)[0]
                minutes = rng.randint(0, 2880)
            text = comment_text(rng, cls, long=rng.random() < 0.04)
            if rng.random() < 0.1:
                e = rng.choice([x for x, s in EMOJI if (s == "+1") == (cls >= 3)]) if cls != 2 else "🙂"
                text += " " + e
            t = post_times[p] + timedelta(minutes=minutes)
            rows.append({
                "post_id": post_id,
                "comment_id": f"{post_id}_{k:03d}",
                "created_time": t.strftime("%Y-%m-%dT%H:%M:%S+0000"),
                "message": text,
            })
    # two comments that preprocess to nothing
    for i, r in enumerate(rng.sample(range(len(rows)), 2)):
        rows[r]["message"] = f"https://example.com/watch?v={i}"
    rows.sort(key=lambda r: (r["created_time"], r["comment_id"]))
    return rows


def main():
    rng = random.Random(SEED)
    ROOT.mkdir(exist_ok=True)
    with open(ROOT / "lexicon.tsv", "w", encoding="utf-8") as f:
        f.write("# Synthetic sentiment lexicon: phrase<TAB>score in [-1, 1].\n")
        for phrase, score in LEXICON:
            f.write(f"{phrase}\t{score}\n")
    with open(ROOT / "emoji.tsv", "w", encoding="utf-8") as f:
        f.write("# Emoji polarity for the synthetic corpus.\n")
        for e, s in EMOJI:
            f.write(f"{e}\t{s}\n")
    with open(ROOT / "corpus.jsonl", "w", encoding="utf-8") as f:
        for row in build_corpus(rng):
            f.write(json.dumps(row, ensure_ascii=False) + "\n")
    matrices = {
        "tbl_lexicon.json": [[128, 19, 35], [57, 83, 37], [37, 12, 90]],
        "tbl_vadar.json": [[24, 12, 156], [0, 15, 162], [1, 1, 137]],
    }
    for name, rows in matrices.items():
        with open(ROOT / name, "w", encoding="utf-8") as f:
            json.dump({"classes": ["Pos", "Neg", "Neu"], "rows": rows}, f)
            f.write("\n")
    planted = sorted(f"{PAGES[p % len(PAGES)]}_{p:04d}" for p in PLANTED)
    with open(ROOT / "planted_posts.txt", "w", encoding="utf-8") as f:
        f.write("\n".join(planted) + "\n")


if __name__ == "__main__":
    main()
