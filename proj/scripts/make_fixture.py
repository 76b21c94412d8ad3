#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Generate the synthetic CSV fixtures under data/.

fixture.csv: 200 tweets in the id,label,tweet schema, roughly 15% label 1,
with quoting, embedded commas and newlines, URLs, mentions, hashtags and emoji.
toy_separable.csv: 32 short tweets whose label is decided by disjoint word sets.
"""
import csv
import random
from pathlib import Path

DATA = Path(__file__).resolve().parent.parent / "data"

NEUTRAL = ["coffee", "morning", "weekend", "sunset", "music", "garden", "train", "weather", "movie",
           "pizza", "beach", "festival", "library", "puppy", "concert", "recipe", "holiday", "soccer",
           "bakery", "mountain", "river", "project", "meeting", "birthday", "podcast", "sunrise"]
FRIENDLY = ["love", "great", "happy", "amazing", "thanks", "beautiful", "fun", "wonderful", "excited",
            "proud", "grateful", "awesome", "cheerful", "lovely"]
HOSTILE = ["idiot", "stupid", "pathetic", "loser", "trash", "disgusting", "hate", "moron", "worthless",
           "clown", "scum", "garbage"]
EMOJI = ["\U0001F600", "\U0001F525", "\U0001F44D", "\U0001F621", "❤️", "\U0001F389"]


def decorate(rng, words):
    text = " ".join(words)
    roll = rng.random()
    if roll < 0.15:
        text = "@user " + text
    elif roll < 0.25:
        text += " https://t.co/" + "".join(rng.choice("abcdefgh0123") for _ in range(8))
    if rng.random() < 0.2:
        text += " #" + rng.choice(NEUTRAL)
    if rng.random() < 0.15:
        text += " " + rng.choice(EMOJI)
    if rng.random() < 0.1:
        text = text.replace(" ", ", ", 1)
    if rng.random() < 0.05:
        text = 'she said "' + text + '"'
    if rng.random() < 0.03:
        text += "\nsecond line"
    if rng.random() < 0.1:
        text += " " + str(rng.randint(1, 2024))
    return text


def fixture():
    rng = random.Random(20240601)
    rows = []
    for i in range(1, 201):
        label = 1 if rng.random() < 0.15 else 0
        words = rng.sample(NEUTRAL, 3) + rng.sample(FRIENDLY, 1 if label else 2)
        if label:
            words += rng.sample(HOSTILE, 2)
        rng.shuffle(words)
        rows.append((str(i), str(label), decorate(rng, words)))
    return rows


def toy():
    rng = random.Random(42)
    rows = []
    for i in range(1, 33):
        label = i % 2
        pool = HOSTILE if label else FRIENDLY
        words = rng.sample(pool, 3) + rng.sample(NEUTRAL, 1)
        rng.shuffle(words)
        rows.append((str(i), str(label), " ".join(words)))
    return rows


def write(name, rows):
    with open(DATA / name, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["id", "label", "tweet"])
        w.writerows(rows)


if __name__ == "__main__":
    write("fixture.csv", fixture())
    write("toy_separable.csv", toy())
