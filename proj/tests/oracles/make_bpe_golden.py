#!/usr/bin/env python3
"""Generates the frozen BPE golden corpora and merge lists (run once, output committed)."""
import os
import random
import subprocess
import sys

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "..", "data", "bpe_golden")

DE = ("das parlament hat in diesem verfahren ja nur die möglichkeit der zustimmung oder "
      "ablehnung wir müssen über den bericht abstimmen kommission rat präsident frau herr "
      "änderungsantrag mitgliedstaaten europäischen union sitzung heute").split()
SV = ("så där ja in här jag vet inte vad du säger kom hit nu vi ses sen tack "
      "hej hur mår du bra förlåt älskar dig").split()
FI = ("muistakaa äly into ja itsehillintä en tiedä mitä sanot tule tänne nyt nähdään "
      "kiitos hei mitä kuuluu hyvää anteeksi rakastan sinua").split()
PUNCT = [".", ",", "!", "?", ":"]


def sentence(rng, lexicon):
    n = rng.randint(1, 12)
    words = [rng.choice(lexicon) for _ in range(n)]
    if rng.random() < 0.3:
        words[0] = words[0].capitalize()
    s = " ".join(words)
    if rng.random() < 0.7:
        s += " " + rng.choice(PUNCT) if rng.random() < 0.5 else rng.choice(PUNCT)
    return s


def write(name, lines):
    path = os.path.join(OUT, name + ".txt")
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for l in lines:
            f.write(l + "\n")
    return path


def main():
    os.makedirs(OUT, exist_ok=True)
    rng = random.Random(20260917)
    corpora = []
    corpora.append(("toy_low", ["low low low", "lower"], 30, 0))
    corpora.append(("de_1000", [sentence(rng, DE) for _ in range(1000)], 420, 1))
    corpora.append(("sv_500", [sentence(rng, SV) for _ in range(500)], 120, 0))
    corpora.append(("fi_800", [sentence(rng, FI) for _ in range(800)], 600, 1))
    mixed = []
    extras = ["naïve café", "日本語 テキスト", "emoji 😀 ok", "Ελληνικά κείμενο", "a  b   c", " lead", "trail "]
    for i in range(300):
        mixed.append(sentence(rng, DE + SV) if i % 3 else rng.choice(extras))
    corpora.append(("mixed_300", mixed, 360, 1))
    corpora.append(("repeat_chars", ["aaaa aaa aaaaaa", "abababab abab", "aaaa"], 40, 0))
    corpora.append(("long_word", ["x" * 5000 + "y" * 10, "xy" * 3000], 300, 1))
    # Script boundaries: punctuation glued to words, digits, Cyrillic next to
    # Latin, kana next to kanji, combining marks.
    script_words = ["word.", "слово,", "abcабв", "ひらがなカタカナ漢字", "ラーメン", "e\u0301te\u0301",
                    "\u0301x", "x1y2", "42.5", "¿qué?", "naïve", "Δέλτα!", "(paren)", "a-b-c"]
    scripts = [" ".join(rng.choice(script_words) for _ in range(rng.randint(1, 6))) for _ in range(200)]
    corpora.append(("scripts_200", scripts, 420, 1))
    for name, lines, target, fb in corpora:
        src = write(name, lines)
        dst = os.path.join(OUT, name + ".merges")
        subprocess.run([sys.executable, os.path.join(HERE, "bpe_bruteforce.py"),
                        src, str(target), str(fb), dst], check=True)
        with open(os.path.join(OUT, name + ".params"), "w") as f:
            f.write(f"{target}\t{fb}\n")


if __name__ == "__main__":
    main()
