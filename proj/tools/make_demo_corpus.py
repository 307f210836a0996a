#!/usr/bin/env python3
# Copyright (C) 2026 The Standardize Authors
# SPDX-License-Identifier: Apache-2.0
"""Generate the small synthetic labeled corpora under data/demo/.

The stories come from a seeded clause grammar. Higher levels draw from
later vocabulary tiers, use longer sentences and join more clauses, so the
per-level profiles separate the way real graded corpora do. The output is
for demos and tests only.
"""

import argparse
import json
import random
from pathlib import Path

NOUNS = [
    "dog cat ball house tree book boy girl bird car door cup fish cake sun water bed hat baby apple",
    "garden river school window forest village market street road teacher farmer family story kitchen horse table friend flower boat picture",
    "journey island mountain castle problem answer sailor captain festival secret danger museum harbor season library lantern bridge message neighbour crowd storm",
    "treasure merchant voyage shadow mystery silence promise courage memory reason history fortune legend century",
    "hypothesis philosophy perspective consequence paradox scrutiny rhetoric solitude labyrinth melancholy",
]
ADJECTIVES = [
    "big happy red small sad bad hot good",
    "little old new cold warm quiet",
    "careful gentle strange distant curious",
    "ancient difficult ordinary enormous",
    "ambiguous reluctant meticulous ephemeral inevitable profound elaborate eloquent benevolent ominous",
]
VERBS = [
    "saw liked had wanted took",
    "found followed visited helped carried",
    "remembered discovered explained watched",
    "considered protected questioned described",
    "contemplated scrutinized abandoned illuminated",
]
PREPOSITIONS = "in near under behind across beyond".split()
NAMES = "Anna Tom Lucy Ben Mia Sam Leo Rosa Omar Ivy".split()
JOINERS = ["and", "because", "but"]

LEVELS = {
    # tier weights, adjective p, prepositional-phrase p, clauses per sentence, sentences, name p
    "A2": ([0.70, 0.30, 0.00, 0.00, 0.00], 0.25, 0.15, (1, 2), (6, 14), 0.20),
    "B1": ([0.40, 0.40, 0.20, 0.00, 0.00], 0.35, 0.30, (1, 2), (7, 15), 0.25),
    "B2": ([0.20, 0.35, 0.35, 0.10, 0.00], 0.45, 0.45, (1, 3), (7, 15), 0.30),
    "C1": ([0.10, 0.25, 0.35, 0.25, 0.05], 0.55, 0.55, (1, 3), (8, 14), 0.35),
    "C2": ([0.05, 0.15, 0.30, 0.30, 0.20], 0.65, 0.65, (2, 3), (8, 14), 0.40),
}
CCS_LEVELS = {"grade4-8": LEVELS["B1"], "grade9-12": LEVELS["C1"]}


def pick(rng, tiers, weights):
    tier = rng.choices(range(len(tiers)), weights=weights)[0]
    return rng.choice(tiers[tier].split())


def noun_phrase(rng, cfg, allow_name):
    weights, adj_p, _, _, _, name_p = cfg
    if allow_name and rng.random() < name_p:
        return [rng.choice(NAMES)]
    words = ["the"]
    if rng.random() < adj_p:
        words.append(pick(rng, ADJECTIVES, weights))
    words.append(pick(rng, NOUNS, weights))
    return words


def clause(rng, cfg):
    weights, _, prep_p, _, _, _ = cfg
    words = noun_phrase(rng, cfg, True) + [pick(rng, VERBS, weights)] + noun_phrase(rng, cfg, True)
    if rng.random() < prep_p:
        words += [rng.choice(PREPOSITIONS)] + noun_phrase(rng, cfg, False)
    return words


def sentence(rng, cfg, joiner_weights):
    lo, hi = cfg[3]
    words = clause(rng, cfg)
    for _ in range(rng.randint(lo, hi) - 1):
        joiner = rng.choices(JOINERS, weights=joiner_weights)[0]
        words += [joiner] + clause(rng, cfg)
    words[0] = words[0][0].upper() + words[0][1:]
    return " ".join(words) + "."


def story(rng, cfg):
    # Each story gets its own naming and joining habits so levels overlap
    # the way real graded texts do.
    weights, adj_p, prep_p, clauses, sentences, name_p = cfg
    cfg = (weights, adj_p, prep_p, clauses, sentences, min(0.9, name_p * rng.uniform(0.2, 2.0)))
    joiner_weights = [rng.uniform(0.1, 1.0), rng.uniform(0.0, 1.0), rng.uniform(0.0, 0.4)]
    lo, hi = sentences
    return " ".join(sentence(rng, cfg, joiner_weights) for _ in range(rng.randint(lo, hi)))


def write_corpus(path, levels, per_level, seed):
    rng = random.Random(seed)
    rows = []
    for level, cfg in levels.items():
        for i in range(per_level):
            rows.append({"level": level, "text": story(rng, cfg), "source_id": f"{level}-{i + 1:02d}"})
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        for row in rows:
            f.write(json.dumps(row, ensure_ascii=False) + "\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data" / "demo")
    ap.add_argument("--per-level", type=int, default=10)
    ap.add_argument("--seed", type=int, default=20240601)
    args = ap.parse_args()
    write_corpus(args.out / "cefr_demo.jsonl", LEVELS, args.per_level, args.seed)
    write_corpus(args.out / "ccs_demo.jsonl", CCS_LEVELS, args.per_level, args.seed + 1)


if __name__ == "__main__":
    main()
