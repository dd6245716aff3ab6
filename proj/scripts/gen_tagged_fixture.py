#!/usr/bin/env python3
"""Regenerates data/tagged_fixture.tsv, the bundled POS-tagged corpus used to
train and regression-test the perceptron tagger. Template-generated English
with a fixed lexicon; a handful of words are deliberately tag-ambiguous
(play NN/VB/VBP, walks NNS/VBZ, watch NN/VB, her PRP/PRP$) so held-out
accuracy actually exercises the contextual features."""

import random

LEX = {
    "NNP": ["John", "Mary", "Tom", "Sarah", "Anna", "Bill", "Emma", "Jake",
            "Lily", "Mark", "Kate", "Sam"],
    "NN": ["dog", "cat", "store", "cake", "game", "car", "book", "park",
           "song", "teacher", "friend", "house", "movie", "garden", "team",
           "play", "watch", "dinner", "school", "beach", "exam", "prize",
           "kitchen", "puzzle", "ticket", "letter"],
    "NNS": ["dogs", "cats", "books", "games", "friends", "cookies", "walks",
            "kids", "songs", "flowers", "shoes", "plans"],
    "VBD": ["walked", "played", "baked", "watched", "visited", "liked",
            "wanted", "found", "made", "saw", "told", "gave", "chased",
            "bought", "cheered", "felt", "kept", "thanked", "missed",
            "cleaned", "painted", "fixed"],
    "VBZ": ["walks", "plays", "likes", "wants", "sees", "makes", "looks",
            "cooks", "reads", "sings"],
    "VB": ["walk", "play", "bake", "go", "see", "win", "read", "watch",
           "visit", "help", "clean", "fix"],
    "VBP": ["play", "read", "sing", "laugh", "smile", "run"],
    "VBG": ["running", "playing", "baking", "singing", "reading", "smiling"],
    "JJ": ["happy", "sad", "big", "small", "red", "new", "old", "tired",
           "fun", "proud", "sunny", "quiet"],
    "RB": ["quickly", "slowly", "very", "really", "always", "never",
           "outside", "today", "loudly", "early"],
    "IN": ["in", "on", "at", "with", "from", "for", "about", "after",
           "before", "near"],
    "DT": ["the", "a", "this", "that", "every"],
    "PRP_S": ["He", "She", "They", "We", "I"],
    "PRP_O": ["him", "her", "them", "us", "me"],
    "PRP$": ["his", "her", "their", "my", "our"],
    "CC": ["and", "but", "or"],
    "MD": ["will", "would", "could", "can"],
}

# Slot syntax: CATEGORY or literal word/TAG.
TEMPLATES = [
    "NNP VBD DT JJ NN .",
    "DT NN VBZ RB .",
    "PRP_S VBD to/TO VB DT NN .",
    "NNP CC NNP VBD IN DT NN .",
    "PRP_S MD VB PRP$ NN RB .",
    "DT JJ NNS VBD .",
    "NNP VBZ DT NN .",
    "PRP_S VBD PRP_O IN DT NN .",
    "IN DT NN ,/, DT NN VBD .",
    "NNP VBD RB JJ .",
    "PRP_S VBD VBG IN DT NN .",
    "DT NN IN DT NN VBZ JJ .",
    "NNP VBD DT NN CC DT NN .",
    "There/EX VBD DT JJ NN IN DT NN .",
    "PRP_S VBZ to/TO VB IN DT NN .",
    "DT NNS VBP RB .",
    "NNP VBD IN VBG DT NN .",
    "PRP$ NN VBD DT NN .",
    "NNP VBD PRP_O .",
    "MD PRP_S VB DT NN ?/.",
    "NNP VBD DT JJ NN !/.",
    "PRP_S VBP JJ RB !/.",
    "DT NN CC DT NN VBD RB .",
    "NNP RB VBZ DT NN .",
    "PRP_S VBD DT JJ NN IN DT NN .",
    "NNP MD RB VB DT NN .",
]

CAT_TO_TAG = {"PRP_S": "PRP", "PRP_O": "PRP"}


def emit_sentence(rng, template):
    pairs = []
    for slot in template.split():
        if "/" in slot:
            word, tag = slot.split("/")
            pairs.append((word, tag))
        elif slot in LEX:
            word = rng.choice(LEX[slot])
            pairs.append((word, CAT_TO_TAG.get(slot, slot)))
        else:  # bare punctuation
            pairs.append((slot, slot))
    return pairs


def main():
    rng = random.Random(20240101)
    sentences = []
    tokens = 0
    while tokens < 5600:
        template = rng.choice(TEMPLATES)
        pairs = emit_sentence(rng, template)
        sentences.append(pairs)
        tokens += len(pairs)
    with open("data/tagged_fixture.tsv", "w", encoding="utf-8") as out:
        for pairs in sentences:
            for word, tag in pairs:
                out.write(f"{word}\t{tag}\n")
            out.write("\n")
    print(f"{len(sentences)} sentences, {tokens} tokens")


if __name__ == "__main__":
    main()
