#!/usr/bin/env python3
"""Regenerate the starter language packs under src/laser_eval/packs/.

The Indic fold rules implement a consonant-skeleton romanization: every
native-script character maps to a Latin chunk, the inherent vowel is not
emitted, written vowel signs are kept.  That makes fold keys comparable
across scripts while preserving the vowel-length distinctions the rubric
treats as minor spelling errors.  Lexical rules cover loanword spelling
groups that no character rule can merge.  The packs are an approximate,
versioned starter set; corpus owners are expected to extend them.
"""

from __future__ import annotations

from pathlib import Path

import yaml

OUT_DIR = Path(__file__).resolve().parent.parent / "src" / "laser_eval" / "packs"

DEVANAGARI = {
    # signs
    "्": "", "़": "", "ं": "n", "ँ": "n", "ः": "", "ऽ": "",
    # independent vowels
    "अ": "a", "आ": "aa", "इ": "i", "ई": "ii", "उ": "u", "ऊ": "uu",
    "ऋ": "ri", "ॠ": "rii", "ए": "e", "ऐ": "ai", "ओ": "o", "औ": "au",
    "ऍ": "e", "ऑ": "o", "ॐ": "om",
    # vowel signs
    "ा": "aa", "ि": "i", "ी": "ii", "ु": "u", "ू": "uu", "ृ": "ri",
    "े": "e", "ै": "ai", "ो": "o", "ौ": "au", "ॅ": "e", "ॉ": "o",
    # consonants
    "क": "k", "ख": "kh", "ग": "g", "घ": "gh", "ङ": "ng",
    "च": "ch", "छ": "chh", "ज": "j", "झ": "jh", "ञ": "ny",
    "ट": "t", "ठ": "th", "ड": "d", "ढ": "dh", "ण": "n",
    "त": "t", "थ": "th", "द": "d", "ध": "dh", "न": "n",
    "प": "p", "फ": "ph", "ब": "b", "भ": "bh", "म": "m",
    "य": "y", "र": "r", "ल": "l", "ळ": "l", "व": "v",
    "श": "sh", "ष": "sh", "स": "s", "ह": "h",
    # digits
    "०": "0", "१": "1", "२": "2", "३": "3", "४": "4",
    "५": "5", "६": "6", "७": "7", "८": "8", "९": "9",
}

KANNADA = {
    "್": "", "ಂ": "n", "ಃ": "",
    "ಅ": "a", "ಆ": "aa", "ಇ": "i", "ಈ": "ii", "ಉ": "u", "ಊ": "uu",
    "ಋ": "ri", "ಎ": "e", "ಏ": "e", "ಐ": "ai", "ಒ": "o", "ಓ": "o", "ಔ": "au",
    "ಾ": "aa", "ಿ": "i", "ೀ": "ii", "ು": "u", "ೂ": "uu", "ೃ": "ri",
    "ೆ": "e", "ೇ": "e", "ೈ": "ai", "ೊ": "o", "ೋ": "o", "ೌ": "au",
    "ಕ": "k", "ಖ": "kh", "ಗ": "g", "ಘ": "gh", "ಙ": "ng",
    "ಚ": "ch", "ಛ": "chh", "ಜ": "j", "ಝ": "jh", "ಞ": "ny",
    "ಟ": "t", "ಠ": "th", "ಡ": "d", "ಢ": "dh", "ಣ": "n",
    "ತ": "t", "ಥ": "th", "ದ": "d", "ಧ": "dh", "ನ": "n",
    "ಪ": "p", "ಫ": "ph", "ಬ": "b", "ಭ": "bh", "ಮ": "m",
    "ಯ": "y", "ರ": "r", "ಱ": "r", "ಲ": "l", "ಳ": "l",
    "ವ": "v", "ಶ": "sh", "ಷ": "sh", "ಸ": "s", "ಹ": "h",
    "೦": "0", "೧": "1", "೨": "2", "೩": "3", "೪": "4",
    "೫": "5", "೬": "6", "೭": "7", "೮": "8", "೯": "9",
}

MALAYALAM = {
    "്": "", "ം": "m", "ഃ": "",
    "അ": "a", "ആ": "aa", "ഇ": "i", "ഈ": "ii", "ഉ": "u", "ഊ": "uu",
    "ഋ": "ri", "എ": "e", "ഏ": "e", "ഐ": "ai", "ഒ": "o", "ഓ": "o", "ഔ": "au",
    "ാ": "aa", "ി": "i", "ീ": "ii", "ു": "u", "ൂ": "uu", "ൃ": "ri",
    "െ": "e", "േ": "e", "ൈ": "ai", "ൊ": "o", "ോ": "o", "ൌ": "au", "ൗ": "au",
    "ക": "k", "ഖ": "kh", "ഗ": "g", "ഘ": "gh", "ങ": "ng",
    "ച": "ch", "ഛ": "chh", "ജ": "j", "ഝ": "jh", "ഞ": "ny",
    "ട": "t", "ഠ": "th", "ഡ": "d", "ഢ": "dh", "ണ": "n",
    "ത": "t", "ഥ": "th", "ദ": "d", "ധ": "dh", "ന": "n",
    "പ": "p", "ഫ": "ph", "ബ": "b", "ഭ": "bh", "മ": "m",
    "യ": "y", "ര": "r", "റ": "r", "ല": "l", "ള": "l", "ഴ": "zh",
    "വ": "v", "ശ": "sh", "ഷ": "sh", "സ": "s", "ഹ": "h",
    # chillu letters
    "ൻ": "n", "ർ": "r", "ൽ": "l", "ൾ": "l", "ൺ": "n", "ൿ": "k",
    "൦": "0", "൧": "1", "൨": "2", "൩": "3", "൪": "4",
    "൫": "5", "൬": "6", "൭": "7", "൮": "8", "൯": "9",
}


def script_rules(table: dict[str, str]) -> list[dict]:
    import re as _re

    return [{"pattern": _re.escape(src), "repl": dst} for src, dst in table.items()]


# Shared Latin-side folds.  Word-final long vowels stay distinct on purpose:
# "ladki" vs "ladkee" must remain a minor spelling error, not fold-equal.
LATIN_COMMON = [
    {"pattern": "-", "repl": ""},
    {"pattern": "'", "repl": ""},
]

LATIN_INDIC = LATIN_COMMON + [
    {"pattern": "w", "repl": "v"},
    {"pattern": "aa", "repl": "a"},
    {"pattern": "ay", "repl": "ai"},
    {"pattern": "iy(?=[aeiou])", "repl": "i"},
    {"pattern": "ee(?!$)", "repl": "i"},
    {"pattern": "ii(?!$)", "repl": "i"},
]

# Loanword spelling groups (post-digraph forms on the left).
LOANWORDS_HI = [
    {"pattern": "^sk(?:oo|uu|u+)l$", "repl": "skul"},
    {"pattern": "^school$", "repl": "skul"},
    {"pattern": "^a?[ai]skr(?:ee|ii|e|i)m$", "repl": "aiskrim"},
    {"pattern": "^icecream$", "repl": "aiskrim"},
    {"pattern": "^ta?i+ms$", "repl": "taims"},
    {"pattern": "^times$", "repl": "taims"},
]

HI_NUMERALS = {
    "shunya": 0, "ek": 1, "do": 2, "teen": 3, "tin": 3, "char": 4, "chaar": 4,
    "panch": 5, "paanch": 5, "chhah": 6, "che": 6, "saat": 7, "sat": 7,
    "aath": 8, "ath": 8, "nau": 9, "das": 10, "dus": 10, "gyarah": 11,
    "barah": 12, "terah": 13, "chaudah": 14, "pandrah": 15, "solah": 16,
    "satrah": 17, "atharah": 18, "unnis": 19, "bees": 20, "tees": 30,
    "chalis": 40, "pachas": 50, "sath": 60, "sattar": 70, "assi": 80,
    "nabbe": 90,
    "शून्य": 0, "एक": 1, "दो": 2, "तीन": 3, "चार": 4, "पांच": 5, "पाँच": 5,
    "छह": 6, "सात": 7, "आठ": 8, "नौ": 9, "दस": 10, "ग्यारह": 11, "बारह": 12,
    "तेरह": 13, "चौदह": 14, "पंद्रह": 15, "सोलह": 16, "सत्रह": 17,
    "अठारह": 18, "उन्नीस": 19, "बीस": 20,
}

HI_MULTIPLIERS = {
    "sau": 100, "hajar": 1000, "hazar": 1000, "lakh": 100000, "crore": 10000000,
    "karod": 10000000, "सौ": 100, "हजार": 1000, "हज़ार": 1000, "लाख": 100000,
    "करोड़": 10000000,
}

HI_LETTER_NAMES = {
    "ay": "a", "e": "a", "bi": "b", "bee": "b", "si": "c", "see": "c",
    "di": "d", "dee": "d", "ii": "e", "ef": "f", "eph": "f", "ji": "g",
    "jee": "g", "ech": "h", "aych": "h", "aai": "i", "ai": "i", "je": "j",
    "jay": "j", "ke": "k", "kay": "k", "el": "l", "em": "m", "yum": "m",
    "en": "n", "o": "o", "oh": "o", "pi": "p", "pee": "p", "kyu": "q",
    "kyoo": "q", "aar": "r", "ar": "r", "es": "s", "ess": "s", "ti": "t",
    "tee": "t", "yu": "u", "yoo": "u", "vi": "v", "vee": "v", "dablyu": "w",
    "dabalyu": "w", "eks": "x", "eksa": "x", "vaay": "y", "vai": "y",
    "zed": "z", "jhed": "z",
}


def build_hi() -> dict:
    numerals: dict[str, dict] = {w: {"value": v} for w, v in HI_NUMERALS.items()}
    numerals.update({w: {"multiplier": v} for w, v in HI_MULTIPLIERS.items()})
    return {
        "lang": "hi",
        "version": 1,
        "numeral_lexicon": numerals,
        "letter_names": HI_LETTER_NAMES,
        "fold_rules": script_rules(DEVANAGARI) + LATIN_INDIC + LOANWORDS_HI,
        "minor_suffix_pairs": [
            ["n", ""], ["a", "i"], ["a", "o"], ["i", "o"], ["a", "e"],
            ["ne", ""], ["on", ""], ["ं", ""], ["ा", "ी"], ["ा", "ो"],
            ["ी", "ो"], ["े", ""], ["ों", ""], ["ें", ""],
        ],
        "colloquial_pairs": [
            ["yaha", "ye"], ["yahan", "yaha"], ["vaha", "vo"], ["vaha", "vah"],
            ["par", "pe"], ["kya", "kaa"], ["nahin", "nahi"],
            ["यह", "ये"], ["वह", "वो"], ["पर", "पे"], ["नहीं", "नही"],
        ],
        "similar_sound_graphemes": [
            ["i", "ee"], ["u", "oo"], ["i", "ii"], ["u", "uu"], ["e", "ai"],
            ["i", "e"], ["ि", "ी"], ["ु", "ू"], ["े", "ै"], ["o", "au"],
        ],
    }


def build_mr() -> dict:
    pack = build_hi()
    pack["lang"] = "mr"
    pack["numeral_lexicon"] = {
        **{w: {"value": v} for w, v in {
            "shunya": 0, "ek": 1, "don": 2, "teen": 3, "tin": 3, "char": 4,
            "pach": 5, "paach": 5, "saha": 6, "sah": 6, "sat": 7, "aath": 8,
            "nau": 9, "daha": 10, "akra": 11, "bara": 12, "tera": 13,
            "chauda": 14, "pandhra": 15, "vees": 20, "tees": 30,
            "एक": 1, "दोन": 2, "तीन": 3, "चार": 4, "पाच": 5, "सहा": 6,
            "सात": 7, "आठ": 8, "नऊ": 9, "दहा": 10, "तेरा": 13,
        }.items()},
        **{w: {"multiplier": v} for w, v in {
            "she": 100, "shambhar": 100, "hajar": 1000, "lakh": 100000,
            "शे": 100, "शंभर": 100, "हजार": 1000, "लाख": 100000,
        }.items()},
    }
    pack["colloquial_pairs"] = [
        ["kay", "ka"], ["ithe", "hithe"], ["tithe", "tithay"],
        ["ahe", "aahe"], ["काय", "का"], ["इथे", "हिथे"],
    ]
    pack["minor_suffix_pairs"] = pack["minor_suffix_pairs"] + [["", "t"], ["to", "te"]]
    return pack


def build_kn() -> dict:
    return {
        "lang": "kn",
        "version": 1,
        "numeral_lexicon": {
            **{w: {"value": v} for w, v in {
                "sonne": 0, "ondu": 1, "eradu": 2, "mooru": 3, "nalku": 4,
                "aidu": 5, "aaru": 6, "elu": 7, "entu": 8, "ombattu": 9,
                "hattu": 10,
            }.items()},
            **{w: {"multiplier": v} for w, v in {
                "nooru": 100, "savira": 1000, "laksha": 100000,
            }.items()},
        },
        "letter_names": {},
        "fold_rules": script_rules(KANNADA) + LATIN_INDIC,
        "minor_suffix_pairs": [["u", ""], ["a", "u"], ["ು", "ೂ"]],
        "colloquial_pairs": [],
        "similar_sound_graphemes": [
            ["i", "ee"], ["u", "oo"], ["i", "ii"], ["u", "uu"],
            ["ಿ", "ೀ"], ["ು", "ೂ"], ["ೆ", "ೇ"], ["ೊ", "ೋ"],
        ],
    }


def build_ml() -> dict:
    return {
        "lang": "ml",
        "version": 1,
        "numeral_lexicon": {
            **{w: {"value": v} for w, v in {
                "poojyam": 0, "onnu": 1, "randu": 2, "moonu": 3, "nalu": 4,
                "anchu": 5, "aaru": 6, "ezhu": 7, "ettu": 8, "onpatu": 9,
                "pattu": 10, "pathu": 10,
            }.items()},
            **{w: {"multiplier": v} for w, v in {
                "nooru": 100, "aayiram": 1000, "laksham": 100000,
            }.items()},
        },
        "letter_names": {},
        "fold_rules": script_rules(MALAYALAM) + LATIN_INDIC,
        "minor_suffix_pairs": [["u", ""], ["ം", ""]],
        "colloquial_pairs": [],
        "similar_sound_graphemes": [
            ["i", "ee"], ["u", "oo"], ["i", "ii"], ["u", "uu"],
            ["ി", "ീ"], ["ു", "ൂ"], ["െ", "േ"], ["ൊ", "ോ"],
        ],
    }


EN_NUMERALS = {
    "zero": 0, "one": 1, "two": 2, "three": 3, "four": 4, "five": 5,
    "six": 6, "seven": 7, "eight": 8, "nine": 9, "ten": 10, "eleven": 11,
    "twelve": 12, "thirteen": 13, "fourteen": 14, "fifteen": 15,
    "sixteen": 16, "seventeen": 17, "eighteen": 18, "nineteen": 19,
    "twenty": 20, "thirty": 30, "forty": 40, "fifty": 50, "sixty": 60,
    "seventy": 70, "eighty": 80, "ninety": 90,
}


def build_en() -> dict:
    return {
        "lang": "en",
        "version": 1,
        "numeral_lexicon": {
            **{w: {"value": v} for w, v in EN_NUMERALS.items()},
            "hundred": {"multiplier": 100},
            "thousand": {"multiplier": 1000},
            "million": {"multiplier": 1000000},
        },
        "letter_names": {
            "ay": "a", "bee": "b", "cee": "c", "see": "c", "dee": "d",
            "ee": "e", "ef": "f", "gee": "g", "aitch": "h", "eye": "i",
            "jay": "j", "kay": "k", "el": "l", "em": "m", "en": "n",
            "oh": "o", "pee": "p", "cue": "q", "are": "r", "ess": "s",
            "tee": "t", "you": "u", "vee": "v", "ex": "x", "why": "y",
            "zee": "z", "zed": "z",
        },
        "fold_rules": LATIN_COMMON + [
            {"pattern": "(?<=[a-z])our(?=[a-z])", "repl": "or"},
            {"pattern": "iy(?=[aeiou])", "repl": "i"},
            {"pattern": "(?<=[a-z])ise$", "repl": "ize"},
            {"pattern": "(?<=[a-z])isation$", "repl": "ization"},
        ],
        "minor_suffix_pairs": [
            ["", "s"], ["", "es"], ["", "d"], ["", "ed"], ["", "ing"],
        ],
        "colloquial_pairs": [
            ["though", "tho"], ["because", "cause"], ["until", "till"],
            ["okay", "ok"], ["you", "u"], ["dunno", "dont"],
        ],
        "similar_sound_graphemes": [
            ["i", "ee"], ["u", "oo"], ["i", "y"], ["o", "ou"], ["c", "k"],
            ["s", "z"],
        ],
    }


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    builders = {
        "hi": build_hi, "mr": build_mr, "kn": build_kn, "ml": build_ml,
        "en": build_en,
    }
    for lang, build in builders.items():
        doc = build()
        path = OUT_DIR / f"{lang}.yaml"
        header = (
            "# Starter language pack: approximate, versioned matching resources.\n"
            "# Regenerate with scripts/build_packs.py; extend per corpus as needed.\n"
        )
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(header)
            yaml.safe_dump(doc, fh, allow_unicode=True, sort_keys=False, width=100)
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
