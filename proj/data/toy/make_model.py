#!/usr/bin/env python3
"""Regenerates model.txt from the hand dictionary below and the bigram
counts of corpus.en.

    python3 make_model.py > model.txt
"""

from collections import Counter, defaultdict
from pathlib import Path

LAMBDA = 0.3
ALPHA = 0.1

# Spanish word -> English candidates with relative weights.
DICTIONARY = {
    "la": {"the": 8, "it": 1},
    "el": {"the": 8, "he": 1},
    "los": {"the": 6, "those": 1},
    "casa": {"house": 4, "home": 2},
    "es": {"is": 5, "it": 1},
    "grande": {"big": 3, "large": 2, "great": 1},
    ".": {".": 1},
    "perro": {"dog": 1},
    "come": {"eats": 3, "eat": 1},
    "pan": {"bread": 1},
    "mi": {"my": 1},
    "hermano": {"brother": 1},
    "vive": {"lives": 3, "live": 1},
    "en": {"in": 5, "on": 2, "at": 1},
    "madrid": {"madrid": 1},
    "comisión": {"commission": 1},
    "aprueba": {"approves": 2, "adopts": 1},
    "informe": {"report": 1},
    "parlamento": {"parliament": 1},
    "debate": {"debates": 2, "debate": 1},
    "propuesta": {"proposal": 1},
    "hoy": {"today": 1},
    "nosotros": {"we": 1},
    "queremos": {"want": 3, "we": 1},
    "una": {"a": 4, "one": 1},
    "un": {"a": 4, "one": 1},
    "respuesta": {"answer": 2, "response": 1},
    "clara": {"clear": 1},
    "presidente": {"president": 3, "chairman": 1},
    "abre": {"opens": 1},
    "sesión": {"sitting": 2, "session": 2},
    "reunión": {"meeting": 1},
    "termina": {"ends": 2, "finishes": 1},
    "a": {"at": 2, "to": 2, "in": 1},
    "las": {"the": 2, "o'clock": 1},
    "cinco": {"five": 1},
    "ciudadanos": {"citizens": 1},
    "esperan": {"expect": 2, "wait": 1},
    "resultados": {"results": 1},
    "concretos": {"concrete": 1},
    "gato": {"cat": 1},
    "duerme": {"sleeps": 1},
    "madre": {"mother": 1},
    "compra": {"buys": 2, "purchase": 1},
    "fruta": {"fruit": 1},
    "fresca": {"fresh": 1},
    "tiene": {"has": 3, "have": 1},
    "problema": {"problem": 1},
    "grave": {"serious": 2, "grave": 1},
    "consejo": {"council": 2, "advice": 1},
    "no": {"not": 2, "no": 1, "does": 1},
    "acepta": {"accept": 2, "accepts": 1},
    "hablamos": {"talking": 1, "we": 1, "are": 1, "speak": 1},
    "de": {"about": 2, "of": 3},
    "política": {"policy": 2, "politics": 1},
    "agrícola": {"agricultural": 1},
    "tren": {"train": 1},
    "llega": {"arrives": 2, "comes": 1},
    "tarde": {"late": 3, "afternoon": 1},
    "debe": {"must": 2, "should": 1},
    "presentar": {"present": 2, "submit": 1},
    "nueva": {"new": 1},
    "niños": {"children": 1},
    "juegan": {"play": 1},
    "parque": {"park": 1},
    "contiene": {"contains": 1},
    "muchos": {"many": 1},
    "errores": {"mistakes": 2, "errors": 2},
    "se": {"is": 1, "itself": 1},
    "suspende": {"suspended": 2, "suspends": 1},
    "gracias": {"thank": 1, "you": 1, "thanks": 1},
    "señor": {"mr": 2, "sir": 1},
}


def fmt(x: float) -> str:
    return repr(x)


def main() -> None:
    here = Path(__file__).resolve().parent
    bigrams = defaultdict(Counter)
    for line in (here / "corpus.en").read_text(encoding="utf-8").splitlines():
        words = ["<s>"] + line.split() + ["</s>"]
        for prev, nxt in zip(words, words[1:]):
            bigrams[prev][nxt] += 1

    print("# Toy es-en model: hand dictionary plus reference bigram counts.")
    print("# Generated by make_model.py; edit the script, not this file.")
    print("[params]")
    print(f"lambda={LAMBDA}")
    print(f"alpha={ALPHA}")
    print()
    print("[lex]")
    for src in sorted(DICTIONARY):
        row = DICTIONARY[src]
        total = sum(row.values())
        for tgt in sorted(row):
            print(src, tgt, fmt(row[tgt] / total))
    print()
    print("[bigram]")
    for prev in sorted(bigrams):
        row = bigrams[prev]
        total = sum(row.values())
        for nxt in sorted(row):
            print(prev, nxt, fmt(row[nxt] / total))


if __name__ == "__main__":
    main()
