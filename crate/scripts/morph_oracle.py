#!/usr/bin/env python3
"""Round-trips generated word forms through the zeyrek analyzer.

Each request is generated with `serbest morph`; the surface form is analyzed
and accepted when some analysis has the requested lemma and every requested
tag. Writes crates/core/tests/fixtures/morph_oracle.tsv.

    pip install zeyrek
    python3 scripts/morph_oracle.py
"""

import subprocess
import sys
from pathlib import Path

import zeyrek

# zeyrek tokenizes with nltk's punkt; single words need no tokenizer.
sys.modules[zeyrek.MorphAnalyzer.__module__]._tokenize_text = lambda t: t.split()

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "crates/core/tests/fixtures/morph_oracle.tsv"

REQUESTS = """
kitap+ACC bırak+PAST+A3SG git+PAST+A3SG gör+NEG+PAST+A1SG otobüs+INS Ayşe+GEN
bitir+INF-MA+P1PL+ACC gel+INF-IS+P3SG+ACC gel+INF-MA+P3SG ev+ABL okul+DAT masa+LOC
dakika+LOC masa+P3SG kitap+P1SG ben+GEN biz+GEN bura+DAT iş+ACC kolaylaştır+PAST+A3SG
Ali+GEN Ahmet+DAT İstanbul+LOC Ankara+ABL
kitap+PL kitap+PL+LOC ev+PL+ABL masa+PL+P3SG+ACC okul+P1SG+DAT ev+P1PL+LOC
çocuk+ACC çocuk+P3SG+DAT ağaç+GEN renk+ACC kapak+P3SG saat+DAT saat+LOC
oğul+P3SG şehir+ACC kalem+INS araba+INS araba+GEN masa+GEN ev+P2SG+ABL
okul+P3SG+LOC kitap+P3SG+ABL ev+P3PL+ACC
gel+PROG+A3SG gel+FUT+A1SG git+FUT+A3SG git+PROG+A1PL oku+PROG+A3SG bekle+PROG+A3SG
yaz+PAST+A1PL gör+PAST+A2SG bil+NEG+PROG+A3SG gel+NEG+FUT+A3SG yap+NEC+A3SG
gel+COND+A1SG oku+PAST+A3PL bırak+PROG+PAST+A3SG gör+ABIL+PAST+A3SG
yaz+PASS+PAST+A3SG oku+INF-MA+ACC git+INF-IS+P3SG yap+INF-MA+P1SG+DAT
""".split()

TAGS = {
    "PL": "A3pl", "P1SG": "P1sg", "P2SG": "P2sg", "P3SG": "P3sg", "P1PL": "P1pl",
    "P2PL": "P2pl", "P3PL": "P3pl", "ACC": "Acc", "DAT": "Dat", "LOC": "Loc",
    "ABL": "Abl", "GEN": "Gen", "INS": "Ins", "NEG": "Neg", "PAST": "Past",
    "PROG": "Prog1", "FUT": "Fut", "AOR": "Aor", "NEC": "Neces", "OPT": "Opt",
    "COND": "Cond", "IMP": "Imp", "ABIL": "Able", "PASS": "Pass", "CAUS": "Caus",
    "INF-MA": "Inf2", "INF-IS": "Inf3", "A1SG": "A1sg", "A2SG": "A2sg",
    "A3SG": "A3sg", "A1PL": "A1pl", "A2PL": "A2pl", "A3PL": "A3pl",
}


def lemma_matches(parse, root):
    """Verb lemmas carry the -mAk citation suffix; a derived root such as
    kolaylaştır is analyzed from its base (kolay) plus derivations."""
    lemma = parse.lemma.lower()
    root = root.lower()
    if lemma.endswith(("mek", "mak")) and not root.endswith(("mek", "mak")):
        lemma = lemma[:-3]
    if lemma == root:
        return True
    derived = {"Become", "Caus", "Acquire"} & set(parse.morphemes)
    return bool(derived) and root.startswith(lemma)


def main():
    subprocess.run(["cargo", "build", "-q", "-p", "serbest-cli"], cwd=ROOT, check=True)
    binary = ROOT / "target/debug/serbest"
    surfaces = [
        subprocess.run([binary, "morph", r], check=True, capture_output=True, text=True).stdout.strip()
        for r in REQUESTS
    ]
    analyzer = zeyrek.MorphAnalyzer()
    rows = []
    for req, surface in zip(REQUESTS, surfaces):
        root, *tags = req.split("+")
        wanted = {TAGS[t] for t in tags}
        if "Cond" in wanted:
            # zeyrek files the -sA wish forms with person endings as Desr.
            wanted = {"Desr" if w == "Cond" else w for w in wanted}
        if wanted >= {"Fut", "A3sg"}:
            # Bare third-singular futures are only offered as FutPart.
            wanted = (wanted - {"Fut", "A3sg"}) | {"FutPart"}
        verdict = "rejected"
        matched = "-"
        parses = analyzer.analyze(surface)[0]
        if all(p.lemma == "Unk" for p in parses):
            # The analyzer sometimes loses words after earlier lookups; a
            # fresh instance is authoritative.
            parses = zeyrek.MorphAnalyzer().analyze(surface)[0]
        if "--debug" in sys.argv:
            print(req, surface, [(p.lemma, p.morphemes) for p in parses], file=sys.stderr)
        for p in parses:
            if p.lemma == "Unk":
                continue
            if lemma_matches(p, root) and wanted <= set(p.morphemes):
                verdict, matched = "accepted", "+".join(p.morphemes)
                break
        rows.append(f"{req}\t{surface}\t{verdict}\t{matched}")
    OUT.write_text("# request\tsurface\tverdict\tanalysis\n" + "\n".join(rows) + "\n", encoding="utf-8")
    rejected = [r for r in rows if "\trejected\t" in r]
    print(f"{len(rows) - len(rejected)} accepted, {len(rejected)} rejected")
    for r in rejected:
        print(r)


if __name__ == "__main__":
    main()
