"""Regenerate the JSONL fixtures in this directory.

Run from the repository root: ``python3 tests/data/generate_fixtures.py``.
The output is deterministic; the checked-in files are its output.
"""

from __future__ import annotations

import json
from pathlib import Path

HERE = Path(__file__).parent

STATES = ["texas", "ohio", "utah", "iowa", "maine", "idaho", "nevada", "oregon", "alaska", "kansas"]


def overfit_rows():
    templates = [
        ("which states border {s}", "(lambda $0 e (and (state:t $0) (next_to:t $0 {s}:s)))"),
        ("what is the capital of {s}", "(capital:c {s}:s)"),
        ("how many rivers are in {s}", "(count $0 (and (river:t $0) (loc:t $0 {s}:s)))"),
        ("what is the largest city in {s}", "(argmax $0 (and (city:t $0) (loc:t $0 {s}:s)) (size:i $0))"),
        ("which cities in {s} are not capitals",
         "(lambda $0 e (and (city:t $0) (loc:t $0 {s}:s) (not (capital:t $0))))"),
    ]
    return [{"utterance": u.format(s=s), "mr": m.format(s=s)} for s in STATES for u, m in templates]


def copy_rows():
    templates = [
        ("cities with population above {n}", "(lambda $0 e (and (city:t $0) (> (population:i $0) {n})))"),
        ("rivers longer than {n}", "(lambda $0 e (and (river:t $0) (> (len:i $0) {n})))"),
        ("states with area below {n}", "(lambda $0 e (and (state:t $0) (< (area:i $0) {n})))"),
    ]
    rows = []
    for i in range(30):
        u, m = templates[i % 3]
        n = 1000 + 37 * i * i + 11 * i
        rows.append({"utterance": u.format(n=n), "mr": m.format(n=n)})
    return rows


TABLES = [
    (["Player", "No.", "Nationality", "Position", "Years in Toronto", "School/Club Team"], [
        ["Calvin Mccarty", "5", "United States", "Forward", "1990", "Kansas"],
        ["Jose Garcia", "12", "Spain", "Guard", "1995", "Madrid"],
        ["Tom Hill", "33", "United States", "Center", "1998", "Duke"],
    ]),
    (["Country", "Capital", "Population"], [
        ["France", "Paris", "67"],
        ["Japan", "Tokyo", "125"],
        ["Peru", "Lima", "33"],
    ]),
    (["Team", "Wins", "Losses", "Coach"], [
        ["Hawks", "10", "4", "Smith"],
        ["Bears", "7", "7", "Jones"],
        ["Owls", "3", "11", "Brown"],
    ]),
    (["Song", "Artist", "Year", "Weeks", "Label"], [
        ["Blue Sky", "Ana Lee", "2001", "12", "Sunset"],
        ["Red Door", "The Keys", "2003", "4", "Harbor"],
        ["Gold Rush", "Ana Lee", "2005", "9", "Sunset"],
    ]),
]

SQL_QUERIES = [
    (0, "what position did calvin mccarty play", "SELECT Position FROM Table WHERE Player = Calvin Mccarty"),
    (0, "which player wears number 12", "SELECT Player FROM Table WHERE No. = 12"),
    (0, "how many players are from the united states", "SELECT COUNT(Player) FROM Table WHERE Nationality = United States"),
    (0, "what school did tom hill attend", "SELECT School/Club Team FROM Table WHERE Player = Tom Hill"),
    (0, "highest number among guards", "SELECT MAX(No.) FROM Table WHERE Position = Guard"),
    (0, "who played in toronto after 1991", "SELECT Player FROM Table WHERE Years in Toronto > 1991"),
    (1, "what is the capital of japan", "SELECT Capital FROM Table WHERE Country = Japan"),
    (1, "which country has capital lima", "SELECT Country FROM Table WHERE Capital = Lima"),
    (1, "total population of all countries", "SELECT SUM(Population) FROM Table"),
    (1, "countries with population below 50", "SELECT Country FROM Table WHERE Population < 50"),
    (1, "average population", "SELECT AVG(Population) FROM Table"),
    (2, "how many wins do the hawks have", "SELECT Wins FROM Table WHERE Team = Hawks"),
    (2, "who coaches the owls", "SELECT Coach FROM Table WHERE Team = Owls"),
    (2, "fewest losses of any team", "SELECT MIN(Losses) FROM Table"),
    (2, "teams with more than 5 wins and fewer than 10 losses",
     "SELECT Team FROM Table WHERE Wins > 5 AND Losses < 10"),
    (3, "who sang red door", "SELECT Artist FROM Table WHERE Song = Red Door"),
    (3, "how many songs by ana lee", "SELECT COUNT(Song) FROM Table WHERE Artist = Ana Lee"),
    (3, "longest chart run on sunset", "SELECT MAX(Weeks) FROM Table WHERE Label = Sunset"),
    (3, "songs released before 2004 on sunset", "SELECT Song FROM Table WHERE Year < 2004 AND Label = Sunset"),
    (3, "what label released gold rush", "SELECT Label FROM Table WHERE Song = Gold Rush"),
]


def sql_rows():
    out = []
    for t, utt, mr in SQL_QUERIES:
        cols, rows = TABLES[t]
        out.append({"utterance": utt, "mr": mr, "table": {"columns": cols, "rows": rows}})
    return out


def write(name, rows):
    with (HERE / name).open("w", encoding="utf-8") as fh:
        for r in rows:
            fh.write(json.dumps(r) + "\n")


if __name__ == "__main__":
    write("lambda_overfit.jsonl", overfit_rows())
    write("lambda_copy.jsonl", copy_rows())
    write("wikisql_fixture.jsonl", sql_rows())
