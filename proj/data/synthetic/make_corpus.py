#!/usr/bin/env python3
# Copyright 2026 The discex Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes the synthetic PDTB 2.0-style corpus under data/synthetic/pdtb.

The corpus is small enough to count by hand. Its sections follow the usual
split: 02-03 train, 00 dev, 21-22 test. Rerunning the script reproduces the
files byte for byte.
"""

import os

FIELDS = 48
TYPE, SECTION, FILE, CONN_SPAN, CONN_HEAD, CONN1 = 0, 1, 2, 3, 8, 9
SENSE1, SENSE2 = 11, 12
ARG1_SPAN, ARG1, ARG2_SPAN, ARG2 = 22, 24, 32, 34

# (kind, connective, senses, arg1, arg2, order)
# order "canonical" is arg1 conn arg2; "fronted" is conn arg2, arg1.
DOCS = {
    ("02", "wsj_0201"): [
        ("Explicit", "because", ["Contingency.Cause.Reason"],
         "The plant closed early", "demand for steel fell sharply."),
        ("Explicit", "because", ["Contingency.Cause.Reason"],
         "Shares of the bank rose", "profits beat forecasts."),
        ("Explicit", "because", ["Contingency.Cause.Reason"],
         "The vote was delayed", "two members were absent."),
        ("Explicit", "so", ["Contingency.Cause.Result"],
         "Interest rates climbed", "mortgage applications dropped."),
        ("Explicit", "so", ["Contingency.Cause.Result"],
         "The shipment arrived late", "the store missed the holiday rush."),
        ("Explicit", "but", ["Comparison.Contrast"],
         "Sales rose in Europe", "they slipped in Asia."),
        ("Explicit", "but", ["Comparison.Contrast"],
         "The old model was cheap", "the new one is costly."),
        ("Explicit", "but", ["Comparison.Concession.Contra-expectation"],
         "The company cut prices", "revenue still declined."),
        ("EntRel", "", ["EntRel"],
         "The firm is based in Ohio.", "It employs 300 people."),
        ("Explicit", "because", ["Contingency.Cause.Reason"],
         "investors were nervous", "Trading was thin",
         "fronted"),
    ],
    ("03", "wsj_0301"): [
        ("Explicit", "and", ["Expansion.Conjunction"],
         "The mill makes paper", "it sells packaging."),
        ("Explicit", "and", ["Expansion.Conjunction"],
         "Prices were stable", "volume was steady."),
        ("Explicit", "and",
         ["Expansion.Conjunction", "Temporal.Asynchronous.Precedence"],
         "The board met on Monday", "it approved the merger."),
        ("Explicit", "when", ["Temporal.Synchrony"],
         "Analysts cheered", "the results came out."),
        ("Explicit", "when", ["Contingency.Condition.Hypothetical"],
         "Costs fall", "margins improve."),
        ("Explicit", "then", ["Temporal.Asynchronous.Precedence"],
         "The union voted first", "management responded."),
        ("Explicit", "instead",
         ["Expansion.Alternative.Chosen alternative"],
         "The city did not raise taxes", "it cut services."),
        ("Explicit", "indeed", ["Expansion.Restatement.Specification"],
         "The quarter was weak", "earnings fell by half."),
        ("NoRel", "", ["NoRel"],
         "The weather was mild.", "Bond prices were mixed."),
        ("Explicit", "although", ["Comparison.Concession.Expectation"],
         "the market kept rising", "rates went up",
         "fronted"),
    ],
    ("00", "wsj_0001"): [
        ("Explicit", "but", ["Comparison.Contrast"],
         "Exports grew", "imports shrank."),
        ("Explicit", "and", ["Expansion.List"],
         "The plan adds jobs", "it trims debt."),
        ("Implicit", "because", ["Contingency.Cause.Reason"],
         "The deal collapsed.", "Financing dried up."),
    ],
    ("21", "wsj_2101"): [
        ("Implicit", "because", ["Contingency.Cause.Reason"],
         "The airline cancelled flights.", "Fuel ran short."),
        ("Implicit", "so", ["Contingency.Cause.Result"],
         "The chip was delayed.", "The phone launch slipped."),
        ("Implicit", "in addition", ["Expansion.Conjunction"],
         "The bank raised fees.", "It closed ten branches."),
        ("Implicit", "and", ["Expansion.Conjunction"],
         "Oil prices rose.", "Gas prices followed."),
        ("Implicit", "however", ["Comparison.Contrast"],
         "Retail sales were strong.", "Factory orders were weak."),
        ("Implicit", "for example", ["Expansion.Instantiation"],
         "Some stocks soared.", "Apple gained eight percent."),
        ("Explicit", "but", ["Comparison.Contrast"],
         "Bonds rallied", "stocks fell."),
        ("EntRel", "", ["EntRel"],
         "The report came out Friday.", "It runs 40 pages."),
    ],
    ("22", "wsj_2201"): [
        ("Implicit", "then", ["Temporal.Asynchronous.Precedence"],
         "The court heard arguments.", "It adjourned."),
        ("Implicit", "specifically",
         ["Expansion.Restatement.Specification", "Contingency.Cause.Result"],
         "The firm restructured.", "It sold its printing unit."),
        ("Implicit", "if", ["Contingency.Condition.Hypothetical"],
         "Rates drop.", "Builders will benefit."),
        ("Implicit", "meanwhile", ["Temporal.Synchrony"],
         "Talks continued in Tokyo.", "Markets waited."),
        ("Implicit", "and", ["Expansion.List"],
         "The fund owns bonds.", "It holds some gold."),
        ("Implicit", "but", ["Comparison.Concession.Contra-expectation"],
         "Unemployment fell.", "Wages did not rise."),
    ],
}


def span(begin, text):
    return (begin, begin + len(text))


def record(section, file_id, kind, conn, senses, arg1, arg2, order, pos):
    """Returns (pipe line, raw text of the record, new position)."""
    fields = [""] * FIELDS
    fields[TYPE] = kind
    fields[SECTION] = section
    fields[FILE] = file_id[-2:]
    if kind == "Explicit" and order == "fronted":
        # "Because arg2, arg1."
        head = conn.capitalize()
        c = span(pos, head)
        a2 = span(c[1] + 1, arg2)
        a1 = span(a2[1] + 2, arg1)
        raw = f"{head} {arg2}, {arg1}. "
    elif kind == "Explicit":
        a1 = span(pos, arg1)
        c = span(a1[1] + 2, conn)
        a2 = span(c[1] + 1, arg2)
        raw = f"{arg1}, {conn} {arg2} "
    else:
        c = None
        a1 = span(pos, arg1)
        a2 = span(a1[1] + 1, arg2)
        raw = f"{arg1} {arg2} "
    if c is not None:
        fields[CONN_SPAN] = f"{c[0]}..{c[1]}"
        fields[CONN_HEAD] = conn
    if kind == "Implicit":
        fields[CONN1] = conn
    fields[SENSE1] = senses[0] if kind in ("Explicit", "Implicit") else ""
    if len(senses) > 1:
        fields[SENSE2] = senses[1]
    fields[ARG1_SPAN] = f"{a1[0]}..{a1[1]}"
    fields[ARG1] = arg1
    fields[ARG2_SPAN] = f"{a2[0]}..{a2[1]}"
    fields[ARG2] = arg2
    return "|".join(fields), raw, pos + len(raw)


def main():
    here = os.path.dirname(os.path.abspath(__file__))
    for (section, file_id), rels in DOCS.items():
        out_dir = os.path.join(here, "pdtb", section)
        os.makedirs(out_dir, exist_ok=True)
        lines, raw_text, pos = [], "", 0
        for rel in rels:
            kind, conn, senses, arg1, arg2 = rel[:5]
            order = rel[5] if len(rel) > 5 else "canonical"
            line, raw, pos = record(section, file_id, kind, conn, senses,
                                    arg1, arg2, order, pos)
            lines.append(line)
            raw_text += raw
        with open(os.path.join(out_dir, file_id + ".pipe"), "w",
                  encoding="utf-8", newline="\n") as f:
            f.write("\n".join(lines) + "\n")
        with open(os.path.join(out_dir, file_id + ".txt"), "w",
                  encoding="utf-8", newline="\n") as f:
            f.write(raw_text)


if __name__ == "__main__":
    main()
