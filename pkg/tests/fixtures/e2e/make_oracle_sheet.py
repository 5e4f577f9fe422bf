"""Regenerate oracle.json for the end-to-end fixture.

All inputs below are transcribed by hand from articles.jsonl / tweets.jsonl;
nothing is read from the fixture files or from pipeline outputs. Log terms
are ln(1 + retweets) and ln(1 + summed followers).

Per-article derivation (current year 2020):

  A01 cit 10, 2018 -> 5      tweets T01-T06, T37; senti terms ln5 + ln3 + ln13, m 7
                             users U01 120, U02 50, U03 max(100,104), U04 9, U05 300, U25 250 = 833
  A02 cit 3, 2019 -> 3       T07-T10, T40: ln4 + ln8 + ln2/3 + ln6, m 5; users 40+121+15+50+65 = 291
  A03 cit 7, 2020 -> 7       T11-T17: ln26 + ln4 + ln12 + ln2 + ln3, m 7; users 2003+7+60+9+33+0 = 2112
  A04 cit 12, 2017 -> 4      T18-T20: ln6/3 + ln16, m 3; users 300+41+500 = 841
  A05 no citations           T21-T22: ln4, m 2; users 10+15 = 25
  A06 cit 2, 2020 -> 2       T23-T27, T37: ln3 + ln7 + ln13, m 6; users 82+25+122+3+250 = 482
  A07 cit 0, 2018 -> 0       unmentioned
  A08 cit 20, 2016 -> 5      T28-T33: ln41 + ln4 + ln9 + ln3/3, m 6; users 5010+70+12+400+90 = 5582
  A09 cit 5, 2019 -> 5       unmentioned
  A10 cit 1, 2020 -> 1       T34-T36: ln5, m 3; users 45+18+26 = 89

Run from this directory: python make_oracle_sheet.py
"""

import json
import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[2]))
from oracle import pearson_and_p  # noqa: E402

ln = math.log


def fmt(x):
    if x is None:
        return "NA"
    if isinstance(x, int):
        return str(x)
    return f"{(0.0 if x == 0 else x):.6g}"


def stars(p):
    return "***" if p <= 0.001 else "*" if p <= 0.05 else "ns"


ids = ["A01", "A02", "A03", "A04", "A05", "A06", "A07", "A08", "A09", "A10"]
academic = {"A01": 5.0, "A02": 3.0, "A03": 7.0, "A04": 4.0, "A05": None,
            "A06": 2.0, "A07": 0.0, "A08": 5.0, "A09": 5.0, "A10": 1.0}
senti_sum = {
    "A01": ln(5) + ln(3) + ln(13), "A02": ln(4) + ln(8) + ln(2) / 3 + ln(6),
    "A03": ln(26) + ln(4) + ln(12) + ln(2) + ln(3), "A04": ln(6) / 3 + ln(16),
    "A05": ln(4), "A06": ln(3) + ln(7) + ln(13), "A07": 0.0,
    "A08": ln(41) + ln(4) + ln(9) + ln(3) / 3, "A09": 0.0, "A10": ln(5),
}
m = {"A01": 7, "A02": 5, "A03": 7, "A04": 3, "A05": 2, "A06": 6, "A07": 0, "A08": 6, "A09": 0, "A10": 3}
users = {"A01": 6, "A02": 5, "A03": 6, "A04": 3, "A05": 2, "A06": 5, "A07": 0, "A08": 5, "A09": 0, "A10": 3}
followers = {"A01": 833, "A02": 291, "A03": 2112, "A04": 841, "A05": 25, "A06": 482,
             "A07": 0, "A08": 5582, "A09": 0, "A10": 89}
altmetric = {"A01": 5.5, "A02": 2.0, "A03": 9.0, "A05": 1.0, "A06": 4.0, "A07": 0.5, "A08": 15.0, "A10": 3.0}
topic = {a: ("Topic 1" if i < 5 else "Topic 2") for i, a in enumerate(ids)}

soc_senti = {a: senti_sum[a] / m[a] if m[a] else 0.0 for a in ids}
soc_user = {a: ln(1 + followers[a]) if m[a] else 0.0 for a in ids}

sheet = {"coverage": {
    "n_articles": "10", "n_articles_with_citations": "9", "pct_with_citations": "90",
    "n_articles_with_altmetric": "8", "pct_with_altmetric": "80", "n_articles_mentioned": "8",
    "pct_mentioned": "80", "n_tweets": "40", "n_linked_tweets": "38", "n_unique_users": "28",
    "n_unresolved_refs": "2",
}}
sheet["unresolved_refs"] = [["T38", "A99"], ["T40", "A99"]]
sheet["sentiment_distribution"] = [["positive", "17", fmt(100 * 17 / 38)],
                                   ["negative", "12", fmt(100 * 12 / 38)],
                                   ["neutral", "9", fmt(100 * 9 / 38)]]
sheet["sentiment_eval"] = {"macro_precision": "1", "macro_recall": "1", "macro_f1": "1", "n": "38"}
sheet["article_topics"] = topic
sheet["article_impact"] = [
    [a, topic[a], fmt(academic[a]), fmt(soc_senti[a]), fmt(soc_user[a]), str(m[a]), str(users[a]), str(followers[a])]
    for a in ids
]
# topic 1: A01-A05 all mentioned; 24 distinct tweets, 16 distinct users
# topic 2: A06, A08, A10 mentioned; 15 distinct tweets, 12 distinct users
sheet["topic_concern"] = [
    ["Topic 1", "5", "5", "24", "16", "0.5", "1", "4.8", "3.2"],
    ["Topic 2", "5", "3", "15", "12", "0.5", "0.6", "3", "2.4"],
]
# vaccine-themed tweets T01-T22, T37, T38, T40 vs. lockdown-themed T23-T36, T39
sheet["social_topic_concern"] = [["Topic 1", "25", "0.625"], ["Topic 2", "15", "0.375"]]
topic1_tweets = {f"T{i:02d}" for i in range(1, 23)} | {"T37", "T38", "T40"}
sheet["tweet_topics"] = {f"T{i:02d}": ("Topic 1" if f"T{i:02d}" in topic1_tweets else "Topic 2") for i in range(1, 41)}


def corr_row(group, mx, my, pairs):
    xs = [p[0] for p in pairs]
    ys = [p[1] for p in pairs]
    r, p = pearson_and_p(xs, ys)
    return [group, mx, my, fmt(r), fmt(p), stars(p), str(len(pairs))]


cited = [a for a in ids if academic[a] is not None]
rows = []
for group, subset in (("all", cited), ("topic 1", [a for a in cited if topic[a] == "Topic 1"]),
                      ("topic 2", [a for a in cited if topic[a] == "Topic 2"])):
    rows.append(corr_row(group, "academic_impact", "social_sentiment", [(academic[a], soc_senti[a]) for a in subset]))
    rows.append(corr_row(group, "academic_impact", "social_user", [(academic[a], soc_user[a]) for a in subset]))
alt_ids = [a for a in ids if a in altmetric]
rows.append(corr_row("altmetric", "altmetric_score", "academic_impact",
                     [(altmetric[a], academic[a]) for a in alt_ids if academic[a] is not None]))
rows.append(corr_row("altmetric", "altmetric_score", "social_sentiment", [(altmetric[a], soc_senti[a]) for a in alt_ids]))
rows.append(corr_row("altmetric", "altmetric_score", "social_user", [(altmetric[a], soc_user[a]) for a in alt_ids]))
rows.append(corr_row("altmetric_counts", "altmetric_score", "tweet_count", [(altmetric[a], m[a]) for a in alt_ids]))
rows.append(corr_row("altmetric_counts", "altmetric_score", "user_count", [(altmetric[a], users[a]) for a in alt_ids]))
sheet["correlations"] = rows

# 4 equal-width bins on [0, max]:
#   academic  [5,3,7,4,2,0,5,5,1] -> 2, 2, 4, 1
#   sentiment max is A08 -> 2, 1 (A10), 3 (A01, A05, A06), 4 (A02, A03, A04, A08)
#   user      max is A08 -> 2, 1 (A05), 3 (A02, A06, A10), 4 (A01, A03, A04, A08)
sheet["histogram_counts"] = {
    "academic_impact": [2, 2, 4, 1],
    "social_sentiment": [2, 1, 3, 4],
    "social_user": [2, 1, 3, 4],
}
top = {"academic_impact": 7.0, "social_sentiment": soc_senti["A08"], "social_user": soc_user["A08"]}
sheet["histogram_edges"] = {m: [fmt(i * hi / 4) for i in range(5)] for m, hi in top.items()}

Path(__file__).with_name("oracle.json").write_text(json.dumps(sheet, indent=1) + "\n", encoding="utf-8")
