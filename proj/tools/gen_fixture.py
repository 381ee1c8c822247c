#!/usr/bin/env python3
"""Generates the bundled fixture archive under tests/fixtures/.

Outputs:
  site/listing/<lang>/page-<n>.json, site/html/<lang>/<id>.html
  embeddings/<lang>/<id>.emb      one row per intended sentence
  dict/hi-en.tsv
  truth.json                      intended sentences per article and the pairing
  pipeline.json                   pipeline config over the fixture

Embeddings: every English sentence owns a random concept vector; its Hindi
translation gets the same vector plus noise and a language offset shared by
all Hindi rows (multilingual encoders show such a per-language shift). A
Hindi sentence translating two English ones gets the sum of both concepts.
Inserted sentences get fresh vectors.
"""

import json
import math
import random
import shutil
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
DIM = 16
BASE = "https://fixture.example"

# Each article: list of paragraphs; each paragraph is a list of items.
# Item kinds: ("s", en, hi) aligned sentence; ("merge", [en1, en2], hi);
# ("ins", hi) Hindi-only sentence; ("li", en, hi) list item with marker;
# ("tweet",) embedded tweet on the English side.
THANKS = ("s", "The Prime Minister thanked everyone for their support.",
          "प्रधानमंत्री ने सभी को उनके समर्थन के लिए धन्यवाद दिया।")

ARTICLES = [
    {
        "en": "en-101", "hi": "hi-201",
        "title": ("PM meets visiting delegation", "प्रधानमंत्री ने प्रतिनिधिमंडल से मुलाकात की"),
        "body": [
            [("s", "Prime Minister Shri Narendra Modi met Mr. John Smith in New Delhi today.",
              "प्रधानमंत्री श्री नरेन्द्र मोदी ने आज नई दिल्ली में श्री जॉन स्मिथ से मुलाकात की।"),
             ("s", "The two leaders discussed trade, energy and climate change.",
              "दोनों नेताओं ने व्यापार, ऊर्जा और जलवायु परिवर्तन पर चर्चा की।")],
            [("s", "They agreed to strengthen cooperation in education and health.",
              "उन्होंने शिक्षा और स्वास्थ्य में सहयोग को मजबूत करने पर सहमति व्यक्त की।"),
             THANKS],
        ],
    },
    {
        "en": "en-102", "hi": "hi-202",
        "title": ("Cabinet approves scheme for farmers", "मंत्रिमंडल ने किसानों के लिए योजना को मंजूरी दी"),
        "body": [
            [("s", "The Union Cabinet approved a new scheme for farmers on Wednesday.",
              "केन्द्रीय मंत्रिमंडल ने बुधवार को किसानों के लिए एक नई योजना को मंजूरी दी।"),
             ("merge", ["The scheme will cost Rs. 500 crore.", "It will run for five years."],
              "इस योजना पर 500 करोड़ रुपये खर्च होंगे और यह पांच वर्ष तक चलेगी।")],
            [("s", "Farmers in every district will receive direct support.",
              "हर जिले के किसानों को सीधी सहायता मिलेगी।"),
             ("s", "The Minister of Agriculture will review the progress every month.",
              "कृषि मंत्री हर महीने प्रगति की समीक्षा करेंगे।")],
        ],
    },
    {
        "en": "en-103", "hi": "hi-203",
        "title": ("New hospital opens in Varanasi", "वाराणसी में नया अस्पताल खुला"),
        "body": [
            [("s", "The Prime Minister inaugurated a new hospital in Varanasi.",
              "प्रधानमंत्री ने वाराणसी में एक नए अस्पताल का उद्घाटन किया।"),
             ("s", "The hospital has five hundred beds and modern equipment.",
              "अस्पताल में पांच सौ बिस्तर और आधुनिक उपकरण हैं।"),
             ("ins", "इस अवसर पर राज्य के मुख्यमंत्री भी उपस्थित थे।")],
            [("s", "Doctors from across the country will work here.",
              "देश भर के डॉक्टर यहां काम करेंगे।"),
             ("s", "Patients will get free treatment under the health scheme.",
              "स्वास्थ्य योजना के तहत मरीजों को मुफ्त इलाज मिलेगा।")],
        ],
    },
    {
        "en": "en-104", "hi": "hi-204",
        "title": ("Support for small businesses", "छोटे व्यवसायों के लिए सहायता"),
        "body": [
            [("s", "The government announced three measures for small businesses.",
              "सरकार ने छोटे व्यवसायों के लिए तीन उपायों की घोषणा की।")],
            [("li", "(i) Loans will be available at low interest. Banks will process them quickly.",
              "(i) कम ब्याज पर ऋण उपलब्ध होंगे। बैंक उन्हें जल्दी मंजूर करेंगे।")],
            [("li", "(ii) Taxes will be filed online.", "(ii) कर ऑनलाइन जमा किए जाएंगे।")],
            [("li", "(iii) New training centres will open in every state.",
              "(iii) हर राज्य में नए प्रशिक्षण केंद्र खुलेंगे।")],
            [("s", "Dr. Sharma said the measures would create jobs.",
              "डॉ. शर्मा ने कहा कि इन उपायों से रोजगार पैदा होंगे।")],
        ],
    },
    {
        "en": "en-105", "hi": "hi-205",
        "title": ("Weather satellite launched", "मौसम उपग्रह का प्रक्षेपण"),
        "body": [
            [("s", "India launched a satellite for weather forecasting from Sriharikota.",
              "भारत ने श्रीहरिकोटा से मौसम पूर्वानुमान के लिए एक उपग्रह प्रक्षेपित किया।"),
             ("s", "The Prime Minister congratulated the scientists.",
              "प्रधानमंत्री ने वैज्ञानिकों को बधाई दी।")],
            [("tweet",)],
            [("s", "The satellite will help farmers and fishermen.",
              "यह उपग्रह किसानों और मछुआरों की मदद करेगा।"),
             THANKS],
        ],
    },
    {
        "en": "en-106", "hi": "hi-206",
        "title": ("PM addresses rally in Kolkata", "प्रधानमंत्री ने कोलकाता में रैली को संबोधित किया"),
        "body": [
            [("s", "The Prime Minister addressed a rally in Kolkata on Sunday.",
              "प्रधानमंत्री ने रविवार को कोलकाता में एक रैली को संबोधित किया।"),
             ("s", "What is the dream of a new India?", "नए भारत का सपना क्या है?"),
             ("s", "He said every citizen must have a home by 2022!",
              "उन्होंने कहा कि 2022 तक हर नागरिक के पास घर होना चाहिए!"),
             ("s", "The crowd welcomed him warmly.", "भीड़ ने उनका गर्मजोशी से स्वागत किया।")],
        ],
    },
    {
        "en": "en-107", "hi": "hi-207",
        "title": ("Tribute to Dr. Kalam", "डॉ. कलाम को श्रद्धांजलि"),
        "body": [
            [("s", "The Prime Minister paid tribute to Dr. A. P. J. Abdul Kalam on his birth anniversary.",
              "प्रधानमंत्री ने डॉ. ए. पी. जे. अब्दुल कलाम को उनकी जयंती पर श्रद्धांजलि दी।"),
             ("s", "He described him as a great scientist and teacher.",
              "उन्होंने उन्हें एक महान वैज्ञानिक और शिक्षक बताया।")],
            [("s", "Students across the country took part in events.",
              "देश भर के छात्रों ने कार्यक्रमों में भाग लिया।")],
        ],
    },
    {
        "en": "en-108", "hi": "hi-208", "relative_link": True,
        "title": ("Progress on rural roads", "ग्रामीण सड़कों पर प्रगति"),
        "body": [
            [("s", "The government released new figures on rural roads.",
              "सरकार ने ग्रामीण सड़कों पर नए आंकड़े जारी किए।"),
             ("s", "More than one lakh villages are now connected.",
              "एक लाख से अधिक गांव अब जुड़ चुके हैं।"),
             ("s", "Work on the remaining roads will finish next year.",
              "शेष सड़कों पर काम अगले वर्ष पूरा होगा।")],
        ],
    },
]

ENGLISH_ONLY = [
    {
        "en": "en-109",
        "title": "Statement on the monsoon session",
        "body": [["The monsoon session of Parliament begins next week.",
                  "The government has listed twenty bills for discussion."]],
    },
    {
        "en": "en-110",
        "title": "Greetings on the national festival",
        "body": [["The Prime Minister greeted the people on the festival."], ["tweet"],
                 ["He wished everyone health and happiness."]],
    },
]

UNTRANSLATED = {
    "hi": "hi-209", "en_link": "en-109",
    "title": "Statement on the monsoon session",
    "body": [["The monsoon session of Parliament begins next week."]],
}

DANGLING = {
    "hi": "hi-210", "en_link": "en-199",
    "title": "राष्ट्रीय खेल दिवस पर शुभकामनाएं",
    "body": [["प्रधानमंत्री ने राष्ट्रीय खेल दिवस पर खिलाड़ियों को शुभकामनाएं दीं।"]],
}

DICTIONARY = [
    ("prime", "प्रधानमंत्री"), ("minister", "मंत्री"), ("today", "आज"), ("delhi", "दिल्ली"), ("new", "नई"),
    ("leaders", "नेताओं"), ("trade", "व्यापार"), ("energy", "ऊर्जा"), ("climate", "जलवायु"),
    ("education", "शिक्षा"), ("health", "स्वास्थ्य"), ("cooperation", "सहयोग"), ("support", "समर्थन"),
    ("everyone", "सभी"), ("thanked", "धन्यवाद"), ("cabinet", "मंत्रिमंडल"), ("scheme", "योजना"),
    ("farmers", "किसानों"), ("wednesday", "बुधवार"), ("crore", "करोड़"), ("five", "पांच"), ("years", "वर्ष"),
    ("district", "जिले"), ("direct", "सीधी"), ("agriculture", "कृषि"), ("month", "महीने"),
    ("progress", "प्रगति"), ("hospital", "अस्पताल"), ("varanasi", "वाराणसी"), ("hundred", "सौ"),
    ("beds", "बिस्तर"), ("modern", "आधुनिक"), ("equipment", "उपकरण"), ("doctors", "डॉक्टर"),
    ("country", "देश"), ("work", "काम"), ("here", "यहां"), ("patients", "मरीजों"), ("free", "मुफ्त"),
    ("treatment", "इलाज"), ("government", "सरकार"), ("three", "तीन"), ("measures", "उपायों"),
    ("small", "छोटे"), ("businesses", "व्यवसायों"), ("loans", "ऋण"), ("interest", "ब्याज"), ("banks", "बैंक"),
    ("taxes", "कर"), ("online", "ऑनलाइन"), ("training", "प्रशिक्षण"), ("state", "राज्य"), ("jobs", "रोजगार"),
    ("india", "भारत"), ("satellite", "उपग्रह"), ("weather", "मौसम"), ("scientists", "वैज्ञानिकों"),
    ("fishermen", "मछुआरों"), ("help", "मदद"), ("rally", "रैली"), ("kolkata", "कोलकाता"),
    ("sunday", "रविवार"), ("dream", "सपना"), ("citizen", "नागरिक"), ("home", "घर"), ("crowd", "भीड़"),
    ("welcomed", "स्वागत"), ("tribute", "श्रद्धांजलि"), ("kalam", "कलाम"), ("great", "महान"),
    ("scientist", "वैज्ञानिक"), ("teacher", "शिक्षक"), ("students", "छात्रों"), ("events", "कार्यक्रमों"),
    ("roads", "सड़कों"), ("rural", "ग्रामीण"), ("figures", "आंकड़े"), ("lakh", "लाख"), ("villages", "गांव"),
    ("year", "वर्ष"), ("remaining", "शेष"), ("anniversary", "जयंती"), ("2022", "2022"), ("500", "500"),
    ("every", "हर"), ("what", "क्या"), ("said", "कहा"),
]

TWEET = ('<blockquote class="twitter-tweet"><p lang="en" dir="ltr">Proud of our scientists and everyone '
         'who made this possible! pic.twitter.com/abc123</p>&mdash; PMO India (@PMOIndia) '
         '<a href="https://twitter.com/PMOIndia/status/1">July 22, 2019</a></blockquote>\n'
         '<script async src="https://platform.twitter.com/widgets.js" charset="utf-8"></script>')

NAV = ('<header><nav class="menu"><ul><li><a href="/">Home</a></li><li><a href="/news">News Updates</a></li>'
       '<li><a href="/speeches">Speeches</a></li><li><a href="/gallery">Photo Gallery</a></li></ul></nav></header>')

RELATED = ('<div class="related"><a href="/news/a">Related: earlier statements on this subject</a> | '
           '<a href="/news/b">Related: press releases archive</a></div>')

FOOTER = '<footer><p>Copyright 2019 Fixture Government Portal. All rights reserved.</p></footer>'


def en_url(doc_id):
    return f"{BASE}/en/news/{doc_id}"


def hi_url(doc_id):
    return f"{BASE}/hi/news/{doc_id}"


def esc(s):
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def page(lang, title, paragraphs, english_link=None):
    head = [f'<meta charset="utf-8">', f"<title>{esc(title)}</title>"]
    if english_link:
        head.append(f'<link rel="alternate" hreflang="en" href="{english_link}">')
    head.append('<script>var layout = "<p>not content</p>";</script>')
    head.append("<style>p { margin: 0 }</style>")
    body = [NAV, RELATED, "<article>", f"<h1>{esc(title)}</h1>"]
    for para in paragraphs:
        if para == "tweet":
            body.append(TWEET)
        elif isinstance(para, tuple) and para[0] == "list":
            body.append("<ul>" + "".join(f"<li>{esc(x)}</li>" for x in para[1]) + "</ul>")
        else:
            body.append("<p>" + esc(para) + "</p>")
    body.append("</article>")
    body.append(FOOTER)
    return (f'<!DOCTYPE html>\n<html lang="{lang}">\n<head>\n' + "\n".join(head) + "\n</head>\n<body>\n" +
            "\n".join(body) + "\n</body>\n</html>\n")


def strip_marker(text):
    return text.split(") ", 1)[1] if text.startswith("(") else text


def render_article(art):
    """Paragraph lists for both sides, the intended sentences, and concept plans."""
    en_paras, hi_paras = [], []
    en_sents = [art["title"][0]]
    hi_sents = [art["title"][1]]
    # Embedding plans: per sentence, the list of concept keys it realizes.
    en_plan = [[art["title"][0]]]
    hi_plan = [[art["title"][0]]]
    gold = [([0], [0])]
    for para in art["body"]:
        if para[0][0] == "li":
            en_paras.append(("list", [it[1] for it in para]))
            hi_paras.append(("list", [it[2] for it in para]))
        elif para[0][0] == "tweet":
            en_paras.append("tweet")
            continue
        else:
            en_text, hi_text = [], []
            for it in para:
                if it[0] == "s":
                    en_text.append(it[1])
                    hi_text.append(it[2])
                elif it[0] == "merge":
                    en_text.extend(it[1])
                    hi_text.append(it[2])
                elif it[0] == "ins":
                    hi_text.append(it[1])
            en_paras.append(" ".join(en_text))
            hi_paras.append(" ".join(hi_text))
        for it in para:
            if it[0] in ("s", "li"):
                en_s = strip_marker(it[1]) if it[0] == "li" else it[1]
                hi_s = strip_marker(it[2]) if it[0] == "li" else it[2]
                gold.append(([len(en_sents)], [len(hi_sents)]))
                en_sents.append(en_s)
                hi_sents.append(hi_s)
                en_plan.append([en_s])
                hi_plan.append([en_s])
            elif it[0] == "merge":
                gold.append(([len(en_sents), len(en_sents) + 1], [len(hi_sents)]))
                en_sents.extend(it[1])
                hi_sents.append(it[2])
                en_plan.extend([[x] for x in it[1]])
                hi_plan.append(list(it[1]))
            elif it[0] == "ins":
                gold.append(([], [len(hi_sents)]))
                hi_sents.append(it[1])
                hi_plan.append(["<ins>" + it[1]])
    return en_paras, hi_paras, en_sents, hi_sents, en_plan, hi_plan, gold


class Concepts:
    def __init__(self, seed):
        self.rng = random.Random(seed)
        self.table = {}

    def vec(self, key):
        if key not in self.table:
            self.table[key] = [self.rng.gauss(0.0, 1.0) for _ in range(DIM)]
        return self.table[key]

    def embed(self, plan, noise, offset=None):
        rows = []
        for keys in plan:
            v = [0.0] * DIM
            for k in keys:
                v = [a + b for a, b in zip(v, self.vec(k))]
            if offset:
                v = [a + b for a, b in zip(v, self.vec(offset))]
            v = [a + self.rng.gauss(0.0, noise) for a in v]
            n = math.sqrt(sum(a * a for a in v))
            rows.append([a / n for a in v])
        return rows


def write_emb(path, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"{len(rows)} {DIM}"] + [" ".join(f"{x:.9g}" for x in r) for r in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def main():
    for sub in ("site", "embeddings", "dict"):
        shutil.rmtree(ROOT / sub, ignore_errors=True)
    site = ROOT / "site"
    concepts = Concepts(20190722)
    truth = {"articles": [], "english_only": [], "untranslated": [UNTRANSLATED["hi"]],
             "dangling": [DANGLING["hi"]]}
    en_listing, hi_listing = [], []

    for art in ARTICLES:
        en_paras, hi_paras, en_sents, hi_sents, en_plan, hi_plan, gold = render_article(art)
        en_doc, hi_doc = art["en"], art["hi"]
        link = f"/news/{en_doc}.html" if art.get("relative_link") else en_url(en_doc)
        (site / "html" / "en").mkdir(parents=True, exist_ok=True)
        (site / "html" / "hi").mkdir(parents=True, exist_ok=True)
        (site / "html" / "en" / f"{en_doc}.html").write_text(page("en", art["title"][0], en_paras), encoding="utf-8")
        (site / "html" / "hi" / f"{hi_doc}.html").write_text(page("hi", art["title"][1], hi_paras, link),
                                                               encoding="utf-8")
        en_listing.append({"id": en_doc, "lang": "en", "url": en_url(en_doc), "title": art["title"][0]})
        hi_listing.append({"id": hi_doc, "lang": "hi", "url": hi_url(hi_doc), "title": art["title"][1]})
        write_emb(ROOT / "embeddings" / "en" / f"{en_doc}.emb", concepts.embed(en_plan, 0.05))
        write_emb(ROOT / "embeddings" / "hi" / f"{hi_doc}.emb", concepts.embed(hi_plan, 0.1, "<lang:hi>"))
        truth["articles"].append({"en": en_doc, "hi": hi_doc, "en_sentences": en_sents, "hi_sentences": hi_sents,
                                  "gold": [{"en": g[0], "hi": g[1]} for g in gold]})

    for art in ENGLISH_ONLY:
        paras = ["tweet" if p == ["tweet"] else " ".join(p) for p in art["body"]]
        sents = [art["title"]] + [s for p in art["body"] if p != ["tweet"] for s in p]
        (site / "html" / "en" / f"{art['en']}.html").write_text(page("en", art["title"], paras), encoding="utf-8")
        en_listing.append({"id": art["en"], "lang": "en", "url": en_url(art["en"]), "title": art["title"]})
        truth["english_only"].append({"en": art["en"], "en_sentences": sents})

    for extra in (UNTRANSLATED, DANGLING):
        paras = [" ".join(p) for p in extra["body"]]
        (site / "html" / "hi" / f"{extra['hi']}.html").write_text(
            page("hi", extra["title"], paras, en_url(extra["en_link"])), encoding="utf-8")
        hi_listing.append({"id": extra["hi"], "lang": "hi", "url": hi_url(extra["hi"]), "title": extra["title"]})

    # Two listing pages per language; the archive ends at the first missing page.
    for lang, listing in (("en", en_listing), ("hi", hi_listing)):
        d = site / "listing" / lang
        d.mkdir(parents=True, exist_ok=True)
        half = (len(listing) + 1) // 2
        for n, chunk in enumerate((listing[:half], listing[half:]), start=1):
            (d / f"page-{n}.json").write_text(json.dumps(chunk, ensure_ascii=False, indent=1) + "\n",
                                              encoding="utf-8")

    (ROOT / "dict").mkdir(parents=True, exist_ok=True)
    (ROOT / "dict" / "hi-en.tsv").write_text(
        "# english<TAB>hindi\n" + "".join(f"{e}\t{h}\n" for e, h in DICTIONARY), encoding="utf-8")
    (ROOT / "truth.json").write_text(json.dumps(truth, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")
    config = {
        "source": "site",
        "languages": ["hi"],
        "title_threshold": 0.5,
        "workers": 2,
        "length_model": {"c": 1.0, "s2": 6.8, "kappa": 3.0, "lambda": 2.0},
        "dictionaries": {"hi": "dict/hi-en.tsv"},
        "embed": {"languages": ["hi"], "provider": "files", "dir": "embeddings", "max_block": 2,
                  "skip_cost": 0.9, "window": 40, "norm_samples": 128, "seed": 13},
    }
    (ROOT / "pipeline.json").write_text(json.dumps(config, indent=2) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
