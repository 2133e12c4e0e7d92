"""Seeded synthetic corpus for tests, demos, and golden files.

Real crawl data cannot ship with the package, so this module fabricates a
corpus with the same moving parts: Swiss and EU domains, two capture
waves, four languages, obligation wording that keyword annotators can
find, update-date stamps in several formats, legal references, generator
boilerplate, and contact blocks with anonymizable PII. Everything derives
from one seed; per-site streams are seeded by domain name so a site keeps
its character across waves and corpus sizes.
"""

from __future__ import annotations

import json
import random
from typing import Optional

import numpy as np

WAVE_A = "AUG2023"
WAVE_B = "OCT2023"

_OBLIGATIONS = ("contr", "purp", "rect", "forg", "port", "comp", "hum")

# Inclusion probability of each obligation sentence, per cohort and wave.
# Swiss sites start lower and move in October; EU sites sit high and flat.
_PROFILE = {
    "CH": {
        WAVE_A: {"contr": 0.72, "purp": 0.98, "rect": 0.74, "forg": 0.76,
                 "port": 0.46, "comp": 0.44, "hum": 0.16},
        WAVE_B: {"contr": 0.77, "purp": 0.99, "rect": 0.78, "forg": 0.80,
                 "port": 0.54, "comp": 0.51, "hum": 0.19},
    },
    "CH_EU": {
        WAVE_A: {"contr": 0.80, "purp": 0.98, "rect": 0.80, "forg": 0.82,
                 "port": 0.54, "comp": 0.53, "hum": 0.23},
        WAVE_B: {"contr": 0.84, "purp": 0.98, "rect": 0.83, "forg": 0.84,
                 "port": 0.60, "comp": 0.58, "hum": 0.25},
    },
    "EU": {
        WAVE_A: {"contr": 0.86, "purp": 0.99, "rect": 0.88, "forg": 0.90,
                 "port": 0.72, "comp": 0.74, "hum": 0.27},
        WAVE_B: {"contr": 0.86, "purp": 0.99, "rect": 0.88, "forg": 0.89,
                 "port": 0.72, "comp": 0.73, "hum": 0.27},
    },
}

_SITE_MIX = (
    # (weight, tld choices, has CH bucket, has EU bucket)
    (0.45, ("ch", "ch", "ch", "swiss"), True, False),   # CH
    (0.08, ("ch", "ch", "swiss"), True, True),          # CH_EU
    (0.22, ("de", "de", "at", "fr", "it"), False, True),  # EU
    (0.10, ("de", "fr"), True, True),                   # mixed -> excluded
    (0.15, ("com", "com", "org", "net"), False, False),  # generic -> excluded
)

_BUCKETS_COMMON = ("5k", "10k", "50k", "100k", "500k", "1M", "5M", "10M+")

_TITLE = {
    "de": "Datenschutzerklärung für unsere Website und unsere Dienste; der Schutz Ihrer personenbezogenen Daten ist uns ein wichtiges Anliegen.",
    "en": "Privacy policy for our website and services; the protection of your personal data is important to us.",
    "fr": "Politique de confidentialité de notre site; la protection des données et de vos données personnelles nous tient à coeur.",
    "it": "Informativa sulla privacy del nostro sito; la protezione dei dati e dei vostri dati personali è importante per noi.",
}

_SENTENCES = {
    "de": {
        "contr": "Verantwortlicher im Sinne des Gesetzes ist die Muster AG, Bahnhofstrasse 1.",
        "purp": "Wir verarbeiten Ihre Daten zu folgenden Zwecken: Vertragsabwicklung, Support und Statistik.",
        "rect": "Sie haben ein Auskunftsrecht sowie ein Recht auf Berichtigung unrichtiger Daten.",
        "forg": "Sie können jederzeit die Löschung Ihrer gespeicherten Daten verlangen.",
        "port": "Ausserdem besteht ein Recht auf Datenübertragbarkeit in einem gängigen Format.",
        "comp": "Sie haben das Recht, Beschwerde bei der zuständigen Aufsichtsbehörde einzureichen.",
        "hum": "Bei einer automatisierten Entscheidung können Sie menschliches Eingreifen verlangen.",
    },
    "en": {
        "contr": "The data controller for this website is Example Ltd, 1 Station Road.",
        "purp": "We process your data for the following purposes: contract handling, support and statistics.",
        "rect": "You have a right of access and a right to rectification of inaccurate data.",
        "forg": "You may request the erasure of your stored data at any time.",
        "port": "You also have a right to data portability in a common machine-readable format.",
        "comp": "You have the right to lodge a complaint with the supervisory authority.",
        "hum": "Where an automated decision is made you may request human intervention.",
    },
    "fr": {
        "contr": "Le responsable du traitement est Exemple SA, rue de la Gare 1.",
        "purp": "Nous traitons vos données aux finalités suivantes: exécution du contrat, assistance et statistiques.",
        "rect": "Vous disposez d'un droit d'accès et d'un droit de rectification des données inexactes.",
        "forg": "Vous pouvez demander à tout moment l'effacement de vos données enregistrées.",
        "port": "Vous bénéficiez également d'un droit à la portabilité de vos données.",
        "comp": "Vous avez le droit d'introduire une réclamation auprès de l'autorité de contrôle.",
        "hum": "En cas de décision automatisée, vous pouvez demander une intervention humaine.",
    },
    "it": {
        "contr": "Il titolare del trattamento è Esempio SA, via della Stazione 1.",
        "purp": "Trattiamo i vostri dati per le seguenti finalità: esecuzione del contratto, assistenza e statistiche.",
        "rect": "Avete un diritto di accesso e un diritto di rettifica dei dati inesatti.",
        "forg": "Potete chiedere in ogni momento la cancellazione dei vostri dati memorizzati.",
        "port": "Avete inoltre un diritto alla portabilità dei dati in un formato di uso comune.",
        "comp": "Avete il diritto di proporre reclamo all'autorità di controllo competente.",
        "hum": "In caso di decisione automatizzata potete richiedere un intervento umano.",
    },
}

_FILLER = {
    "de": (
        "Beim Besuch unserer Website werden technische Zugriffsdaten in Logfiles gespeichert.",
        "Cookies helfen uns, die Nutzung der Website auszuwerten und Funktionen bereitzustellen.",
        "Eine Weitergabe an Dritte erfolgt nur, soweit dies gesetzlich erlaubt ist.",
        "Die Daten werden gelöscht, sobald sie für die Verarbeitung nicht mehr erforderlich sind.",
        "Wir setzen technische und organisatorische Massnahmen zum Schutz Ihrer Daten ein.",
        "Unser Newsletter kann jederzeit über den Link am Ende jeder E-Mail abbestellt werden.",
    ),
    "en": (
        "When you visit our website technical access data is stored in server log files.",
        "Cookies help us analyse how the website is used and provide certain functions.",
        "Data is only shared with third parties where the law allows it.",
        "Data is deleted as soon as it is no longer required for processing.",
        "We apply technical and organisational measures to protect your information.",
        "You can unsubscribe from our newsletter at any time via the link in each email.",
    ),
    "fr": (
        "Lors de la visite de notre site, des données techniques sont enregistrées dans des fichiers journaux.",
        "Les cookies nous aident à analyser l'utilisation du site et à fournir certaines fonctions.",
        "Les données ne sont transmises à des tiers que lorsque la loi le permet.",
        "Les données sont supprimées dès qu'elles ne sont plus nécessaires au traitement.",
        "Nous appliquons des mesures techniques et organisationnelles pour protéger vos informations.",
        "Vous pouvez vous désinscrire de la newsletter à tout moment via le lien figurant dans chaque courriel.",
    ),
    "it": (
        "Quando visitate il nostro sito, i dati tecnici di accesso vengono salvati nei file di log.",
        "I cookie ci aiutano ad analizzare l'uso del sito e a fornire determinate funzioni.",
        "I dati vengono trasmessi a terzi solo nella misura consentita dalla legge.",
        "I dati vengono eliminati non appena non sono più necessari al trattamento.",
        "Adottiamo misure tecniche e organizzative per proteggere le vostre informazioni.",
        "Potete annullare l'iscrizione alla newsletter in qualsiasi momento tramite il link in ogni e-mail.",
    ),
}

_SHOP = {
    "de": "Willkommen in unserem Online-Shop. Entdecken Sie aktuelle Angebote, Neuheiten und Zubehör. Schnelle Lieferung in die ganze Schweiz und kostenlose Retouren innerhalb von 30 Tagen.",
    "en": "Welcome to our online store. Discover current offers, new arrivals and accessories. Fast delivery and free returns within 30 days.",
    "fr": "Bienvenue dans notre boutique en ligne. Découvrez les offres actuelles, les nouveautés et les accessoires. Livraison rapide et retours gratuits sous 30 jours.",
    "it": "Benvenuti nel nostro negozio online. Scoprite le offerte attuali, le novità e gli accessori. Consegna rapida e resi gratuiti entro 30 giorni.",
}

_LAW_GDPR = (
    "Die Verarbeitung erfolgt nach Art. 13 DSGVO.",
    "Processing is based on Article 6 GDPR.",
    "Le traitement est fondé sur le RGPD.",
    "Rechtsgrundlage ist die Verordnung 2016/679.",
)

_LAW_FADP = (
    "Es gilt das revidierte Schweizer Datenschutzgesetz (nDSG).",
    "Massgebend ist das DSG (SR 235.1).",
    "Le traitement respecte la LPD révisée.",
)

# One fixed boilerplate block per generator: same bytes in every policy that
# uses it, which is what boilerplate detection and clustering key on.
_GENERATOR_BLOCKS = {
    "swissanwalt": "Diese Datenschutzerklärung wurde mit SwissAnwalt erstellt. Sie haben jederzeit das Recht auf unentgeltliche Auskunft über Ihre gespeicherten Daten, deren Herkunft und Empfänger sowie den Zweck der Bearbeitung.",
    "datenschutzpartner": "Quelle: Datenschutzpartner. Diese Erklärung beschreibt, wie wir Personendaten bearbeiten und welche Rechte Ihnen zustehen.",
    "erecht24": "Erstellt mit dem Datenschutz-Generator von eRecht24. Sie haben jederzeit das Recht auf unentgeltliche Auskunft über Ihre gespeicherten personenbezogenen Daten, deren Herkunft und Empfänger und den Zweck der Datenverarbeitung sowie ein Recht auf Berichtigung, Sperrung oder Löschung dieser Daten.",
    "privacybee": "Generiert mit PrivacyBee. Der Schutz Ihrer Personendaten hat für uns hohe Priorität.",
    "dgd": "Diese Erklärung basiert auf einer Vorlage der DGD Deutsche Gesellschaft für Datenschutz.",
    "activemind": "Muster der activeMind AG, angepasst für unsere Website.",
    "brainbox": "Vorlage bereitgestellt von BrainBox Solutions.",
    "schwenke": "Erstellt mit dem Datenschutz-Generator.de von Dr. Thomas Schwenke.",
    "adsimple": "Quelle: Erstellt mit dem Datenschutz Generator von AdSimple.",
    "weisspartner": "Vorlage der Kanzlei WeissPartner, Stand der Technik beachtet.",
    "iubenda": "Documento generato con Iubenda e adattato al nostro sito.",
    "meindatenschutz": "Bereitgestellt durch MeinDatenschutz, alle Angaben ohne Gewähr.",
    "legallyok": "Template provided by LegallyOK for Swiss small businesses.",
    "trustedshops": "Rechtstexte von TrustedShops, regelmässig aktualisiert.",
}

_GENERATOR_WEIGHTS_CH = (
    ("swissanwalt", 0.33), ("datenschutzpartner", 0.17), ("privacybee", 0.11),
    ("erecht24", 0.08), ("dgd", 0.06), ("brainbox", 0.06), ("legallyok", 0.05),
    ("datenschutzpartner", 0.00), ("activemind", 0.04), ("schwenke", 0.03),
    ("adsimple", 0.03), ("weisspartner", 0.02), ("iubenda", 0.01),
    ("meindatenschutz", 0.005), ("trustedshops", 0.005),
)

_GENERATOR_WEIGHTS_EU = (
    ("erecht24", 0.40), ("schwenke", 0.18), ("adsimple", 0.12), ("dgd", 0.08),
    ("activemind", 0.07), ("iubenda", 0.06), ("trustedshops", 0.04),
    ("meindatenschutz", 0.03), ("weisspartner", 0.02),
)

_WORDS = (
    "alpen", "bern", "seeblick", "atelier", "garten", "kontor", "studio",
    "nova", "meridian", "quell", "forum", "linden", "terra", "castello",
    "voyage", "lumiere", "boutique", "martin", "keller", "solaris",
)


def _pick_weighted(rng: random.Random, weighted) -> str:
    total = sum(w for _, w in weighted)
    roll = rng.random() * total
    acc = 0.0
    for name, weight in weighted:
        acc += weight
        if roll <= acc:
            return name
    return weighted[-1][0]


def _site_language(rng: random.Random, kind: int, tld: str) -> str:
    if kind in (0, 1):  # Swiss cohorts
        return rng.choices(("de", "fr", "it", "en"), (0.70, 0.14, 0.05, 0.11))[0]
    if tld in ("de", "at"):
        return "de"
    if tld == "fr":
        return "fr"
    if tld == "it":
        return "it"
    return rng.choices(("en", "de"), (0.7, 0.3))[0]


def _update_sentence(rng: random.Random, year: int, month_range) -> str:
    month = rng.randint(*month_range)
    day = rng.randint(1, 28)
    form = rng.randrange(4)
    if form == 0:
        stamp = f"{day:02d}/{month:02d}/{year}"
    elif form == 1:
        stamp = f"{day:02d}.{month:02d}.{year}"
    elif form == 2:
        stamp = f"{year}-{month:02d}-{day:02d}"
    else:
        months_de = ("Januar", "Februar", "März", "April", "Mai", "Juni", "Juli",
                     "August", "September", "Oktober", "November", "Dezember")
        stamp = f"{day}. {months_de[month - 1]} {year}"
    lead = rng.choice(("Stand:", "Letzte Aktualisierung:", "Last updated:", "Zuletzt geändert am"))
    return f"{lead} {stamp}"


def _contact_block(rng: random.Random, domain: str) -> str:
    parts = [f"Kontakt: info@{domain}"]
    if rng.random() < 0.6:
        parts.append(f"Telefon: +41 {rng.randint(21, 79)} {rng.randint(100, 999)} {rng.randint(10, 99)} {rng.randint(10, 99)}")
    if rng.random() < 0.5:
        parts.append(f"Website: https://www.{domain}/datenschutz")
    if rng.random() < 0.12:
        parts.append(f"Spenden: CH{rng.randint(10, 99)} 0070 0110 {rng.randint(1000, 9999)} 2957 1")
    return " ".join(parts)


def _site_plan(seed: int, index: int) -> dict:
    """Stable per-site properties: domain, cohort kind, language, habits."""
    rng = random.Random(f"{seed}|site|{index}")
    roll = rng.random()
    acc, kind = 0.0, len(_SITE_MIX) - 1
    for i, (weight, _, _, _) in enumerate(_SITE_MIX):
        acc += weight
        if roll <= acc:
            kind = i
            break
    _, tlds, has_ch, has_eu = _SITE_MIX[kind]
    tld = rng.choice(tlds)
    domain = f"{rng.choice(_WORDS)}-{rng.choice(_WORDS)}{index}.{tld}"
    buckets = {}
    if has_ch:
        buckets["CH"] = rng.choice(("1k", "5k") if rng.random() < 0.12 else _BUCKETS_COMMON)
    if has_eu:
        country = {"de": "DE", "at": "AT", "fr": "FR", "it": "IT"}.get(tld, rng.choice(("DE", "FR", "IT", "AT")))
        buckets[country] = rng.choice(("1k", "5k") if rng.random() < 0.10 else _BUCKETS_COMMON)
    if not buckets:
        buckets[rng.choice(("US", "GB", "CA"))] = rng.choice(_BUCKETS_COMMON)
    group = {0: "CH", 1: "CH_EU", 2: "EU"}.get(kind, "CH")
    generator = None
    if kind in (0, 1) and rng.random() < 0.20:
        generator = _pick_weighted(rng, _GENERATOR_WEIGHTS_CH)
    elif kind == 2 and rng.random() < 0.10:
        generator = _pick_weighted(rng, _GENERATOR_WEIGHTS_EU)
    second = None
    if generator and rng.random() < 0.06:
        second = "erecht24" if generator != "erecht24" else "schwenke"
    return {
        "domain": domain,
        "tld": tld,
        "rank_buckets": buckets,
        "kind": kind,
        "profile_group": group,
        "language": _site_language(rng, kind, tld),
        "is_policy": rng.random() >= 0.06,
        "generator": generator,
        "second_generator": second,
        "filler_count": rng.randint(4, 26),
        "has_update_stamp": rng.random() < 0.82,
        "keeps_old_date": rng.random() < 0.55,
    }


def _doc_text(plan: dict, wave: str, rng: random.Random) -> str:
    lang = plan["language"]
    if not plan["is_policy"]:
        filler = [rng.choice(_FILLER[lang]) for _ in range(6)]
        return " ".join([_SHOP[lang]] + filler)

    profile = _PROFILE[plan["profile_group"]][wave]
    boost = 0.12 if plan["generator"] else 0.0
    body = []
    for code in _OBLIGATIONS:
        p = min(profile[code] + (boost if code in ("port", "comp") else 0.0), 0.99)
        if rng.random() < p:
            body.append(_SENTENCES[lang][code])

    if plan["profile_group"] in ("CH", "CH_EU"):
        if rng.random() < 0.52:
            body.append(rng.choice(_LAW_FADP))
        if rng.random() < 0.45:
            body.append(rng.choice(_LAW_GDPR))
    else:
        if rng.random() < 0.80:
            body.append(rng.choice(_LAW_GDPR))
        if rng.random() < 0.05:
            body.append(rng.choice(_LAW_FADP))

    if plan["generator"]:
        body.append(_GENERATOR_BLOCKS[plan["generator"]])
    if plan["second_generator"]:
        body.append(_GENERATOR_BLOCKS[plan["second_generator"]])

    if plan["has_update_stamp"]:
        if wave == WAVE_A or plan["keeps_old_date"]:
            body.append(_update_sentence(rng, 2023, (1, 8)))
        else:
            body.append(_update_sentence(rng, 2023, (9, 10)))

    if rng.random() < 0.7:
        body.append(_contact_block(rng, plan["domain"]))

    extra = 6 if wave == WAVE_B and plan["profile_group"] == "CH" else 0
    filler = [rng.choice(_FILLER[lang]) for _ in range(plan["filler_count"] + extra)]
    middle = body + filler
    rng.shuffle(middle)
    return " ".join([_TITLE[lang]] + middle)


def build_synthetic_corpus(n_docs: int = 1000, seed: int = 7) -> list[dict]:
    """Corpus records ready to serialize as JSON lines.

    Exactly n_docs documents: most sites are captured in both waves, a
    small tail only in one, so wave totals differ the way crawls do.
    """
    if n_docs < 10:
        raise ValueError("need at least 10 documents for a plausible corpus")
    single = max(n_docs // 25, 1)
    both = (n_docs - 2 * single) // 2
    aug_only = single + (n_docs - 2 * single - 2 * both)
    oct_only = single

    records = []
    index = 0
    capture_rng = random.Random(f"{seed}|capture")

    def emit(plan: dict, wave: str) -> None:
        rng = random.Random(f"{seed}|{plan['domain']}|{wave}")
        month = "08" if wave == WAVE_A else "10"
        records.append(
            {
                "doc_id": f"{plan['domain']}:{wave.lower()}",
                "domain": plan["domain"],
                "tld": plan["tld"],
                "rank_buckets": plan["rank_buckets"],
                "snapshot_id": f"{wave.lower()}-{plan['domain']}",
                "window_label": wave,
                "capture_date": f"2023-{month}-{capture_rng.randint(1, 28):02d}",
                "text": _doc_text(plan, wave, rng),
            }
        )

    for _ in range(both):
        plan = _site_plan(seed, index)
        index += 1
        emit(plan, WAVE_A)
        emit(plan, WAVE_B)
    for _ in range(aug_only):
        plan = _site_plan(seed, index)
        index += 1
        emit(plan, WAVE_A)
    for _ in range(oct_only):
        plan = _site_plan(seed, index)
        index += 1
        emit(plan, WAVE_B)
    return records


def write_synthetic_corpus(path, n_docs: int = 1000, seed: int = 7) -> int:
    records = build_synthetic_corpus(n_docs=n_docs, seed=seed)
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")
    return len(records)


def pseudo_embedding(text: str, dim: int = 64) -> np.ndarray:
    """Deterministic stand-in embedding: hashed bag of words, unit norm.

    Documents sharing sentences land close in cosine space, which is all
    the projection and cohesion tests need. Not a language model.
    """
    import hashlib

    vector = np.zeros(dim, dtype=np.float64)
    for token in text.casefold().split():
        digest = hashlib.sha256(token.encode("utf-8")).digest()
        bucket = int.from_bytes(digest[:4], "big") % dim
        sign = 1.0 if digest[4] % 2 == 0 else -1.0
        vector[bucket] += sign
    norm = np.linalg.norm(vector)
    if norm == 0.0:
        vector[0] = 1.0
        norm = 1.0
    return vector / norm
