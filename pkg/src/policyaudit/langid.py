"""Character-trigram language identification for the four corpus languages.

Small built-in text profiles stand in for an external identifier so the
pipeline stays dependency-free and deterministic. Classification is by
smoothed trigram likelihood with a posterior over {de, en, fr, it};
anything below the confidence threshold (or too short to carry a signal)
is labelled ``unknown``. Mixed-language documents are labelled by their
dominant language, whole-document.
"""

from __future__ import annotations

import math
import re
import unicodedata
from functools import lru_cache

TARGET_LANGUAGES = ("de", "en", "fr", "it")
UNKNOWN = "unknown"

#: Below this confidence the label is forced to ``unknown``.
DEFAULT_THRESHOLD = 0.5
#: Texts shorter than this (after stripping) carry too little signal.
MIN_TEXT_CHARS = 40

# Trigram statistics beyond this many trigrams add nothing; capping keeps
# very long documents cheap.
_MAX_TRIGRAMS = 4000

_SEED_TEXTS = {
    "de": """
Diese Datenschutzerklärung informiert Sie über die Verarbeitung Ihrer
personenbezogenen Daten auf unserer Webseite. Wir nehmen den Schutz Ihrer
Daten sehr ernst und behandeln sie vertraulich. Die Erhebung und Nutzung
erfolgt nur im Rahmen der gesetzlichen Bestimmungen. Sie haben jederzeit
das Recht auf Auskunft über die bei uns gespeicherten Daten sowie auf
Berichtigung oder Löschung. Wenn Sie unsere Seite besuchen, werden
automatisch Informationen erfasst, zum Beispiel der verwendete Browser und
die Uhrzeit des Zugriffs. Für die Bestellung in unserem Online-Shop
benötigen wir Ihren Namen und Ihre Anschrift. Der Verantwortliche im Sinne
des Gesetzes ist die im Impressum genannte Gesellschaft. Eine Weitergabe an
Dritte findet nicht statt, es sei denn, wir sind gesetzlich dazu
verpflichtet. Die Zwecke der Verarbeitung sind die Bereitstellung der
Webseite und die Beantwortung von Anfragen. Bitte beachten Sie, dass die
Übertragung von Daten im Internet Sicherheitslücken aufweisen kann. Weitere
Fragen beantworten wir Ihnen gerne per Post oder über das Kontaktformular.
Mit der Nutzung dieser Seite erklären Sie sich damit einverstanden. Diese
Hinweise gelten für alle Angebote, die wir betreiben. Änderungen werden an
dieser Stelle veröffentlicht und treten sofort in Kraft.
""",
    "en": """
This privacy policy explains how we collect, use, and share your personal
data when you visit our website. We take the protection of your information
seriously and handle it in accordance with the law. You have the right to
request access to the data we store about you, and to ask for correction or
deletion at any time. When you browse our pages, certain details are logged
automatically, such as the browser you use and the time of your visit. If
you place an order in our online shop, we need your name and address to
deliver the goods. The company named in the imprint is responsible for the
processing described here. We do not pass your data to third parties unless
we are required to do so by law. The purposes of the processing are to
provide this website and to answer your questions. Please note that the
transmission of information over the internet can never be completely
secure. If you have further questions, feel free to contact us by post or
through the contact form. By using this site you agree to the terms set out
above. These notes apply to all services that we operate. Changes will be
published on this page and take effect immediately.
""",
    "fr": """
La présente politique de confidentialité vous informe sur le traitement de
vos données personnelles lorsque vous visitez notre site web. Nous prenons
la protection de vos informations très au sérieux et les traitons de
manière confidentielle. Vous avez à tout moment le droit de demander
l'accès aux données que nous conservons à votre sujet, ainsi que leur
rectification ou leur effacement. Lorsque vous consultez nos pages,
certaines informations sont enregistrées automatiquement, par exemple le
navigateur utilisé et l'heure de la visite. Pour passer une commande dans
notre boutique en ligne, nous avons besoin de votre nom et de votre
adresse. La société mentionnée dans les mentions légales est responsable du
traitement décrit ici. Nous ne transmettons pas vos données à des tiers,
sauf si la loi nous y oblige. Les finalités du traitement sont la mise à
disposition du site et la réponse à vos questions. Veuillez noter que la
transmission d'informations sur internet ne peut jamais être totalement
sécurisée. Pour toute question, vous pouvez nous contacter par courrier ou
via le formulaire de contact. En utilisant ce site, vous acceptez les
conditions décrites ci-dessus. Ces indications s'appliquent à tous les
services que nous exploitons. Les modifications seront publiées sur cette
page et prendront effet immédiatement.
""",
    "it": """
La presente informativa sulla privacy descrive il trattamento dei dati
personali quando visitate il nostro sito web. Prendiamo molto sul serio la
protezione delle vostre informazioni e le trattiamo in modo riservato.
Avete in qualsiasi momento il diritto di chiedere l'accesso ai dati che
conserviamo su di voi, nonché la loro rettifica o cancellazione. Quando
consultate le nostre pagine, alcune informazioni vengono registrate
automaticamente, per esempio il browser utilizzato e l'ora della visita.
Per effettuare un ordine nel nostro negozio online abbiamo bisogno del
vostro nome e del vostro indirizzo. La società indicata nelle note legali è
responsabile del trattamento qui descritto. Non trasmettiamo i vostri dati
a terzi, salvo obbligo di legge. Le finalità del trattamento sono la messa
a disposizione del sito e la risposta alle vostre domande. Vi preghiamo di
notare che la trasmissione di informazioni su internet non può mai essere
completamente sicura. Per ulteriori domande potete contattarci per posta o
tramite il modulo di contatto. Utilizzando questo sito accettate le
condizioni sopra descritte. Queste indicazioni valgono per tutti i servizi
che gestiamo. Le modifiche saranno pubblicate su questa pagina ed entrano
in vigore immediatamente.
""",
}

_NON_LETTER = re.compile(r"[^a-zà-öø-ÿœß]+")


def _normalize(text: str) -> str:
    text = unicodedata.normalize("NFC", text).casefold()
    return _NON_LETTER.sub(" ", text).strip()


def _trigrams(text: str, limit: int | None = None):
    normalized = _normalize(text)
    if not normalized:
        return []
    padded = f" {normalized} "
    n = len(padded) - 2
    if limit is not None:
        n = min(n, limit)
    return [padded[i : i + 3] for i in range(n)]


@lru_cache(maxsize=1)
def _profiles():
    counts = {}
    vocabulary = set()
    for lang, seed in _SEED_TEXTS.items():
        lang_counts = {}
        for gram in _trigrams(seed):
            lang_counts[gram] = lang_counts.get(gram, 0) + 1
        counts[lang] = lang_counts
        vocabulary.update(lang_counts)
    vocab_size = len(vocabulary)
    profiles = {}
    for lang, lang_counts in counts.items():
        total = sum(lang_counts.values())
        denom = total + vocab_size + 1
        profiles[lang] = (
            {gram: math.log((c + 1) / denom) for gram, c in lang_counts.items()},
            math.log(1.0 / denom),
        )
    return profiles


def detect_language(
    text: str, threshold: float = DEFAULT_THRESHOLD
) -> tuple[str, float]:
    """Identify the language of ``text``.

    Returns a ``(language, confidence)`` pair where language is one of
    ``de``, ``en``, ``fr``, ``it``, or ``unknown``. Total and deterministic:
    never raises, identical inputs give identical outputs.
    """
    if len(text.strip()) < MIN_TEXT_CHARS:
        return (UNKNOWN, 0.0)
    grams = _trigrams(text, limit=_MAX_TRIGRAMS)
    if not grams:
        return (UNKNOWN, 0.0)
    profiles = _profiles()
    log_likelihoods = {}
    for lang in TARGET_LANGUAGES:
        table, floor = profiles[lang]
        log_likelihoods[lang] = sum(table.get(g, floor) for g in grams)
    best = max(TARGET_LANGUAGES, key=lambda lang: (log_likelihoods[lang], lang))
    peak = log_likelihoods[best]
    posterior_mass = sum(math.exp(v - peak) for v in log_likelihoods.values())
    confidence = 1.0 / posterior_mass
    if confidence < threshold:
        return (UNKNOWN, confidence)
    return (best, confidence)
