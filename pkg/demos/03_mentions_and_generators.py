"""Which laws do policies cite, and which generator tools wrote them?

Two curated dictionaries drive this: legal terms (GDPR and FADP synonyms
across German, English, French, and Italian) and generator fingerprints
(vendor names and domains that generator tools leave in their boilerplate).
Both matchers are word-boundary aware, so "SwissAnwaltverein" is not a
SwissAnwalt hit, and acronyms like DSG stay case-sensitive while long forms
match case-insensitively.
"""

from policyaudit import (
    compliance_by_generator,
    compliance_by_use,
    detect_mentions,
    load_generator_specs,
    load_term_dictionaries,
    match_generators,
    prevalence,
)
from policyaudit.codebook import AnnotationRecord
from policyaudit.reports import (
    prevalence_rows,
    render_markdown,
    use_compliance_rows,
)

SNIPPETS = {
    "kanzlei.ch": (
        "Diese Datenschutzerklärung richtet sich nach der DSGVO und dem "
        "neuen Datenschutzgesetz der Schweiz. Erstellt mit swissanwalt.ch."
    ),
    "boutique.ch": (
        "Politique de confidentialité conforme au RGPD et à la LPD. "
        "Générée via le service Datenschutzpartner."
    ),
    "negozio.ch": (
        "Informativa redatta secondo il regolamento generale sulla "
        "protezione dei dati. Fonte: eRecht24 und SwissAnwalt."
    ),
    "blog.ch": "Wir bloggen über Wanderwege und veröffentlichen Rezepte.",
}


def run():
    dictionaries = load_term_dictionaries()
    specs = load_generator_specs()
    print(f"{sum(len(d.terms) for d in dictionaries)} legal terms, "
          f"{len(specs)} generator fingerprints\n")

    print("## Law mentions per document\n")
    for doc_id, text in SNIPPETS.items():
        report = detect_mentions(text, dictionaries, doc_id=doc_id)
        laws = ", ".join(sorted(report.mentions)) or "none"
        terms = ", ".join(term for _, term, _ in sorted(report.matched_terms))
        print(f"  {doc_id:12s} {laws:12s} ({terms or 'no terms'})")

    print("\n## Generator matches per document\n")
    match_reports = []
    for doc_id, text in SNIPPETS.items():
        report = match_generators(text, specs, doc_id=doc_id)
        match_reports.append(report)
        ids = ", ".join(sorted(report.generator_ids)) or "none"
        print(f"  {doc_id:12s} {ids}")

    # every snippet is an August-wave Swiss policy for the toy tables below
    doc_group = {doc_id: "CH" for doc_id in SNIPPETS}
    doc_wave = {doc_id: "AUG2023" for doc_id in SNIPPETS}
    records = [
        AnnotationRecord(
            doc_id=doc_id, source="human", backend_id="demo", ispol=True,
            upd=None, contr=True, purp=True, rect=(i % 2 == 0),
            forg=False, port=False, comp=(i < 2), hum=False,
        )
        for i, doc_id in enumerate(SNIPPETS)
    ]

    table = prevalence(
        match_reports, specs, doc_group, doc_wave,
        policy_totals={("CH", "AUG2023"): len(SNIPPETS)},
        groups=("CH",), waves=("AUG2023",),
    )
    header, rows = prevalence_rows(table)
    print("\n## Prevalence (documents counted once, however many tools match)\n")
    print(render_markdown(header, rows))

    print("## Compliance with vs without a generator\n")
    header, rows = use_compliance_rows(compliance_by_use(match_reports, records))
    print(render_markdown(header, rows))

    print("## Per-generator compliance (multi-tool documents excluded)\n")
    for row in compliance_by_generator(match_reports, records, specs):
        print(
            f"  {row.display_name:20s} {row.country}  policies={row.policies}  "
            f"average={row.average_pct:.1f}%  market share={row.market_share_pct:.0f}%"
        )


if __name__ == "__main__":
    run()
