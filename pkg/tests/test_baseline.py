"""Keyword baseline annotator: deterministic, gated, multilingual."""

from datetime import date

from policyaudit import annotate_baseline

from conftest import make_doc


POLICY_DE = (
    "Datenschutzerklärung. Verantwortlicher ist die Muster AG. Wir "
    "verarbeiten Daten zu folgenden Zwecken: Support. Sie haben ein "
    "Auskunftsrecht und können die Löschung verlangen. Es besteht ein "
    "Recht auf Datenübertragbarkeit und auf Beschwerde bei der "
    "Aufsichtsbehörde. Stand: 15.08.2023"
)


class TestBaselineAnnotation:
    def test_german_policy_keywords(self):
        record = annotate_baseline(make_doc(text=POLICY_DE))
        assert record.source == "baseline"
        assert record.backend_id == "keyword-baseline-v1"
        assert record.ispol
        assert record.contr and record.purp and record.rect
        assert record.forg and record.port and record.comp
        assert not record.hum
        assert record.upd == date(2023, 8, 15)

    def test_english_policy_keywords(self):
        text = (
            "Privacy policy. The data controller is Example Ltd. We process "
            "personal data for several purposes. You may lodge a complaint "
            "with the supervisory authority and request human intervention "
            "for any automated decision. Last updated: 2023-10-01"
        )
        record = annotate_baseline(make_doc(text=text))
        assert record.ispol and record.contr and record.purp
        assert record.comp and record.hum
        assert record.upd == date(2023, 10, 1)

    def test_french_and_italian_policy_keywords(self):
        fr = annotate_baseline(
            make_doc(
                text=(
                    "Politique de confidentialité. Le responsable du "
                    "traitement traite vos données. Vous disposez d'un droit "
                    "d'accès et d'un droit à la portabilité."
                )
            )
        )
        assert fr.ispol and fr.contr and fr.rect and fr.port
        it = annotate_baseline(
            make_doc(
                text=(
                    "Informativa sulla privacy. Il titolare del trattamento "
                    "illustra le finalità. Potete chiedere la cancellazione "
                    "e proporre reclamo."
                )
            )
        )
        assert it.ispol and it.contr and it.purp and it.forg and it.comp

    def test_non_policy_page_is_all_false(self):
        text = (
            "Willkommen in unserem Online-Shop. Entdecken Sie Angebote und "
            "Zubehör. Schnelle Lieferung in die ganze Schweiz."
        )
        record = annotate_baseline(make_doc(text=text))
        assert not record.ispol
        assert not any(
            (record.contr, record.purp, record.rect, record.forg,
             record.port, record.comp, record.hum)
        )
        assert record.upd is None

    def test_cascade_applies_even_with_obligation_keywords(self):
        # obligation vocabulary without any policy marker: ispol=false
        # forces the other answers off
        text = "Der Zweck dieser Seite: Beschwerde-Formulare zum Download."
        record = annotate_baseline(make_doc(text=text))
        assert not record.ispol
        assert not record.purp and not record.comp
        assert record.upd is None

    def test_case_insensitive_matching(self):
        text = "PRIVACY POLICY: the DATA CONTROLLER is Example Ltd."
        record = annotate_baseline(make_doc(text=text))
        assert record.ispol and record.contr

    def test_most_recent_date_wins(self):
        text = (
            "Datenschutzerklärung, Fassung vom 01.01.2021, zuletzt geändert "
            "am 3. Oktober 2023, erste Version 2019-05-04."
        )
        record = annotate_baseline(make_doc(text=text))
        assert record.upd == date(2023, 10, 3)

    def test_deterministic_and_repeatable(self):
        doc = make_doc(text=POLICY_DE)
        first = annotate_baseline(doc)
        second = annotate_baseline(doc)
        assert first == second
        assert first.created_at is None  # reruns stay byte-identical

    def test_raw_payload_lists_hits(self):
        record = annotate_baseline(make_doc(text=POLICY_DE))
        assert "datenschutzerklärung" in record.raw_payload
