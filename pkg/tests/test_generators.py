"""Generator fingerprinting: matching, prevalence, compliance splits."""

import json

import pytest

from policyaudit import (
    ConfigError,
    GeneratorMatchReport,
    GeneratorSpec,
    boilerplate_share,
    compliance_by_generator,
    compliance_by_use,
    detect_generators,
    load_generator_specs,
    match_generators,
    prevalence,
    propose_generator_candidates,
)

from conftest import make_record


@pytest.fixture(scope="module")
def specs():
    return load_generator_specs()


SINGLE = "Erstellt mit dem Datenschutz-Generator von SwissAnwalt für KMU."
MULTI = (
    "Quelle: eRecht24 Datenschutz-Generator, geprüft von SwissAnwalt, "
    "Muster von Datenschutzpartner."
)
NONE = "Diese Datenschutzerklärung wurde von unserer Kanzlei verfasst."


class TestDictionary:
    def test_ships_fourteen_generators(self, specs):
        assert len(specs) == 14
        ids = {s.id for s in specs}
        assert {"swissanwalt", "erecht24", "iubenda", "datenschutzpartner"} <= ids

    def test_custom_dictionary_from_path(self, tmp_path, specs):
        path = tmp_path / "custom.json"
        path.write_text(
            json.dumps(
                [
                    {
                        "id": "acme",
                        "display_name": "ACME Privacy",
                        "country": "CH",
                        "patterns": ["(?i)\\bACME Privacy\\b"],
                    }
                ]
            ),
            encoding="utf-8",
        )
        custom = load_generator_specs(path)
        assert [s.id for s in custom] == ["acme"]
        assert detect_generators("Built by ACME Privacy.", custom) == {"acme"}

    def test_duplicate_ids_rejected(self, tmp_path):
        entry = {
            "id": "dup", "display_name": "Dup", "country": "CH",
            "patterns": ["x"],
        }
        path = tmp_path / "dup.json"
        path.write_text(json.dumps([entry, entry]), encoding="utf-8")
        with pytest.raises(ConfigError):
            load_generator_specs(path)

    def test_spec_requires_patterns(self):
        with pytest.raises(ValueError):
            GeneratorSpec(id="x", display_name="X", country="CH", patterns=())


class TestMatching:
    def test_single_generator(self, specs):
        report = match_generators(SINGLE, specs, doc_id="d1")
        assert report.generator_ids == {"swissanwalt"}
        assert report.doc_id == "d1"

    def test_multi_generator(self, specs):
        assert detect_generators(MULTI, specs) == {
            "erecht24", "swissanwalt", "datenschutzpartner",
        }

    def test_no_generator(self, specs):
        assert detect_generators(NONE, specs) == set()

    def test_word_boundaries(self, specs):
        assert detect_generators("SwissAnwaltverein trifft sich.", specs) == set()

    def test_case_insensitive_names(self, specs):
        assert detect_generators("quelle: SWISSANWALT", specs) == {"swissanwalt"}

    def test_offsets_are_byte_offsets(self, specs):
        # multibyte umlauts before the hit shift byte and char offsets apart
        prefix = "Präambel über Markenrecht: "
        text = prefix + "SwissAnwalt"
        report = match_generators(text, specs)
        offsets = {off for gid, _, off in report.matches if gid == "swissanwalt"}
        assert offsets == {len(prefix.encode("utf-8"))}
        assert len(prefix.encode("utf-8")) > len(prefix)

    def test_matching_is_order_free(self, specs):
        forward = match_generators(MULTI, specs)
        backward = match_generators(MULTI, list(reversed(specs)))
        assert forward.matches == backward.matches


class TestPrevalence:
    def _reports(self, specs):
        texts = {
            "a": SINGLE,          # swissanwalt
            "b": MULTI,           # three generators
            "c": NONE,            # none
            "d": SINGLE,          # swissanwalt
        }
        return [match_generators(t, specs, doc_id=d) for d, t in texts.items()]

    def test_at_least_one_counting(self, specs):
        reports = self._reports(specs)
        doc_group = {d: "CH" for d in "abcd"}
        doc_wave = {d: "AUG2023" for d in "abcd"}
        table = prevalence(
            reports, specs, doc_group, doc_wave,
            policy_totals={("CH", "AUG2023"): 4},
        )
        # b matches three generators but counts once in the footer
        assert table.with_generator[("CH", "AUG2023")] == 3
        counts = {row[0]: row[4] for row in table.rows}
        assert counts["swissanwalt"] == 3  # a, b, d
        assert counts["erecht24"] == 1
        assert counts["iubenda"] == 0

    def test_rows_sorted_by_total_then_id(self, specs):
        reports = self._reports(specs)
        doc_group = {d: "CH" for d in "abcd"}
        doc_wave = {d: "OCT2023" for d in "abcd"}
        table = prevalence(
            reports, specs, doc_group, doc_wave,
            policy_totals={("CH", "OCT2023"): 4},
        )
        totals = [row[4] for row in table.rows]
        assert totals == sorted(totals, reverse=True)
        zero_ids = [row[0] for row in table.rows if row[4] == 0]
        assert zero_ids == sorted(zero_ids)

    def test_documents_outside_the_cohort_ignored(self, specs):
        reports = [match_generators(SINGLE, specs, doc_id="x")]
        table = prevalence(
            reports, specs, doc_group={"x": "EXCLUDED"},
            doc_wave={"x": "AUG2023"}, policy_totals={},
        )
        assert table.with_generator == {}


class TestGeneratorCompliance:
    def _fixture(self, specs):
        reports = [
            match_generators(SINGLE, specs, doc_id="a"),
            match_generators(SINGLE, specs, doc_id="b"),
            match_generators(MULTI, specs, doc_id="c"),
            match_generators(NONE, specs, doc_id="d"),
        ]
        records = [
            make_record("a", contr=True, purp=True),
            make_record("b", contr=True),
            make_record("c", contr=True),
            make_record("d"),
        ]
        return reports, records

    def test_single_only_excludes_multi_generator_docs(self, specs):
        reports, records = self._fixture(specs)
        rows = compliance_by_generator(reports, records, specs)
        by_id = {r.generator_id: r for r in rows}
        assert set(by_id) == {"swissanwalt"}  # c is multi, d unmatched
        row = by_id["swissanwalt"]
        assert row.policies == 2
        assert row.obligation_pct["contr"] == pytest.approx(100.0)
        assert row.obligation_pct["purp"] == pytest.approx(50.0)
        assert row.market_share_pct == pytest.approx(100.0)

    def test_multi_docs_count_everywhere_without_filter(self, specs):
        reports, records = self._fixture(specs)
        rows = compliance_by_generator(reports, records, specs, single_only=False)
        by_id = {r.generator_id: r for r in rows}
        assert by_id["swissanwalt"].policies == 3
        assert by_id["erecht24"].policies == 1
        shares = sum(r.market_share_pct for r in rows)
        assert shares == pytest.approx(100.0)

    def test_non_policy_docs_never_count(self, specs):
        reports = [match_generators(SINGLE, specs, doc_id="a")]
        records = [make_record("a", ispol=False)]
        assert compliance_by_generator(reports, records, specs) == []

    def test_average_is_mean_over_obligations(self, specs):
        reports = [match_generators(SINGLE, specs, doc_id="a")]
        records = [make_record("a", contr=True, purp=True, rect=True)]
        row = compliance_by_generator(reports, records, specs)[0]
        assert row.average_pct == pytest.approx(3 / 7 * 100)


class TestUseCompliance:
    def test_partition_and_totals(self, specs):
        reports = [
            match_generators(SINGLE, specs, doc_id="a"),
            match_generators(NONE, specs, doc_id="b"),
        ]
        records = [
            make_record("a", contr=True),
            make_record("b", contr=True, purp=True),
            make_record("c"),
            make_record("d", ispol=False),
        ]
        table = compliance_by_use(reports, records)
        assert table.totals == {"yes": 1, "no": 2}
        assert table.cells["contr"]["yes"] == (1, 1)
        assert table.cells["contr"]["no"] == (1, 2)
        assert table.cells["purp"]["no"] == (1, 2)
        # every ispol=true policy lands on exactly one side
        assert table.totals["yes"] + table.totals["no"] == 3


class TestCandidateDiscovery:
    def _record(self, doc_id, org):
        return make_record(
            doc_id,
            source="remote_llm",
            backend_id="m",
            raw_payload=json.dumps({"org": org}),
        )

    def test_normalized_grouping_and_ranking(self):
        records = [
            self._record("a", "SwissAnwalt "),
            self._record("b", "swissanwalt"),
            self._record("c", "eRecht24"),
            self._record("d", ""),
            make_record("e"),  # no payload at all
        ]
        candidates = propose_generator_candidates(records)
        assert [c.raw_string for c in candidates] == ["swissanwalt", "erecht24"]
        assert candidates[0].frequency == 2
        assert candidates[0].example_doc_ids == ("a", "b")

    def test_ties_break_alphabetically(self):
        records = [
            self._record("a", "zeta"),
            self._record("b", "alpha"),
        ]
        candidates = propose_generator_candidates(records)
        assert [c.raw_string for c in candidates] == ["alpha", "zeta"]

    def test_example_ids_capped(self):
        records = [self._record(f"d{i}", "tool") for i in range(9)]
        candidates = propose_generator_candidates(records, max_examples=3)
        assert len(candidates[0].example_doc_ids) == 3
        assert candidates[0].frequency == 9


class TestBoilerplate:
    def test_whitespace_normalized_matching(self):
        phrase = "Erstellt mit dem   Generator"
        docs = ["Erstellt mit dem\nGenerator von X", "Etwas anderes"]
        assert boilerplate_share(docs, phrase) == 0.5

    def test_no_case_folding(self):
        docs = ["erstellt mit dem generator"]
        assert boilerplate_share(docs, "Erstellt mit dem Generator") == 0.0

    def test_empty_phrase_rejected(self):
        with pytest.raises(ConfigError):
            boilerplate_share(["text"], "")

    def test_accepts_documents_with_text_attribute(self):
        from conftest import make_doc

        docs = [make_doc(text="Erstellt mit dem Generator im Test hier.")]
        assert boilerplate_share(docs, "mit dem Generator") == 1.0


class TestMatchReport:
    def test_generator_ids_derived_from_matches(self):
        report = GeneratorMatchReport(
            doc_id="d",
            matches=frozenset({("a", 0, 3), ("a", 1, 9), ("b", 0, 0)}),
        )
        assert report.generator_ids == {"a", "b"}
