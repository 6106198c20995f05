import json
import shutil

import pytest

from almostflat.cli import main
from almostflat.corpus import (
    CorpusEntry,
    DocumentError,
    GroupEntry,
    load_document,
    parse_document,
    run_corpus,
    shipped_corpus_dir,
)

CORPUS = shipped_corpus_dir()


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj), encoding="utf-8")
    return path


def flat_doc(**over):
    doc = {
        "schema": 1,
        "label": "flat",
        "citation": "test entry [TRIVIAL]",
        "dim": 4,
        "nilpotency_class": 1,
        "orientable": True,
        "spin": True,
        "holonomy_gens": [[1, 0, 0, 0, 0, 1, 0, 0, 0, 0, -1, 0, 0, 0, 0, -1]],
        "affine_parts": [["1/2", "0", "0", "0"]],
    }
    doc.update(over)
    return doc


class TestShippedCorpus:
    def test_required_entries_present(self):
        names = {p.name for p in CORPUS.glob("*.json")}
        assert {"torus.json", "c2_halfturn.json", "ab_case5_z2.json",
                "flat_z2_b1_2.json", "nil_heisenberg_x_s1.json"} <= names

    @pytest.mark.parametrize("path", sorted(CORPUS.glob("*.json")), ids=lambda p: p.name)
    def test_entry_metadata(self, path):
        entry = load_document(path)
        assert entry.citation.strip()
        assert entry.expected and "b1" in entry.expected
        assert any(tag in entry.citation for tag in ("[LIT", "[DERIVED", "[TRIVIAL"))

    def test_underlying_ref(self):
        entry = load_document(CORPUS / "ab_case5_z2.json")
        assert isinstance(entry, CorpusEntry)
        assert entry.descriptor.underlying is not None
        assert entry.descriptor.spin is False

    def test_group_entry(self):
        entry = load_document(CORPUS / "c2_halfturn.json")
        assert isinstance(entry, GroupEntry)
        assert entry.summary() == {"label": "C2", "kind": "group", "h1": "Z + Z/2 + Z/2",
                                   "b1": 1, "routes": ["holonomy", "presentation"]}


class TestDocumentValidation:
    def test_valid(self):
        entry = parse_document(flat_doc())
        assert entry.descriptor.underlying.dim == 4

    @pytest.mark.parametrize("over, fragment", [
        ({"schema": 2}, "schema"),
        ({"colour": "red"}, "unknown field"),
        ({"kind": "spaceship"}, "unknown kind"),
        ({"nilpotency_class": "1"}, "must be an integer"),
        ({"holonomy_gens": [[1, 0, 0]]}, "needs 16 integers"),
        ({"holonomy_gens": [[2, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1]], "affine_parts": [["0"] * 4]},
         "determinant"),
        ({"affine_parts": [["1/0", "0", "0", "0"]]}, "invalid rational"),
        ({"presentation": "< a | b >"}, "unknown generator"),
        ({"underlying": {"dim": 3, "holonomy_gens": []}}, "not both"),
        ({"expected": {"b3": 1}}, "unknown field"),
    ])
    def test_rejections(self, over, fragment):
        with pytest.raises(DocumentError) as exc:
            parse_document(flat_doc(**over))
        assert fragment in str(exc.value)

    def test_missing_schema(self):
        doc = flat_doc()
        del doc["schema"]
        with pytest.raises(DocumentError):
            parse_document(doc)

    def test_json_position(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{\n  "schema": 1,\n  "label": \n}', encoding="utf-8")
        with pytest.raises(DocumentError) as exc:
            load_document(path)
        assert (exc.value.line, exc.value.col) == (4, 1)

    def test_ref_cycle(self, tmp_path):
        write(tmp_path, "a.json", {"schema": 1, "label": "a", "nilpotency_class": 2,
                                   "orientable": True, "spin": True, "underlying": {"ref": "a.json"}})
        with pytest.raises(DocumentError) as exc:
            load_document(tmp_path / "a.json")
        assert "reference cycle" in str(exc.value)

    def test_group_route_mismatch(self):
        doc = {"schema": 1, "kind": "group", "label": "bad", "dim": 1,
               "holonomy_gens": [], "presentation": "< a | a^2 >"}
        with pytest.raises(DocumentError):
            parse_document(doc)


class TestRunCorpus:
    def test_shipped_all_pass(self):
        rows = run_corpus(CORPUS)
        assert rows and all(r["status"] == "PASS" for r in rows), rows

    def test_planted_mismatch(self, tmp_path):
        for p in CORPUS.glob("*.json"):
            shutil.copy(p, tmp_path)
        write(tmp_path, "planted.json",
              flat_doc(label="planted", expected={"b1": 2, "form": {"type": "zero", "n": 0}}))
        rows = run_corpus(tmp_path)
        bad = [r for r in rows if r["status"] != "PASS"]
        assert [r["label"] for r in bad] == ["planted"]
        assert bad[0]["status"] == "FAIL"

    def test_bad_entry_isolated(self, tmp_path):
        shutil.copy(CORPUS / "torus.json", tmp_path)
        (tmp_path / "aaa_broken.json").write_text("{", encoding="utf-8")
        rows = run_corpus(tmp_path)
        assert [r["status"] for r in rows] == ["ERROR", "PASS"]

    def test_parallel_matches_serial(self):
        assert run_corpus(CORPUS, parallel=3) == run_corpus(CORPUS)


class TestCli:
    def run(self, capsys, *argv):
        code = main(list(argv))
        out, err = capsys.readouterr()
        return code, out, err

    def test_analyze_torus(self, capsys):
        code, out, _ = self.run(capsys, "--format", "json", "analyze", str(CORPUS / "torus.json"))
        assert code == 0
        report = json.loads(out)
        assert report["b1"] == 4 and report["form"] == {"type": "hyperbolic", "n": 3}

    def test_analyze_case5_text(self, capsys):
        code, out, _ = self.run(capsys, "analyze", str(CORPUS / "ab_case5_z2.json"))
        assert code == 0
        assert "AB-case5-Z2" in out and "| 0" in out

    def test_analyze_corrupted(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"schema": 1,\n "label": }', encoding="utf-8")
        code, out, err = self.run(capsys, "analyze", str(path))
        assert code == 1
        assert out == ""
        assert f"{path}:2:" in err

    def test_analyze_mismatch(self, capsys, tmp_path):
        path = write(tmp_path, "m.json", flat_doc(expected={"b1": 3}))
        code, _, err = self.run(capsys, "analyze", str(path))
        assert code == 2
        assert "expectation mismatch" in err

    def test_analyze_spin_flag(self, capsys, tmp_path):
        path = write(tmp_path, "s.json", flat_doc(spin=False))
        assert self.run(capsys, "analyze", str(path))[0] == 1
        code, _, err = self.run(capsys, "--no-strict-spin", "analyze", str(path))
        assert code == 0 and "warning" in err
        # flags are also accepted after the subcommand
        assert self.run(capsys, "analyze", "--no-strict-spin", str(path))[0] == 0

    def test_analyze_list_file(self, capsys, tmp_path):
        path = write(tmp_path, "many.json", [flat_doc(label="a"), flat_doc(label="b")])
        code, out, _ = self.run(capsys, "--format", "json", "analyze", str(path))
        assert code == 0
        assert [r["label"] for r in json.loads(out)] == ["a", "b"]

    def test_abelianize(self, capsys):
        assert self.run(capsys, "abelianize", "< a,b | [a,b] >")[1] == "Z^2\n"
        c2 = json.loads((CORPUS / "c2_halfturn.json").read_text())["presentation"]
        assert self.run(capsys, "abelianize", c2)[1] == "Z + Z/2 + Z/2\n"

    def test_abelianize_json_and_error(self, capsys):
        code, out, _ = self.run(capsys, "--format", "json", "abelianize", "< a | a^2 >")
        assert json.loads(out)["torsion"] == [2]
        code, out, err = self.run(capsys, "abelianize", "< a | a^ >")
        assert code == 1 and "position 9" in err

    def test_form(self, capsys, tmp_path):
        h = tmp_path / "h.txt"
        h.write_text("2 2\n0 1\n1 0\n", encoding="utf-8")
        assert self.run(capsys, "form", str(h), "classify")[1] == "1H\n"
        assert self.run(capsys, "form", str(h), "signature")[1] == "0\n"
        assert self.run(capsys, "form", str(h), "even")[1] == "true\n"
        asym = tmp_path / "a.txt"
        asym.write_text("2 2\n0 1\n2 0\n", encoding="utf-8")
        assert self.run(capsys, "form", str(asym), "classify")[0] == 1

    def test_snf(self, capsys, tmp_path):
        m = tmp_path / "m.txt"
        m.write_text("2 2\n2 0\n0 3\n", encoding="utf-8")
        code, out, _ = self.run(capsys, "snf", str(m))
        assert code == 0 and out.startswith("d: 1 6\n")
        code, out, _ = self.run(capsys, "--format", "json", "snf", str(m))
        assert json.loads(out)["d"] == [1, 6]

    def test_corpus_run(self, capsys):
        code, out, _ = self.run(capsys, "corpus-run")
        assert code == 0
        assert "0 fail, 0 error" in out

    def test_corpus_run_empty(self, capsys, tmp_path):
        code, out, err = self.run(capsys, "corpus-run", str(tmp_path))
        assert code == 0
        assert "warning" in err
        assert "0 entries" in out

    def test_corpus_run_planted(self, capsys, tmp_path):
        write(tmp_path, "planted.json",
              flat_doc(label="planted", expected={"b1": 2, "form": {"type": "zero", "n": 0}}))
        code, out, _ = self.run(capsys, "corpus-run", str(tmp_path))
        assert code == 2
        assert "FAIL" in out

    def test_json_deterministic(self, capsys):
        outs = {self.run(capsys, "--format", "json", "--parallel", str(p), "corpus-run")[1]
                for p in (1, 1, 4)}
        assert len(outs) == 1
