import json

import pytest
from click.testing import CliRunner

from pattern_forge.cli import main
from pattern_forge.patterns import PatternStore, pattern_file_to_json
from pattern_forge.tables import PARENT_TAG, TargetKind

from conftest import FIXTURE_DOC, position_after


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def doc_file(tmp_path):
    path = tmp_path / "page.html"
    path.write_text(FIXTURE_DOC, encoding="utf-8")
    return str(path)


def blacklist_file(tmp_path):
    """A pattern file that blacklists {ParentTag=figure} => figcaption."""
    store = PatternStore()
    custom = store.add_custom(
        TargetKind.TAG, [(PARENT_TAG, "figure")], "figcaption"
    )
    store.vote(custom.id, "down")
    store.vote(custom.id, "down")
    path = tmp_path / "patterns.json"
    path.write_text(pattern_file_to_json(store.export()), encoding="utf-8")
    return str(path)


class TestLearn:
    def test_prints_rules_for_all_kinds(self, runner, doc_file):
        result = runner.invoke(main, ["learn", doc_file])
        assert result.exit_code == 0
        assert "# tag patterns" in result.output
        assert "# attribute patterns" in result.output
        assert "# value patterns" in result.output
        assert "THEN tag=figcaption" in result.output

    def test_kind_filter(self, runner, doc_file):
        result = runner.invoke(main, ["learn", doc_file, "--kind", "tag"])
        assert result.exit_code == 0
        assert "# attribute patterns" not in result.output

    def test_csv_dump(self, runner, doc_file):
        result = runner.invoke(main, ["learn", doc_file, "--kind", "tag", "--csv"])
        assert result.exit_code == 0
        header = result.output.splitlines()[1]
        assert header.startswith("parent_tag")
        assert header.endswith("target")


class TestComplete:
    def test_json_output(self, runner, doc_file, tmp_path):
        text = FIXTURE_DOC
        marker = '<img src="a.png">\n'
        idx = text.index(marker) + len(marker)
        edited = tmp_path / "edited.html"
        edited_text = text[:idx] + "<\n" + text[idx:]
        edited.write_text(edited_text, encoding="utf-8")
        line, col = position_after(edited_text, marker + "<")
        result = runner.invoke(
            main,
            ["complete", str(edited), "--line", str(line), "--col", str(col)],
        )
        assert result.exit_code == 0
        body = json.loads(result.output)
        assert body["target_kind"] == "tag"
        labels = [i["label"] for i in body["items"]]
        assert "figcaption" in labels

    def test_patterns_file_applied(self, runner, doc_file, tmp_path):
        text = FIXTURE_DOC
        marker = '<img src="a.png">\n'
        idx = text.index(marker) + len(marker)
        edited = tmp_path / "edited.html"
        edited_text = text[:idx] + "<\n" + text[idx:]
        edited.write_text(edited_text, encoding="utf-8")
        line, col = position_after(edited_text, marker + "<")
        patterns = blacklist_file(tmp_path)
        result = runner.invoke(
            main,
            [
                "complete", str(edited),
                "--line", str(line), "--col", str(col),
                "--patterns", patterns,
            ],
        )
        assert result.exit_code == 0
        body = json.loads(result.output)
        assert "figcaption" not in [i["label"] for i in body["items"]]


class TestLint:
    def test_violations_exit_one(self, runner, doc_file):
        result = runner.invoke(main, ["lint", doc_file])
        assert result.exit_code == 1
        assert "VIOLATION" in result.output
        assert "figcaption" in result.output

    def test_json_output(self, runner, doc_file):
        result = runner.invoke(main, ["lint", doc_file, "--json"])
        assert result.exit_code == 1
        sites = json.loads(result.output)
        assert all(s["level"] == "VIOLATION" for s in sites)
        assert all("span" in s and "rule" in s for s in sites)

    def test_clean_file_exits_zero(self, runner, tmp_path):
        path = tmp_path / "clean.html"
        path.write_text(
            "<ul><li>a</li><li>b</li></ul><nav><span>c</span></nav>",
            encoding="utf-8",
        )
        result = runner.invoke(main, ["lint", str(path)])
        assert result.exit_code == 0
        assert result.output == ""

    def test_blacklist_silences_rule(self, runner, doc_file, tmp_path):
        patterns = blacklist_file(tmp_path)
        before = runner.invoke(main, ["lint", doc_file, "--json"])
        after = runner.invoke(
            main, ["lint", doc_file, "--json", "--patterns", patterns]
        )
        rules_before = {s["rule"] for s in json.loads(before.output)}
        rules_after = {s["rule"] for s in json.loads(after.output or "[]")}
        assert any("figcaption" in r for r in rules_before)
        assert not any("figcaption" in r for r in rules_after)


class TestPatternsCommand:
    def test_lists_grouped_patterns(self, runner, doc_file):
        result = runner.invoke(main, ["patterns", doc_file, "--kind", "tag"])
        assert result.exit_code == 0
        body = json.loads(result.output)
        assert body["kind"] == "tag"
        assert body["standard_groups"]
        targets = {
            p["target"]
            for g in body["standard_groups"]
            for p in g["members"]
        }
        assert "figcaption" in targets


class TestExportImport:
    def test_round_trip(self, runner, doc_file, tmp_path):
        src_patterns = blacklist_file(tmp_path)
        out = tmp_path / "exported.json"
        result = runner.invoke(
            main,
            ["export", doc_file, str(out), "--from", src_patterns],
        )
        assert result.exit_code == 0
        exported = json.loads(out.read_text(encoding="utf-8"))
        assert exported["format_version"] == 1
        assert exported["blacklisted"]

        result = runner.invoke(main, ["import", doc_file, str(out), "--kind", "tag"])
        assert result.exit_code == 0
        assert "blacklisted" in result.output
        assert "figcaption" in result.output

    def test_import_rejects_garbage(self, runner, doc_file, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"format_version": 99}', encoding="utf-8")
        result = runner.invoke(main, ["import", doc_file, str(bad)])
        assert result.exit_code != 0
