import pytest

from pattern_forge import parse
from pattern_forge.completion import (
    CompletionEngine,
    classify_target,
    tokenize_line,
)
from pattern_forge.patterns import PatternStore
from pattern_forge.tables import PARENT_TAG, TargetKind, parent_attr_key

from conftest import FIXTURE_DOC, position_after

Tag, Attr, Val = TargetKind.TAG, TargetKind.ATTRIBUTE, TargetKind.VALUE

# decision table over the tokens preceding the cursor
DECISION_TABLE = [
    ("<span class=\"content\" ", Attr),  # (tag)(whsp)(attribute)(value)(whsp)
    ("<", Tag),
    ("<meta content=\"", Val),
    ("<fi", Tag),                        # partial tag name
    ("<div ", Attr),                     # (tag)(whsp)
    ("<div cl", Attr),                   # partial attribute
    ("<input disabled ", Attr),          # valueless attribute then whitespace
    ("<a href=", Val),                   # equals, no quote yet
    ("<a href='x", Val),                 # inside single-quoted value
    ("<a href=\"x\" id=\"y\" ", Attr),   # after several pairs
    ("plain text", None),
    ("<div>", None),                     # after tag-close
    ("<div>text", None),                 # inside element text
    ("</", None),                        # closing tags are not completed
    ("<a href=\"done\"", None),          # terminated value, no whitespace yet
    ("", None),
]


@pytest.mark.parametrize("prefix,expected", DECISION_TABLE)
def test_classify_target_decision_table(prefix, expected):
    assert classify_target(prefix) == expected


def test_tokenizer_reproduces_prefix():
    for prefix, _ in DECISION_TABLE:
        tokens = tokenize_line(prefix)
        assert "".join(t.lexeme for t in tokens) == prefix


def test_tokenizer_total_over_fixture_prefixes():
    for line in FIXTURE_DOC.splitlines():
        for col in range(len(line) + 1):
            prefix = line[:col]
            tokens = tokenize_line(prefix)
            assert "".join(t.lexeme for t in tokens) == prefix
            classify_target(prefix)  # must not raise


def typed(text, marker, insertion):
    """Insert text right after marker and return (new_text, cursor line, col)."""
    idx = text.index(marker) + len(marker)
    new_text = text[:idx] + insertion + "\n" + text[idx:]
    line, col = position_after(new_text, marker + insertion)
    return new_text, line, col


def fresh_engine():
    store = PatternStore()
    return store, CompletionEngine(store)


class TestComplete:
    def test_class_suggested_first_for_div_under_section(self):
        text, line, col = typed(FIXTURE_DOC, '<section class="content">\n', "<div ")
        store, engine = fresh_engine()
        result = engine.complete(parse(text, version=1), line, col)
        assert result.target_kind is Attr
        assert result.items[0].label == "class"
        assert result.current_pattern is not None
        assert result.current_pattern.target == "class"

    def test_blacklisted_target_hidden(self):
        text, line, col = typed(FIXTURE_DOC, '<img src="a.png">\n', "<")
        doc = parse(text, version=1)
        store, engine = fresh_engine()
        before = engine.complete(doc, line, col)
        assert "figcaption" in [i.label for i in before.items]
        pattern = next(
            p for p in store.standard(Tag)
            if p.target == "figcaption" and (PARENT_TAG, "figure") in p.conditions
        )
        store.vote(pattern.id, "down")
        after = engine.complete(doc, line, col)
        assert "figcaption" not in [i.label for i in after.items]

    def test_prioritized_custom_pattern_listed_first(self):
        text = FIXTURE_DOC.replace(
            '<figure>\n<img src="c.png">', '<figure class="large_fig">\n<img src="c.png">'
        )
        text, line, col = typed(text, '<img src="c.png">\n', "<")
        doc = parse(text, version=1)
        store, engine = fresh_engine()
        store.add_custom(
            Tag,
            [(PARENT_TAG, "figure"), (parent_attr_key("class"), "large_fig")],
            "figcaption",
        )
        result = engine.complete(doc, line, col)
        assert result.items[0].label == "figcaption"
        assert result.items[0].origin == "prioritized"
        assert result.current_pattern is not None
        assert result.current_pattern.target == "figcaption"

    def test_prioritized_overrides_blacklist(self):
        text = FIXTURE_DOC.replace(
            '<figure>\n<img src="c.png">', '<figure class="large_fig">\n<img src="c.png">'
        )
        text, line, col = typed(text, '<img src="c.png">\n', "<")
        doc = parse(text, version=1)
        store, engine = fresh_engine()
        engine.complete(doc, line, col)
        general = next(
            p for p in store.standard(Tag)
            if p.target == "figcaption" and (PARENT_TAG, "figure") in p.conditions
        )
        store.vote(general.id, "down")
        store.add_custom(
            Tag,
            [(PARENT_TAG, "figure"), (parent_attr_key("class"), "large_fig")],
            "figcaption",
        )
        result = engine.complete(doc, line, col)
        assert result.items[0].label == "figcaption"
        assert result.items[0].origin == "prioritized"

    def test_prefix_filtering_case_insensitive(self):
        text, line, col = typed(FIXTURE_DOC, '<img src="a.png">\n', "<FIG")
        store, engine = fresh_engine()
        result = engine.complete(parse(text, version=1), line, col)
        labels = [i.label for i in result.items]
        assert labels[0] == "figcaption"
        assert all(l.lower().startswith("fig") for l in labels)

    def test_existing_attributes_excluded(self):
        text, line, col = typed(
            FIXTURE_DOC, '<section class="content">\n', '<div class="x" '
        )
        store, engine = fresh_engine()
        result = engine.complete(parse(text, version=1), line, col)
        assert "class" not in [i.label for i in result.items]

    def test_no_completion_in_text(self):
        line, col = position_after(FIXTURE_DOC, "Welcome")
        store, engine = fresh_engine()
        result = engine.complete(parse(FIXTURE_DOC, version=1), line, col)
        assert result.target_kind is None
        assert result.items == ()

    def test_value_completion_for_meta_content(self):
        text, line, col = typed(FIXTURE_DOC, "<head>\n", '<meta content="')
        store, engine = fresh_engine()
        result = engine.complete(parse(text, version=1), line, col)
        assert result.target_kind is Val
        assert "Graphics Design Co" in [i.label for i in result.items]

    def test_ordering_invariant(self):
        text = FIXTURE_DOC.replace(
            '<figure>\n<img src="c.png">', '<figure class="large_fig">\n<img src="c.png">'
        )
        text, line, col = typed(text, '<img src="c.png">\n', "<")
        doc = parse(text, version=1)
        store, engine = fresh_engine()
        store.add_custom(
            Tag,
            [(PARENT_TAG, "figure"), (parent_attr_key("class"), "large_fig")],
            "figcaption",
        )
        result = engine.complete(doc, line, col)
        origins = [i.origin for i in result.items]
        assert origins == sorted(origins, key=lambda o: 0 if o == "prioritized" else 1)
        learned = [i.confidence for i in result.items if i.origin == "learned"]
        assert learned == sorted(learned, reverse=True)

    def test_blacklist_soundness(self):
        text, line, col = typed(FIXTURE_DOC, '<img src="a.png">\n', "<")
        doc = parse(text, version=1)
        store, engine = fresh_engine()
        engine.complete(doc, line, col)
        for p in list(store.standard(Tag)):
            if p.target == "p":
                store.vote(p.id, "down")
        result = engine.complete(doc, line, col)
        for item in result.items:
            assert item.label != "p" or item.origin == "prioritized"

    def test_explanation_soundness(self):
        text, line, col = typed(FIXTURE_DOC, '<section class="content">\n', "<div ")
        doc = parse(text, version=1)
        store, engine = fresh_engine()
        result = engine.complete(doc, line, col)
        assert result.current_pattern.target == result.items[0].label
        # conditions must hold in the rebuilt context
        trained = engine.ensure_trained(doc, Attr)
        from pattern_forge.completion import _classify

        prefix = "<div "
        target = _classify(tokenize_line(prefix))
        context = engine.build_context(doc, line, col, target, trained.tree.columns)
        assert result.current_pattern.applies_to(context)


class TestLazyRetrain:
    def test_edit_flips_leaf_majority(self):
        store, engine = fresh_engine()
        text1, line, col = typed(FIXTURE_DOC, '<img src="a.png">\n', "<")
        doc1 = parse(text1, version=1)
        first = engine.complete(doc1, line, col)
        assert first.items[0].label == "img"
        # add figcaptions until they outnumber img rows under figure
        text2 = text1.replace(
            "<figcaption>Barry's chart</figcaption>",
            "<figcaption>Barry's chart</figcaption>\n"
            "<figcaption>alt one</figcaption>\n<figcaption>alt two</figcaption>",
        )
        doc2 = parse(text2, version=2)
        line2, col2 = position_after(text2, '<img src="a.png">\n<')
        second = engine.complete(doc2, line2, col2)
        assert second.items[0].label == "figcaption"

    def test_trees_never_stale(self):
        store, engine = fresh_engine()
        text, line, col = typed(FIXTURE_DOC, '<img src="a.png">\n', "<")
        doc = parse(text, version=7)
        engine.complete(doc, line, col)
        assert engine.ensure_trained(doc, Tag).tree.trained_on_version == 7
        doc2 = parse(text, version=8)
        engine.complete(doc2, line, col)
        assert engine.ensure_trained(doc2, Tag).tree.trained_on_version == 8

    def test_blacklist_epoch_triggers_retrain(self):
        store, engine = fresh_engine()
        text, line, col = typed(FIXTURE_DOC, '<img src="a.png">\n', "<")
        doc = parse(text, version=1)
        engine.complete(doc, line, col)
        tree_before = engine.ensure_trained(doc, Tag).tree
        pattern = next(
            p for p in store.standard(Tag)
            if p.target == "figcaption" and (PARENT_TAG, "figure") in p.conditions
        )
        store.vote(pattern.id, "down")
        engine.complete(doc, line, col)
        tree_after = engine.ensure_trained(doc, Tag).tree
        assert tree_after is not tree_before
