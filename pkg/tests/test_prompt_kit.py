import pytest

from methodactor.prompt_kit import (
    BRAINSTORM_COUNT,
    FORMAT_TEMPLATES,
    NO_BAD_GUESSES,
    PAPER_TEMPLATES,
    MissingContextField,
    PromptContext,
    PromptTemplate,
    brainstorm_templates,
    file_checksums,
    format_bad_guesses,
    get_template,
    load_catalog,
    next_brainstorm_template,
    render,
    verify_manifest,
)
from methodactor.puzzle_core import Guess

from conftest import CARTOON, DISNEY


@pytest.fixture
def ctx(puzzle430):
    return PromptContext(words=sorted(puzzle430.words))


def test_catalog_complete():
    catalog = load_catalog()
    for tid in PAPER_TEMPLATES + FORMAT_TEMPLATES:
        assert tid in catalog
    assert len(brainstorm_templates()) == BRAINSTORM_COUNT


def test_board_listing_prompts_take_words():
    for tid, t in load_catalog().items():
        # extract and evaluate work from notes alone
        if not tid.endswith(("evaluate", "extract")):
            assert "words" in t.placeholders, tid


def test_manifest_pins_all_files():
    assert verify_manifest() == []
    assert len(file_checksums()) == len(load_catalog()) + BRAINSTORM_COUNT


def test_empty_bad_guesses_block(ctx, puzzle430):
    out = render("vanilla.make_guess", ctx)
    assert NO_BAD_GUESSES in out
    assert ", ".join(sorted(puzzle430.words)) in out
    assert "[[{" not in out


def test_brainstorm_template_one(ctx):
    t, _ = next_brainstorm_template(0)
    out = render("actor.brainstorm", PromptContext(ctx.words, template=t))
    assert "Puzzle words that are all within the same category" in out


def test_missing_notes(ctx):
    with pytest.raises(MissingContextField) as exc:
        render("actor.extract", ctx)
    assert exc.value.name == "notes"


def test_unknown_placeholder_rejected():
    with pytest.raises(ValueError):
        PromptTemplate("x", "Hello [[{surprise}]]")


def test_unknown_template_id():
    with pytest.raises(KeyError):
        get_template("nope")


def test_format_bad_guesses():
    assert format_bad_guesses([]) == NO_BAD_GUESSES
    assert format_bad_guesses([DISNEY]).splitlines()[1:] == ["BUZZ, DAISY, GOOF, MICKEY"]
    two = format_bad_guesses([DISNEY, CARTOON]).splitlines()[1:]
    assert two == ["BUZZ, DAISY, GOOF, MICKEY", "BOO-BOO, DAISY, MICKEY, YOGI"]


def test_bad_guesses_render_into_prompt(ctx):
    out = render("cot.make_guess", PromptContext(ctx.words, bad_guesses=[DISNEY]))
    assert "BUZZ, DAISY, GOOF, MICKEY" in out and NO_BAD_GUESSES not in out


@pytest.mark.parametrize("cursor, index, nxt", [(0, 1, 1), (23, 24, 24), (24, 1, 25), (47, 24, 48)])
def test_cursor_wraps(cursor, index, nxt):
    t, after = next_brainstorm_template(cursor)
    assert (t.index, after) == (index, nxt)


def test_pattern_lines():
    for t in brainstorm_templates():
        assert t.pattern.startswith("Pattern:")


def test_guess_str_matches_prompt_format():
    assert str(Guess(["b", "a", "d", "c"])) == "A, B, C, D"
