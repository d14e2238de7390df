import io
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from methodactor.dataset import (
    DifficultyBucket,
    DuplicateId,
    ParseError,
    ValidationError,
    dataset_summary,
    difficulty_bucket,
    dump_archive,
    load_archive,
    load_archive_file,
)
from methodactor.puzzle_core import DuplicateWord, puzzle_to_record

from conftest import FIXTURES


def test_fixture_archive_holds_430():
    (p,) = load_archive_file(FIXTURES / "archive.json")
    assert p.id == 430 and p.difficulty == 3.0


def test_empty_and_duplicate(puzzle430):
    assert load_archive("[]") == []
    rec = puzzle_to_record(puzzle430)
    with pytest.raises(DuplicateId):
        load_archive(json.dumps([rec, rec]))


def test_parse_error_reports_byte_offset():
    text = '[{"id": "é"}, oops]'
    with pytest.raises(ParseError) as exc:
        load_archive(text.encode())
    assert exc.value.offset == text.encode().index(b"oops")


def test_validation_error_names_puzzle(puzzle430):
    rec = puzzle_to_record(puzzle430)
    rec["groups"][2]["words"][0] = "GOOF"
    with pytest.raises(ValidationError) as exc:
        load_archive(io.BytesIO(json.dumps([rec]).encode()))
    assert exc.value.puzzle_id == 430
    assert isinstance(exc.value.cause, DuplicateWord)


def test_sorted_by_id_and_dump_round_trip(e2e_puzzles):
    shuffled = json.dumps([puzzle_to_record(p) for p in reversed(e2e_puzzles)])
    loaded = load_archive(shuffled)
    assert [p.id for p in loaded] == [430, 9001, 9002]
    assert load_archive(dump_archive(loaded)) == loaded


@pytest.mark.parametrize(
    "rating, bucket",
    [
        (1.6, DifficultyBucket.BELOW_2_5),
        (2.4999, DifficultyBucket.BELOW_2_5),
        (2.5, DifficultyBucket.FROM_2_5_TO_3),
        (3.0, DifficultyBucket.FROM_3_TO_3_5),
        (3.5, DifficultyBucket.ABOVE_3_5),
        (4.2, DifficultyBucket.ABOVE_3_5),
    ],
)
def test_difficulty_bucket(rating, bucket):
    assert difficulty_bucket(rating) is bucket


def test_difficulty_bucket_rejects_non_positive():
    with pytest.raises(ValueError):
        difficulty_bucket(0)


@given(st.floats(min_value=0.01, max_value=10, allow_nan=False))
def test_bucket_matches_threshold_count(x):
    # independent oracle: number of thresholds at or below the rating
    assert difficulty_bucket(x) == sum(x >= t for t in (2.5, 3.0, 3.5))


def _with_rating(puzzle, rating, pid):
    rec = puzzle_to_record(puzzle)
    rec["id"], rec["difficulty"] = pid, rating
    return rec


def test_summary(puzzle430):
    assert dataset_summary([]) == {b: 0 for b in DifficultyBucket}
    recs = [_with_rating(puzzle430, r, i) for i, r in enumerate([1.6, 2.5, 3.0, 3.5])]
    assert list(dataset_summary(load_archive(json.dumps(recs))).values()) == [1, 1, 1, 1]


def test_summary_shape_of_a_100_puzzle_set(puzzle430):
    """Ratings spread over 1.6..4.2 in the reported bucket sizes 28/26/33/13."""
    ratings = (
        [1.6 + 0.03 * i for i in range(28)]
        + [2.5 + 0.019 * i for i in range(26)]
        + [3.0 + 0.015 * i for i in range(33)]
        + [3.5 + 0.058 * i for i in range(13)]
    )
    assert min(ratings) == 1.6 and max(ratings) <= 4.2
    recs = [_with_rating(puzzle430, round(r, 3), i) for i, r in enumerate(ratings)]
    assert list(dataset_summary(load_archive(json.dumps(recs))).values()) == [28, 26, 33, 13]
