"""Channel naming, wire-line parsing and replay source behavior."""
from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from newsmosaic.edits import (
    EditEvent,
    InvalidLanguageError,
    ReplaySource,
    StreamParseError,
    channel_for_language,
    parse_irc_line,
    privmsg_payload,
    replay_stream,
    serialize_event,
    strip_control_codes,
)

EXAMPLE_LINE = (
    "[[2014 Winter Olympics]]  https://en.wikipedia.org/w/index.php?diff=1&oldid=0"
    " * Alice * (+58) /* Results */"
)


# ------------------------------------------------------------------
# channel_for_language
# ------------------------------------------------------------------


@pytest.mark.parametrize(
    "language,expected",
    [
        ("en", "#en.wikipedia"),
        ("ru", "#ru.wikipedia"),
        ("wikidata", "#wikidata.wikipedia"),
    ],
)
def test_channel_pattern(language, expected):
    assert channel_for_language(language) == expected


@pytest.mark.parametrize("bad", ["", "e n", " en", "EN", "\ten"])
def test_channel_rejects_unusable_codes(bad):
    with pytest.raises(InvalidLanguageError):
        channel_for_language(bad)


# ------------------------------------------------------------------
# parse_irc_line
# ------------------------------------------------------------------


def test_parse_full_line():
    event = parse_irc_line("#en.wikipedia", EXAMPLE_LINE, 1234)
    assert event.language == "en"
    assert event.title == "2014 Winter Olympics"
    assert event.editor == "Alice"
    assert event.byte_delta == 58
    assert event.comment == "/* Results */"
    assert event.timestamp == 1234
    assert event.flags == ""
    # round-trip oracle: the serializer reproduces the canonical line
    assert serialize_event(event) == EXAMPLE_LINE


def test_parse_zero_delta_flags_empty_comment():
    line = "[[Olympische Winterspiele 2014]] M https://de.wikipedia.org/x * Bob * (0) "
    event = parse_irc_line("#de.wikipedia", line, 7)
    assert event.byte_delta == 0
    assert event.flags == "M"
    assert event.comment == ""
    assert serialize_event(event) == line


def test_parse_negative_delta():
    line = "[[X]]  https://u * Eve * (-120) trim"
    event = parse_irc_line("#en.wikipedia", line, 9)
    assert event.byte_delta == -120
    assert serialize_event(event) == line


@pytest.mark.parametrize(
    "line",
    [
        "no brackets here",
        "[[Title]] no editor markers",
        "[[Title]]  url * Editor * (notanint) c",
    ],
)
def test_parse_errors_carry_line(line):
    with pytest.raises(StreamParseError) as excinfo:
        parse_irc_line("#en.wikipedia", line, 1)
    assert excinfo.value.line == line


def test_parse_rejects_bad_channel():
    with pytest.raises(InvalidLanguageError):
        parse_irc_line("#notachannel", EXAMPLE_LINE, 1)


def test_parse_strips_mirc_codes():
    line = "\x0307[[\x02Hot Article\x02]]\x03  https://u * Zoe * (+5) \x1fnote\x0f"
    event = parse_irc_line("#en.wikipedia", line, 2)
    assert event.title == "Hot Article"
    assert event.comment == "note"


def test_control_code_stripping_idempotent():
    raw = "\x0304,07foo\x03 bar\x02baz\x0f\x1fqux\x031,2!"
    once = strip_control_codes(raw)
    assert strip_control_codes(once) == once
    assert once == "foo barbazqux!"


# ------------------------------------------------------------------
# grammar round-trip property
# ------------------------------------------------------------------

# Control characters are stripped before parsing, so they cannot occur in
# grammar-valid field content; titles exclude "]]" and editors " * " per the
# wire contract.
_field_chars = st.characters(blacklist_categories=("Cs", "Cc"))
_title = st.text(_field_chars, min_size=1, max_size=40).filter(
    lambda s: "]]" not in s and not s.startswith("[")
)
_editor = st.text(_field_chars, min_size=1, max_size=25).filter(lambda s: " * " not in s)
_word = st.text(st.characters(whitelist_categories=("Ll", "Lu", "Nd")), min_size=0, max_size=12)
_comment = st.text(_field_chars, max_size=40)


@settings(max_examples=200)
@given(
    title=_title,
    flags=_word,
    url=_word,
    editor=_editor,
    delta=st.integers(-10**6, 10**6),
    comment=_comment,
    ts=st.integers(1, 2**31),
)
def test_roundtrip_over_generated_lines(title, flags, url, editor, delta, comment, ts):
    event = EditEvent(
        language="en", title=title, editor=editor, byte_delta=delta,
        diff_url=url, comment=comment, timestamp=ts, flags=flags,
    )
    line = serialize_event(event)
    parsed = parse_irc_line("#en.wikipedia", line, ts)
    assert parsed == event
    assert serialize_event(parsed) == line


@settings(max_examples=100)
@given(
    title=_title,
    editor=_editor,
    delta=st.integers(-999, 999),
    codes=st.lists(st.sampled_from(["\x02", "\x0f", "\x1f", "\x03", "\x034", "\x0304,07"]),
                   max_size=4),
)
def test_roundtrip_normalizes_injected_codes(title, editor, delta, codes):
    event = EditEvent(
        language="de", title=title, editor=editor, byte_delta=delta,
        diff_url="https://u", comment="c", timestamp=5,
    )
    line = serialize_event(event)
    noisy = line
    for code in codes:
        noisy = code + noisy
    parsed = parse_irc_line("#de.wikipedia", noisy, 5)
    assert serialize_event(parsed) == strip_control_codes(noisy)


# ------------------------------------------------------------------
# replay_stream
# ------------------------------------------------------------------


def _write(tmp_path, text):
    path = tmp_path / "fixture.tsv"
    path.write_text(text, encoding="utf-8")
    return path


def test_replay_preserves_order_and_count(tmp_path):
    path = _write(tmp_path, "10\t#en.wikipedia\tline one\n"
                            "20\t#de.wikipedia\tline two\n"
                            "30\t#fr.wikipedia\tline three\n")
    records = list(replay_stream(path))
    assert records == [
        ("#en.wikipedia", "line one", 10),
        ("#de.wikipedia", "line two", 20),
        ("#fr.wikipedia", "line three", 30),
    ]


def test_replay_empty_file(tmp_path):
    assert list(replay_stream(_write(tmp_path, ""))) == []


def test_replay_one_malformed_of_five(tmp_path):
    path = _write(
        tmp_path,
        "10\t#en.wikipedia\ta\n"
        "20\t#en.wikipedia\tb\n"
        "not-a-record\n"
        "30\t#en.wikipedia\tc\n"
        "40\t#en.wikipedia\td\n",
    )
    errors = []
    records = list(replay_stream(path, errors))
    assert len(records) == 4
    assert len(errors) == 1
    assert errors[0].line_number == 3


def test_replay_reports_malformed_and_continues(tmp_path):
    path = _write(
        tmp_path,
        "10\t#en.wikipedia\ta\n"
        "not-a-record\n"
        "20\t#en.wikipedia\tb\n"
        "xx\t#en.wikipedia\tc\n"
        "30\t#en.wikipedia\td\n"
        "40\t#en.wikipedia\te\n",
    )
    errors = []
    records = list(replay_stream(path, errors))
    assert len(records) == 4
    assert len(errors) == 2
    assert errors[0].line_number == 2
    assert errors[1].reason == "non-integer timestamp"


def test_replay_missing_file_raises_oserror(tmp_path):
    with pytest.raises(OSError):
        list(replay_stream(tmp_path / "absent.tsv"))


def test_replay_twice_is_byte_identical(tmp_path):
    path = _write(tmp_path, "10\t#en.wikipedia\t[[A]]  u * E * (+1) c\n"
                            "20\t#en.wikipedia\t[[B]]  u * F * (-2) d\n")
    first = [parse_irc_line(c, l, t) for c, l, t in ReplaySource(path)]
    second = [parse_irc_line(c, l, t) for c, l, t in ReplaySource(path)]
    assert first == second


# ------------------------------------------------------------------
# live-frame helper
# ------------------------------------------------------------------


def test_privmsg_payload_extracts_channel_and_body():
    frame = ":rc!~rc@host PRIVMSG #en.wikipedia :[[T]]  u * E * (+1) c"
    assert privmsg_payload(frame) == ("#en.wikipedia", "[[T]]  u * E * (+1) c")
    assert privmsg_payload(":srv NOTICE you :hi") is None
    assert privmsg_payload("PING :x") is None
