"""Recent-changes ingestion: channel naming, wire-line parsing, replay sources.

The wire grammar accepted here is::

    [[<title>]] <flags> <url> * <editor> * (<signed-int>) <comment>

where ``flags`` and ``comment`` may be empty and IRC formatting codes may be
sprinkled anywhere. The grammar is unambiguous as long as the title contains
no ``]]`` and the editor contains no `` * `` delimiter; those are the
contract for anything feeding this parser.
"""
from __future__ import annotations

import logging
import re
import socket
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

log = logging.getLogger(__name__)

CHANNEL_SUFFIX = ".wikipedia"
LIVE_SERVER = ("irc.wikimedia.org", 6667)

# Default monitored language editions; "wikidata" rides along as one more code.
DEFAULT_LANGUAGES: tuple[str, ...] = (
    "en", "de", "fr", "es", "ru", "it", "ja", "zh", "pt", "nl",
    "pl", "sv", "uk", "ar", "fa", "ko", "tr", "cs", "fi", "no",
    "da", "he", "hu", "ro", "id", "vi", "th", "el", "bg", "ca",
    "eu", "sr", "hr", "sk", "lt", "et", "lv", "sl", "hi", "simple",
    "wikidata",
)


class InvalidLanguageError(ValueError):
    """A language code that cannot name an IRC channel."""


class StreamParseError(ValueError):
    """A recent-changes line that does not match the wire grammar."""

    def __init__(self, reason: str, line: str):
        super().__init__(f"{reason}: {line!r}")
        self.reason = reason
        self.line = line


@dataclass(frozen=True)
class EditEvent:
    """One parsed recent-changes notification."""

    language: str
    title: str
    editor: str
    byte_delta: int
    diff_url: str
    comment: str
    timestamp: int
    flags: str = ""

    def __post_init__(self) -> None:
        if not self.language or self.language != self.language.lower():
            raise ValueError(f"language must be non-empty lowercase: {self.language!r}")
        if not self.title:
            raise ValueError("title must be non-empty")
        if self.timestamp <= 0:
            raise ValueError("timestamp must be positive")


def channel_for_language(language: str) -> str:
    """Name the recent-changes channel for a language edition."""
    if not language or any(ch.isspace() for ch in language) or language != language.lower():
        raise InvalidLanguageError(f"not a usable language code: {language!r}")
    return "#" + language + CHANNEL_SUFFIX


# mIRC-style formatting: bold, color (optionally "NN" or "NN,NN"), reset, underline.
_CONTROL_CODES = re.compile("[\x02\x0f\x1f]|\x03(?:[0-9]{1,2}(?:,[0-9]{1,2})?)?")

_CHANNEL_RE = re.compile(r"^#(?P<language>[^\s#]+)\.wikipedia$")

_LINE_RE = re.compile(
    r"^\[\[(?P<title>.*?)\]\] (?P<flags>\S*) (?P<url>\S*) \* (?P<editor>.*?) \* "
    r"\((?P<delta>[+-]?[0-9]+)\)(?: (?P<comment>.*))?$"
)


def strip_control_codes(line: str) -> str:
    """Remove IRC formatting codes; idempotent."""
    return _CONTROL_CODES.sub("", line)


def language_for_channel(channel: str) -> str:
    m = _CHANNEL_RE.match(channel)
    if m is None:
        raise InvalidLanguageError(f"not a recent-changes channel: {channel!r}")
    return m.group("language")


def parse_irc_line(channel: str, line: str, arrival: int) -> EditEvent:
    """Parse one message body from a recent-changes channel into an EditEvent."""
    language = language_for_channel(channel)
    clean = strip_control_codes(line)
    if not clean.startswith("[[") or "]]" not in clean:
        raise StreamParseError("missing [[title]] delimiters", line)
    m = _LINE_RE.match(clean)
    if m is None:
        raise StreamParseError("missing editor segment or malformed delta", line)
    return EditEvent(
        language=language,
        title=m.group("title"),
        editor=m.group("editor"),
        byte_delta=int(m.group("delta")),
        diff_url=m.group("url"),
        comment=m.group("comment") or "",
        timestamp=arrival,
        flags=m.group("flags"),
    )


def serialize_event(event: EditEvent) -> str:
    """Emit the canonical wire form of an event (inverse of parse_irc_line)."""
    delta = f"+{event.byte_delta}" if event.byte_delta > 0 else str(event.byte_delta)
    return (
        f"[[{event.title}]] {event.flags} {event.diff_url}"
        f" * {event.editor} * ({delta}) {event.comment}"
    )


# ----------------------------------------------------------------------
# Sources
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class ReplayError:
    line_number: int
    line: str
    reason: str


def replay_stream(
    path: Path | str, errors: list[ReplayError] | None = None
) -> Iterator[tuple[str, str, int]]:
    """Yield (channel, raw_line, timestamp) records from a replay fixture.

    The fixture is UTF-8 text, one record per line:
    ``<unix-ts> TAB <channel> TAB <raw-irc-line>``. Blank lines are skipped;
    malformed records are reported through ``errors`` and the stream
    continues. Unreadable files raise OSError.
    """
    with open(path, encoding="utf-8") as fh:
        for number, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t", 2)
            if len(parts) != 3:
                if errors is not None:
                    errors.append(ReplayError(number, line, "expected 3 tab-separated fields"))
                continue
            ts_text, channel, body = parts
            try:
                ts = int(ts_text)
            except ValueError:
                if errors is not None:
                    errors.append(ReplayError(number, line, "non-integer timestamp"))
                continue
            yield channel, body, ts


class ReplaySource:
    """StreamSource over a replay fixture; records malformed lines on .errors."""

    def __init__(self, path: Path | str):
        self.path = Path(path)
        self.errors: list[ReplayError] = []

    def __iter__(self) -> Iterator[tuple[str, str, int]]:
        return replay_stream(self.path, self.errors)


def privmsg_payload(frame: str) -> tuple[str, str] | None:
    """Extract (channel, body) from a raw IRC PRIVMSG frame, else None."""
    if frame.startswith(":"):
        _, _, frame = frame.partition(" ")
    command, _, rest = frame.partition(" ")
    if command.upper() != "PRIVMSG":
        return None
    target, _, trailing = rest.partition(" :")
    target = target.strip()
    if not target.startswith("#") or not trailing:
        return None
    return target, trailing


class LiveIrcSource:
    """StreamSource over the live recent-changes IRC feed.

    Joins one channel per configured language and stamps each message with
    its arrival time. Reconnects with simple exponential backoff.
    """

    def __init__(
        self,
        languages: tuple[str, ...] = DEFAULT_LANGUAGES,
        nick: str = "newsmosaic",
        server: tuple[str, int] = LIVE_SERVER,
        max_backoff: float = 60.0,
    ):
        self.channels = [channel_for_language(code) for code in languages]
        self.nick = nick
        self.server = server
        self.max_backoff = max_backoff
        self._stopped = False

    def stop(self) -> None:
        self._stopped = True

    def __iter__(self) -> Iterator[tuple[str, str, int]]:
        backoff = 1.0
        while not self._stopped:
            try:
                yield from self._session()
                backoff = 1.0
            except OSError as exc:
                log.warning("IRC connection lost (%s); retrying in %.0fs", exc, backoff)
                time.sleep(backoff)
                backoff = min(backoff * 2, self.max_backoff)

    def _session(self) -> Iterator[tuple[str, str, int]]:
        with socket.create_connection(self.server, timeout=120) as sock:
            fh = sock.makefile("rwb", buffering=0)

            def send(text: str) -> None:
                fh.write((text + "\r\n").encode("utf-8"))

            send(f"NICK {self.nick}")
            send(f"USER {self.nick} 0 * :{self.nick}")
            for channel in self.channels:
                send(f"JOIN {channel}")
            for raw in fh:
                if self._stopped:
                    return
                frame = raw.decode("utf-8", errors="replace").rstrip("\r\n")
                if frame.startswith("PING"):
                    send("PONG" + frame[4:])
                    continue
                payload = privmsg_payload(frame)
                if payload is not None:
                    channel, body = payload
                    yield channel, body, int(time.time())
