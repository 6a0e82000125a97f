import datetime
from typing import Any

import structlog

from .rich_types import (
    RICH_CONSOLE_EVENT_LEVEL_STYLE,
    RICH_CONSOLE_STYLES,
    STAGE_STYLES,
    TARGET_PLACEHOLDER,
    RichConsoleStyle,
)


def rich_style_wrapper(src: Any, style: str) -> str:
    """
    Wraps a value in rich markup.

    Args:
        src (Any): Value to render.
        style (str): Rich style; an empty string leaves the value unstyled.

    Returns:
        str: The marked-up string.
    """
    if style == "":
        return str(src)
    return f"[{style}]{src!s}[/]"


def _format_value(src: Any) -> str:
    # numpy scalars and floats from the numeric stages get a compact form
    if isinstance(src, float):
        return f"{src:.6g}"
    if hasattr(src, "item") and callable(src.item):
        try:
            return _format_value(src.item())
        except (TypeError, ValueError):
            return str(src)
    return str(src)


def rich_style_format_parser(
    src: Any,
    style: RichConsoleStyle,
    placeholder: str = TARGET_PLACEHOLDER,
    prefix_key: str | None = None,
) -> str:
    """
    Renders one key/value pair of a log event as `KEY: value`.

    Args:
        src (Any): The value.
        style (RichConsoleStyle): Style entry used for the value.
        placeholder (str, optional): Placeholder replaced by the value inside
            the style's format string. Defaults to TARGET_PLACEHOLDER.
        prefix_key (str | None, optional): Key shown as prefix; defaults to the
            style's own key.

    Returns:
        str: The rendered pair.
    """
    key = style["key"] if prefix_key is None else prefix_key
    target = style["format"].replace(placeholder, _format_value(src))
    prefix_format = style.get("prefix_format", "u")
    prefix = rich_style_wrapper(key.upper(), prefix_format)
    target = rich_style_wrapper(target, style["style"])
    return f"{prefix}: {target}"


def rich_console_processor(_, __, event_dict: structlog.typing.EventDict):
    """
    Collapses a structlog event into a single rich-markup message.

    The event text comes first, styled by level, followed by the known keys
    (logger, stage, frames, activity, radius) and then every remaining key in
    insertion order.

    Args:
        _ (Any): Unused logger argument.
        __ (Any): Unused method name.
        event_dict (structlog.typing.EventDict): The event being rendered.

    Returns:
        structlog.typing.EventDict: A dict holding only the rendered `event`.
    """
    event_modified: list[str] = []

    original_event = event_dict.pop("event", "")
    level: str = event_dict.pop("level", "debug")
    event_style = RICH_CONSOLE_EVENT_LEVEL_STYLE.get(level, "")
    original_event = rich_style_wrapper(original_event, event_style)

    misc_style = RICH_CONSOLE_STYLES[-1]
    for style in RICH_CONSOLE_STYLES[:-1]:
        key = style["key"]
        if key in event_dict:
            value = event_dict.pop(key)
            if key == "stage":
                style = RichConsoleStyle(
                    key=key,
                    style=STAGE_STYLES.get(str(value), style["style"]),
                    format=style["format"],
                )
            tmp = rich_style_format_parser(value, style)
            event_modified.append(f"{tmp:<30}")
    for key in event_dict:
        event_modified.append(
            rich_style_format_parser(event_dict[key], misc_style, prefix_key=key)
        )
    attached_information = (original_event + "\n" + "".join(event_modified)).strip()
    return {"event": attached_information}


def file_json_timestamp_processor(_, __, event_dict: structlog.typing.EventDict):
    event_dict["timestamp"] = datetime.datetime.now(datetime.UTC).isoformat(
        timespec="milliseconds"
    )
    return event_dict
