from typing import NotRequired, TypedDict


class RichConsoleStyle(TypedDict):
    key: str
    style: str
    format: str
    prefix_format: NotRequired[str]


TARGET_PLACEHOLDER = "@"

# rendered first, in this order; the last entry styles every other key
RICH_CONSOLE_STYLES: list[RichConsoleStyle] = [
    {"key": "logger", "style": "green3", "format": f"{TARGET_PLACEHOLDER}, "},
    {"key": "stage", "style": "dark_green", "format": f"\\[{TARGET_PLACEHOLDER}], "},
    {"key": "frames", "style": "steel_blue", "format": f"{TARGET_PLACEHOLDER}, "},
    {"key": "activity", "style": "cyan4", "format": f"{TARGET_PLACEHOLDER}, "},
    {"key": "radius", "style": "medium_purple", "format": f"r={TARGET_PLACEHOLDER}, "},
    {"key": "MISC", "style": "orange4", "format": f"{TARGET_PLACEHOLDER}, "},
]

# the `stage` tag takes the color of the pipeline stage it names
STAGE_STYLES: dict[str, str] = {
    "bundling": "dark_sea_green4",
    "neighborhoods": "deep_sky_blue4",
    "activities": "dark_cyan",
    "primitives": "dark_goldenrod",
    "clustering": "magenta3",
    "evaluation": "gold3",
    "pipeline": "b dark_green",
}

RICH_CONSOLE_EVENT_LEVEL_STYLE = {
    "info": "b uu frame dodger_blue2",
    "debug": "b uu green3",
    "warning": "b uu orange_red1",
    "error": "b uu red1",
    "critical": "b uu red1",
}
