import logging

import structlog
from rich.console import Console
from rich.logging import RichHandler

from .processors import file_json_timestamp_processor, rich_console_processor


def _shared_processors() -> list[structlog.typing.Processor]:
    return [
        structlog.contextvars.merge_contextvars,
        structlog.stdlib.add_log_level,
        structlog.stdlib.add_logger_name,
    ]


def rich_console_handler(level: int = logging.DEBUG) -> RichHandler:
    """Console handler on stderr, so report tables printed to stdout stay clean."""
    handler = RichHandler(
        console=Console(stderr=True),
        markup=True,
        rich_tracebacks=True,
        show_path=False,
    )
    handler.setFormatter(
        structlog.stdlib.ProcessorFormatter(
            processors=[
                *_shared_processors(),
                structlog.processors.StackInfoRenderer(),
                structlog.dev.set_exc_info,
                structlog.stdlib.ProcessorFormatter.remove_processors_meta,
                rich_console_processor,
                structlog.dev.ConsoleRenderer(
                    colors=False, exception_formatter=structlog.dev.plain_traceback
                ),
            ]
        )
    )
    handler.setLevel(level)
    return handler


def file_json_handler(
    filename: str, mode: str = "w", level: int = logging.DEBUG
) -> logging.FileHandler:
    """JSON-lines file handler; numpy values fall back to `str`."""
    handler = logging.FileHandler(filename, mode=mode, encoding="utf-8")
    handler.setFormatter(
        structlog.stdlib.ProcessorFormatter(
            processors=[
                *_shared_processors(),
                structlog.stdlib.PositionalArgumentsFormatter(),
                structlog.processors.CallsiteParameterAdder(
                    [
                        structlog.processors.CallsiteParameter.MODULE,
                        structlog.processors.CallsiteParameter.FUNC_NAME,
                        structlog.processors.CallsiteParameter.LINENO,
                    ]
                ),
                structlog.stdlib.ProcessorFormatter.remove_processors_meta,
                file_json_timestamp_processor,
                structlog.processors.format_exc_info,
                structlog.processors.JSONRenderer(ensure_ascii=False, default=str),
            ]
        )
    )
    handler.setLevel(level)
    return handler
