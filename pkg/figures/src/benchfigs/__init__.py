"""Figure rendering for ldpcbench report directories."""

from .render import (
    FigureKind,
    FigureSpec,
    RenderResult,
    SchemaError,
    render,
    render_report_dir,
)

__version__ = "0.1.0"
