"""
Report output

Every command builds a Report: an ordered list of key=value pairs. In
report mode the pairs are printed verbatim; in human mode they are
rendered through a jinja2 template onto a rich console.
"""

from fractions import Fraction
from typing import Any, Iterable, Optional

import click
from jinja2 import BaseLoader, Environment
from rich.console import Console

from .rationals import format_rational


def format_value(value: Any) -> str:
    """Render a report value: booleans lower-case, rationals exact, sequences comma-joined."""
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, (list, tuple)):
        return ",".join(format_value(item) for item in value)
    return str(value)


class Report:
    """Ordered key=value pairs produced by one command."""

    def __init__(self, command: str):
        self.command = command
        self.pairs: list[tuple[str, str]] = []

    def add(self, key: str, value: Any) -> "Report":
        self.pairs.append((key, format_value(value)))
        return self

    def extend(self, pairs: Iterable[tuple[str, Any]]) -> "Report":
        for key, value in pairs:
            self.add(key, value)
        return self

    def get(self, key: str) -> Optional[str]:
        for name, value in self.pairs:
            if name == key:
                return value
        return None

    def lines(self) -> list[str]:
        return [f"{key}={value}" for key, value in self.pairs]


class ReportRenderer:
    """Renders reports as text (report mode) or through templates (human mode)."""

    TEMPLATES = {
        "default": """
[bold blue]{{ title }}[/bold blue]
{% for key, value in results %}
  [cyan]{{ key }}[/cyan]: {{ value }}
{% endfor %}
{% if settings %}
[dim]search settings: {% for key, value in settings %}{{ key }}={{ value }} {% endfor %}[/dim]
{% endif %}
""",
        "iso": """
{% if values.verdict == "yes" %}
[bold green]Isomorphic[/bold green] ({{ values.reason }})
{% elif values.verdict == "no" %}
[bold red]Not isomorphic[/bold red] ({{ values.reason }})
{% else %}
[bold yellow]Undecided[/bold yellow] ({{ values.reason }})
{% endif %}
{% for key, value in results if key not in ("verdict", "reason") %}
  [cyan]{{ key }}[/cyan]: {{ value }}
{% endfor %}
{% if settings %}
[dim]search settings: {% for key, value in settings %}{{ key }}={{ value }} {% endfor %}[/dim]
{% endif %}
""",
        "canon": """
[bold blue]Canonical form[/bold blue] of {{ values.file }}
  minimal index d = {{ values.d }} ({{ "certified" if values.certified == "true" else "not certified" }})
  base vertices |J*| = {{ values["base-vertices"] }}
{% for key, value in results if key not in ("file", "d", "certified", "base-vertices") %}
  [cyan]{{ key }}[/cyan]: {{ value }}
{% endfor %}
{% if settings %}
[dim]search settings: {% for key, value in settings %}{{ key }}={{ value }} {% endfor %}[/dim]
{% endif %}
""",
    }

    TITLES = {
        "validate": "Validation",
        "info": "Graph information",
        "degree": "Coloring degree",
        "common-ext": "Common extension",
        "verify-cert": "Certificate check",
    }

    def __init__(self, mode: str = "human", console: Optional[Console] = None):
        self.mode = mode
        self.console = console or Console()
        self.template_env = Environment(
            loader=BaseLoader(),
            trim_blocks=True,
            lstrip_blocks=True,
        )

    def render_human(self, report: Report) -> str:
        """The human-mode text of a report (rich markup)."""
        settings = [(k, v) for k, v in report.pairs if k.startswith("config.")]
        results = [(k, v) for k, v in report.pairs if not k.startswith("config.")]
        template_text = self.TEMPLATES.get(report.command, self.TEMPLATES["default"])
        template = self.template_env.from_string(template_text)
        return template.render(
            title=self.TITLES.get(report.command, report.command),
            results=results,
            settings=[(k[len("config."):], v) for k, v in settings],
            values=dict(results),
        ).strip("\n")

    def emit(self, report: Report) -> None:
        if self.mode == "report":
            for line in report.lines():
                click.echo(line)
        else:
            self.console.print(self.render_human(report))
