"""
Command Line Interface for markovcanon

Subcommands validate, info, degree, canon, iso, common-ext, sample and
verify-cert. Every command prints a report (key=value lines with
--report, a rendered summary otherwise) and exits with
0 (success / yes), 2 (no / invalid input), 3 (unknown) or 1 (usage or
internal error).
"""

import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

import click
from loguru import logger
from rich.console import Console

from .core.classify import (
    IsoStatus,
    IsoVerdict,
    canonical_form,
    common_extension_shifts,
    shifts_isomorphic,
    verify_certificate,
)
from .core.contraction import degree
from .core.extension import extended_letter_maps
from .core.graph import (
    Rho,
    StochasticGraph,
    check_rho_uniform,
    is_irreducible,
    period,
    stationary_distribution,
)
from .core.homomorphism import format_word, letter_maps
from .core.simulate import sample
from .parsers.certificate import emit_certificate, emit_hom, parse_certificate
from .parsers.sgf import SgfDocument, emit_gsp, emit_reduction, emit_sgf, parse_gsp, parse_sgf
from .utils.config import Config, SearchSettings, load_config
from .utils.errors import ClassificationError, MarkovCanonError, UnsupportedError
from .utils.file_utils import read_text_file, safe_write_file, sidecar_path
from .utils.report import Report, ReportRenderer, format_value
from .utils.validators import validate_configuration, validate_input_file, validate_output_dir

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NO = 2
EXIT_UNKNOWN = 3

VERDICT_EXIT = {
    IsoStatus.ISO_YES: EXIT_OK,
    IsoStatus.ISO_NO: EXIT_NO,
    IsoStatus.UNKNOWN: EXIT_UNKNOWN,
}

console = Console()


class SeedType(click.ParamType):
    """A 64-bit seed in any base Python integer literals accept (42, 0x2a, 0b101010)."""

    name = "seed"

    def convert(self, value: Any, param: Optional[click.Parameter], ctx: Optional[click.Context]) -> int:
        if isinstance(value, int):
            seed = value
        else:
            try:
                seed = int(str(value), 0)
            except ValueError:
                self.fail(f"{value!r} is not an integer seed", param, ctx)
        if not 0 <= seed < 2**64:
            self.fail(f"seed must lie in [0, 2^64), got {seed}", param, ctx)
        return seed


class MarkovCanonGroup(click.Group):
    """Click group whose commands return exit codes; usage errors exit with 1."""

    def main(self, *args: Any, **kwargs: Any) -> Any:  # type: ignore[override]
        kwargs["standalone_mode"] = False
        try:
            rv = super().main(*args, **kwargs)
        except click.exceptions.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(EXIT_USAGE)
        except click.ClickException as e:
            e.show()
            sys.exit(EXIT_USAGE)
        sys.exit(rv or EXIT_OK)


@dataclass
class AppContext:
    config: Config
    settings: SearchSettings
    renderer: ReportRenderer


def _load_document(path: Path) -> SgfDocument:
    """Read and parse an SGF file; unreadable files are usage errors."""
    try:
        validate_input_file(path)
        text = read_text_file(path)
    except MarkovCanonError:
        raise
    except ValueError as e:
        raise click.FileError(str(path), hint=str(e))
    return parse_sgf(text)


def _require_rho(doc: SgfDocument) -> Rho:
    if doc.rho is None:
        raise ClassificationError("The file declares no rho lines")
    return doc.rho


def _shift_graph(doc: SgfDocument) -> StochasticGraph:
    """The graph whose shift a file describes: the total graph for skew-product files."""
    if doc.d is not None:
        return doc.extension().materialize()
    return doc.graph


def _invalid(app: AppContext, report: Report, error: Exception) -> int:
    report.add("valid", False)
    report.add("error", str(error))
    line = getattr(error, "line", None)
    if line is not None:
        report.add("line", line)
    report.extend(app.settings.echo())
    logger.error(str(error))
    app.renderer.emit(report)
    return EXIT_NO


def _certificate_dir(app: AppContext) -> Optional[Path]:
    directory = app.config.get("output.certificate_dir")
    if not directory:
        return None
    try:
        validate_output_dir(Path(directory))
    except ValueError as e:
        raise click.FileError(str(directory), hint=str(e))
    return Path(directory)


def _write(path: Path, content: str) -> None:
    if not safe_write_file(path, content):
        raise click.FileError(str(path), hint="could not write output file")


@click.group(cls=MarkovCanonGroup)
@click.option(
    "--config-file",
    "-c",
    type=click.Path(exists=True, path_type=Path),
    help="Path to custom configuration file",
)
@click.option("--report", "report_mode", is_flag=True, help="Print key=value lines only")
@click.option("--verbose", "-v", is_flag=True, help="Enable verbose logging")
@click.option("--n-max", type=click.IntRange(min=1), help="Largest stringing order searched")
@click.option("--coloring-budget", type=click.IntRange(min=1), help="Colorings per stringing order")
@click.option("--subset-budget", type=click.IntRange(min=1), help="Subsets per contraction search")
@click.option("--d-max", type=click.IntRange(min=1), help="Largest supported fiber size")
@click.option("--jobs", "-j", type=click.IntRange(min=1), help="Worker processes for the coloring search")
@click.option(
    "--accept-budgeted-minimality",
    is_flag=True,
    default=None,
    help="Treat an exhausted search up to n_max as proof of minimality",
)
@click.option(
    "--certificate-dir",
    type=click.Path(file_okay=False, path_type=Path),
    help="Directory for certificate and canonical-form files",
)
@click.version_option(version="0.1.0", prog_name="markovcanon")
@click.pass_context
def main(
    ctx: click.Context,
    config_file: Optional[Path],
    report_mode: bool,
    verbose: bool,
    n_max: Optional[int],
    coloring_budget: Optional[int],
    subset_budget: Optional[int],
    d_max: Optional[int],
    jobs: Optional[int],
    accept_budgeted_minimality: Optional[bool],
    certificate_dir: Optional[Path],
) -> None:
    """
    Canonical forms and isomorphism certificates for rho-uniform Markov shifts.

    Example:
        markovcanon info drunkard.sgf
        markovcanon --report iso first.sgf second.sgf
    """
    try:
        config = Config(load_config(config_file))
    except (OSError, ValueError) as e:
        raise click.ClickException(f"Invalid configuration: {e}")

    overrides = {
        "search.n_max": n_max,
        "search.coloring_budget": coloring_budget,
        "search.subset_budget": subset_budget,
        "search.d_max": d_max,
        "search.jobs": jobs,
        "search.accept_budgeted_minimality": accept_budgeted_minimality,
        "output.certificate_dir": str(certificate_dir) if certificate_dir else None,
        "output.mode": "report" if report_mode else None,
    }
    for key, value in overrides.items():
        if value is not None:
            config.set(key, value)
    try:
        validate_configuration(config.to_dict())
    except ValueError as e:
        raise click.ClickException(f"Invalid configuration: {e}")

    log_level = "DEBUG" if verbose else str(config.get("logging.level", "INFO")).upper()
    logger.remove()
    logger.add(sys.stderr, level=log_level, format=config.get("logging.format"))

    ctx.obj = AppContext(
        config,
        config.search_settings(),
        ReportRenderer(config.get("output.mode", "human"), console),
    )


@main.command()
@click.argument("file", type=click.Path(path_type=Path))
@click.pass_obj
def validate(app: AppContext, file: Path) -> int:
    """Parse FILE and report whether it is a valid graph, irreducible and rho-uniform."""
    report = Report("validate").add("file", file)
    try:
        doc = _load_document(file)
        if doc.labels is not None and doc.rho is not None:
            doc.coloring()
        if doc.d is not None:
            doc.extension()
    except MarkovCanonError as e:
        return _invalid(app, report, e)

    report.add("valid", True)
    report.add("vertices", len(doc.graph.vertices))
    report.add("edges", len(doc.graph.edges))
    report.add("irreducible", is_irreducible(doc.graph))
    if doc.rho is not None:
        report.add("rho-uniform", check_rho_uniform(doc.graph, doc.rho))
    report.add("labeled", doc.labels is not None)
    if doc.d is not None:
        report.add("fiber", doc.d)
    report.extend(app.settings.echo())
    app.renderer.emit(report)
    return EXIT_OK


@main.command()
@click.argument("file", type=click.Path(path_type=Path))
@click.pass_obj
def info(app: AppContext, file: Path) -> int:
    """Stationary distribution, period and sizes of the graph in FILE."""
    report = Report("info").add("file", file)
    try:
        doc = _load_document(file)
        g = _shift_graph(doc)
    except MarkovCanonError as e:
        return _invalid(app, report, e)

    irreducible = is_irreducible(g)
    report.add("vertices", len(g.vertices))
    report.add("edges", len(g.edges))
    report.add("irreducible", irreducible)
    if irreducible:
        stationary = stationary_distribution(g)
        report.add("period", period(g))
        report.add("stationary", [stationary[v] for v in g.vertices])
    else:
        report.add("period", None)
        report.add("stationary", None)
    if doc.rho is not None:
        report.add("rho-uniform", check_rho_uniform(g, doc.rho))
    report.extend(app.settings.echo())
    app.renderer.emit(report)
    return EXIT_OK


@main.command("degree")
@click.argument("file", type=click.Path(path_type=Path))
@click.pass_obj
def degree_command(app: AppContext, file: Path) -> int:
    """Degree of the coloring in FILE (edge labels, or psi o pi for a skew-product file)."""
    report = Report("degree").add("file", file)
    try:
        doc = _load_document(file)
        if doc.d is not None:
            lm = extended_letter_maps(doc.extension())
        else:
            lm = letter_maps(doc.coloring())
    except MarkovCanonError as e:
        return _invalid(app, report, e)

    result = degree(lm, app.settings.subset_budget)
    report.add("degree", result.degree)
    report.add("witness", format_word(result.witness_word))
    report.add("persistent-sets", len(result.persistent_sets))
    report.add("exhausted", result.exhausted)
    report.extend(app.settings.echo())
    app.renderer.emit(report)
    return EXIT_OK if result.exhausted else EXIT_UNKNOWN


@main.command()
@click.argument("file", type=click.Path(path_type=Path))
@click.pass_obj
def canon(app: AppContext, file: Path) -> int:
    """Compute the canonical form of the shift in FILE and write it next to FILE."""
    report = Report("canon").add("file", file)
    try:
        doc = _load_document(file)
        rho = _require_rho(doc)
        g = _shift_graph(doc)
        if not is_irreducible(g) or not check_rho_uniform(g, rho):
            raise ClassificationError("The graph must be irreducible and rho-uniform")
    except MarkovCanonError as e:
        return _invalid(app, report, e)

    try:
        form = canonical_form(g, rho, app.settings)
    except (ClassificationError, UnsupportedError) as e:
        logger.warning(str(e))
        report.add("certified", False)
        report.add("error", str(e))
        report.extend(app.settings.echo())
        app.renderer.emit(report)
        return EXIT_UNKNOWN

    output = sidecar_path(file, ".canon.sgf", _certificate_dir(app))
    if form.reduction is not None:
        _write(output, emit_reduction(form.reduction, name=f"{file.stem}-canon"))
    else:
        _write(output, emit_gsp(form.extension, name=f"{file.stem}-canon"))

    report.add("d", form.d)
    report.add("certified", form.certified)
    report.add("certification", form.minimal.certification)
    report.add("achieved-n", form.minimal.achieved_at[0])
    report.add("coloring-index", form.minimal.achieved_at[1])
    report.add("base-vertices", len(form.extension.vertices))
    report.add("total-vertices", len(form.extension.vertices) * form.d)
    if form.reduction is not None:
        report.add("input-irreducible", form.reduction.irreducible)
        report.add("persistent-partitions", len(form.reduction.persistent.functions))
    report.add("caveats", list(form.caveats) or None)
    report.add("canon-file", output)
    report.extend(app.settings.echo())
    app.renderer.emit(report)
    return EXIT_OK


def _load_pair(file1: Path, file2: Path) -> tuple[StochasticGraph, StochasticGraph, Rho]:
    doc1, doc2 = _load_document(file1), _load_document(file2)
    rho1, rho2 = _require_rho(doc1), _require_rho(doc2)
    if rho1 != rho2:
        raise ClassificationError("The two files declare different rho")
    return _shift_graph(doc1), _shift_graph(doc2), rho1


def _verdict_report(report: Report, verdict: IsoVerdict) -> None:
    report.add("verdict", verdict.status.value)
    report.add("reason", verdict.reason)
    d1, d2 = verdict.degrees
    report.add("d1", d1)
    report.add("d2", d2)
    report.add("period1", verdict.periods[0])
    report.add("period2", verdict.periods[1])
    report.add("certified", verdict.certified)
    report.add("caveats", list(verdict.caveats) or None)


@main.command()
@click.argument("file1", type=click.Path(path_type=Path))
@click.argument("file2", type=click.Path(path_type=Path))
@click.pass_obj
def iso(app: AppContext, file1: Path, file2: Path) -> int:
    """Decide whether the shifts of FILE1 and FILE2 are isomorphic."""
    report = Report("iso").add("file1", file1).add("file2", file2)
    try:
        g1, g2, rho = _load_pair(file1, file2)
        verdict = shifts_isomorphic(g1, g2, rho, app.settings)
    except UnsupportedError as e:
        report.add("verdict", IsoStatus.UNKNOWN.value)
        report.add("error", str(e))
        report.extend(app.settings.echo())
        app.renderer.emit(report)
        return EXIT_UNKNOWN
    except MarkovCanonError as e:
        return _invalid(app, report, e)

    _verdict_report(report, verdict)
    if verdict.certificate is not None and verdict.canon1 and verdict.canon2:
        directory = _certificate_dir(app)
        canon1 = sidecar_path(file1, ".canon1.sgf", directory)
        canon2 = sidecar_path(file1, ".canon2.sgf", directory)
        certificate = sidecar_path(file1, ".cert", directory)
        _write(canon1, emit_gsp(verdict.canon1.extension, name=f"{file1.stem}-canon1"))
        _write(canon2, emit_gsp(verdict.canon2.extension, name=f"{file1.stem}-canon2"))
        _write(certificate, emit_certificate(verdict.certificate))
        report.add("certificate-file", certificate)
    report.extend(app.settings.echo())
    app.renderer.emit(report)
    return VERDICT_EXIT[verdict.status]


@main.command("common-ext")
@click.argument("file1", type=click.Path(path_type=Path))
@click.argument("file2", type=click.Path(path_type=Path))
@click.pass_obj
def common_ext(app: AppContext, file1: Path, file2: Path) -> int:
    """Build a degree-1 common extension of two isomorphic shifts."""
    report = Report("common-ext").add("file1", file1).add("file2", file2)
    try:
        g1, g2, rho = _load_pair(file1, file2)
        verdict = shifts_isomorphic(g1, g2, rho, app.settings)
        if verdict.status is not IsoStatus.ISO_YES:
            _verdict_report(report, verdict)
            report.extend(app.settings.echo())
            app.renderer.emit(report)
            return VERDICT_EXIT[verdict.status]
        common = common_extension_shifts(g1, g2, rho, app.settings, verdict)
    except UnsupportedError as e:
        report.add("error", str(e))
        report.extend(app.settings.echo())
        app.renderer.emit(report)
        return EXIT_UNKNOWN
    except MarkovCanonError as e:
        return _invalid(app, report, e)

    directory = _certificate_dir(app)
    graph_file = sidecar_path(file1, ".common.sgf", directory)
    _write(
        graph_file,
        emit_sgf(common.graph, rho, common.extension.total_labels(), name=f"{file1.stem}-common"),
    )
    _write(sidecar_path(file1, ".phi1.hom", directory), emit_hom(common.phi1))
    _write(sidecar_path(file1, ".phi2.hom", directory), emit_hom(common.phi2))

    report.add("verdict", verdict.status.value)
    report.add("vertices", len(common.graph.vertices))
    report.add("edges", len(common.graph.edges))
    report.add("base-pairs", common.common_base.base.size)
    report.add("d", common.extension.d)
    report.add("common-file", graph_file)
    report.extend(app.settings.echo())
    app.renderer.emit(report)
    return EXIT_OK


@main.command("sample")
@click.argument("file", type=click.Path(path_type=Path))
@click.option("--seed", type=SeedType(), help="64-bit seed (decimal, 0x.. or 0b..)")
@click.option("--length", "-n", type=click.IntRange(min=0), help="Number of edges")
@click.pass_obj
def sample_command(app: AppContext, file: Path, seed: Optional[int], length: Optional[int]) -> int:
    """Sample a trajectory of FILE; edge ids are printed one per line in traversal order."""
    seed = seed if seed is not None else int(app.config.get("simulate.seed", 0))
    length = length if length is not None else int(app.config.get("simulate.length", 0))
    try:
        doc = _load_document(file)
        g = _shift_graph(doc)
        trajectory = sample(g, seed, length)
    except MarkovCanonError as e:
        return _invalid(app, Report("sample").add("file", file), e)

    if app.renderer.mode == "report":
        click.echo(f"seed={seed}")
        click.echo(f"length={length}")
        for edge in trajectory.forward():
            click.echo(f"edge={edge}")
        for key, value in app.settings.echo():
            click.echo(f"{key}={format_value(value)}")
    else:
        click.echo("\n".join(trajectory.forward()))
    return EXIT_OK


@main.command("verify-cert")
@click.argument("canon1", type=click.Path(path_type=Path))
@click.argument("canon2", type=click.Path(path_type=Path))
@click.argument("cert", type=click.Path(path_type=Path))
@click.pass_obj
def verify_cert(app: AppContext, canon1: Path, canon2: Path, cert: Path) -> int:
    """Re-check an isomorphism certificate against the two canonical-form files."""
    report = Report("verify-cert").add("certificate", cert)
    try:
        for path in (canon1, canon2, cert):
            validate_input_file(path)
        e1 = parse_gsp(read_text_file(canon1))
        e2 = parse_gsp(read_text_file(canon2))
        certificate = parse_certificate(read_text_file(cert))
    except MarkovCanonError as e:
        return _invalid(app, report, e)
    except ValueError as e:
        raise click.FileError(str(cert), hint=str(e))

    valid = verify_certificate(e1, e2, certificate)
    report.add("valid", valid)
    report.add("d", e1.d)
    report.add("base-vertices", len(e1.vertices))
    report.extend(app.settings.echo())
    app.renderer.emit(report)
    return EXIT_OK if valid else EXIT_NO


if __name__ == "__main__":
    main()
