"""
Certificate and homomorphism sidecar files

An equivalence certificate between two canonical pairs is written as

    kappa <j1> <j2>
    w <j1> <permutation>

with one line of each kind per base vertex of the first pair. A
homomorphism is written as `hom <source-edge> <target-edge>` lines.
"""

from typing import Union

from ..core.classify import EquivalenceCertificate
from ..core.graph import StochasticGraph
from ..core.homomorphism import GraphHom, check_hom
from ..utils.errors import CertificateError
from ..utils.permutation import Permutation


def _lines(text: Union[str, bytes]) -> list[tuple[int, list[str]]]:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    result = []
    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].strip()
        if content:
            result.append((number, content.split()))
    return result


def emit_certificate(certificate: EquivalenceCertificate) -> str:
    lines = [f"kappa {j} {image}" for j, image in certificate.kappa.items()]
    lines.extend(f"w {j} {perm}" for j, perm in certificate.w.items())
    return "\n".join(lines) + "\n"


def parse_certificate(text: Union[str, bytes]) -> EquivalenceCertificate:
    """
    Read a certificate file.

    Raises:
        CertificateError: On unknown keys, duplicates or malformed permutations
    """
    kappa: dict[str, str] = {}
    w: dict[str, Permutation] = {}
    for number, tokens in _lines(text):
        key = tokens[0]
        if key == "kappa":
            if len(tokens) != 3:
                raise CertificateError(f"line {number}: 'kappa' takes <j1> <j2>")
            if tokens[1] in kappa:
                raise CertificateError(f"line {number}: duplicate kappa for {tokens[1]!r}")
            kappa[tokens[1]] = tokens[2]
        elif key == "w":
            if len(tokens) < 3:
                raise CertificateError(f"line {number}: 'w' takes <j1> <permutation>")
            if tokens[1] in w:
                raise CertificateError(f"line {number}: duplicate w for {tokens[1]!r}")
            try:
                w[tokens[1]] = Permutation.parse(" ".join(tokens[2:]))
            except ValueError as e:
                raise CertificateError(f"line {number}: {e}")
        else:
            raise CertificateError(f"line {number}: unknown key {key!r}")
    if not kappa:
        raise CertificateError("Certificate has no kappa lines")
    return EquivalenceCertificate(kappa, w)


def emit_hom(phi: GraphHom) -> str:
    return "\n".join(f"hom {edge} {image}" for edge, image in phi.edge_map.items()) + "\n"


def parse_hom(
    text: Union[str, bytes], source: StochasticGraph, target: StochasticGraph
) -> GraphHom:
    """
    Read `hom` lines and validate them as a homomorphism source -> target.

    Raises:
        CertificateError: On malformed lines
        HomomorphismError: If the map is not a homomorphism
    """
    edge_map: dict[str, str] = {}
    for number, tokens in _lines(text):
        if tokens[0] != "hom" or len(tokens) != 3:
            raise CertificateError(f"line {number}: expected 'hom <source-edge> <target-edge>'")
        if tokens[1] in edge_map:
            raise CertificateError(f"line {number}: duplicate image for {tokens[1]!r}")
        edge_map[tokens[1]] = tokens[2]
    return check_hom(edge_map, source, target)


__all__ = ["emit_certificate", "emit_hom", "parse_certificate", "parse_hom"]
