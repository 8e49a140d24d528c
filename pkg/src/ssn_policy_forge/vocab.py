"""Shared namespace IRIs and well-known terms.

Only vocabulary used across more than one module lives here; module-local
coinages stay local to keep this file an index rather than a dumping ground.
"""

from __future__ import annotations

from .rdf import RDF_NS, Iri

RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
SOSA_NS = "http://www.w3.org/ns/sosa/"
DEFAULT_BASE = "http://example.org/mine#"

RDF_TYPE = Iri(RDF_NS + "type")
RDFS_LABEL = Iri(RDFS_NS + "label")

SOSA_OBSERVED_PROPERTY = Iri(SOSA_NS + "observedProperty")
SOSA_HAS_RESULT = Iri(SOSA_NS + "hasResult")
SOSA_HAS_FEATURE_OF_INTEREST = Iri(SOSA_NS + "hasFeatureOfInterest")


def default_prefixes(base: str = DEFAULT_BASE) -> dict[str, str]:
    """Prefix map every shipped document and serialized query starts from."""
    return {
        "rdf": RDF_NS,
        "rdfs": RDFS_NS,
        "sosa": SOSA_NS,
        "": base,
    }
