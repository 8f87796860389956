"""Conceptual-graph ontology engine for indexing and querying time-coded audiovisual segments."""

from pci.annotation import (
    AnnotationStore,
    ControlledVocabulary,
    Filler,
    Keyword,
    KeywordKind,
    MediaAsset,
    Segment,
    SegmentAnnotation,
    Template,
    TemplateGroup,
    add_annotation,
    catalog,
    instantiate_template,
    load_store,
    lookup_keyword,
    save_store,
)
from pci.errors import ParseError, PCIError, UnknownTypeError
from pci.graph import (
    GENERIC,
    ConceptualGraph,
    GraphKind,
    Referent,
    check_well_formed,
    merge_coreferent,
    parse_graph,
    serialize_graph,
)
from pci.pci_data import load_bundled, verify_structure
from pci.projection import answer_query, count_projections_oracle, project
from pci.report import Finding, Severity, ValidationReport
from pci.vocabulary import (
    ConceptType,
    Kind,
    NestingType,
    RelationType,
    TypeId,
    Vocabulary,
    VocabularyError,
    assign_identifiers,
    least_common_subsumers,
    lint_labels,
    parse_vocabulary,
    serialize_vocabulary,
    subsumes,
    validate_vocabulary,
)

__version__ = "0.1.0"
