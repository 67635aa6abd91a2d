"""Cross-lingual lexicon transfer through a fitted linear map."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from app.alignment.linear_map import LinearMap, project
from app.core.config import settings
from app.core.exceptions import ContractError
from app.core.logging import get_logger, log_report
from app.core.types import Polarity, ProvenanceMethod
from app.embeddings.search import neighbors_above
from app.embeddings.table import EmbeddingTable, Neighbor
from app.lexicon.lexicon import PolarityLexicon, Provenance, make_lexicon

logger = get_logger(__name__)


@dataclass(frozen=True)
class TransferReport:
    """Counts describing one lexicon transfer.

    translated + oov + no_neighbor source words add up to the source size.
    """

    source_size: int
    translated_source_words: int
    oov_source_words: int
    no_neighbor_source_words: int
    conflict_drops: int
    native_overrides: int
    output_size: int
    lambda_used: float

    def as_fields(self) -> Dict[str, object]:
        """Report as ordered key-value fields."""
        return {
            "source_size": self.source_size,
            "translated_source_words": self.translated_source_words,
            "oov_source_words": self.oov_source_words,
            "no_neighbor_source_words": self.no_neighbor_source_words,
            "conflict_drops": self.conflict_drops,
            "native_overrides": self.native_overrides,
            "output_size": self.output_size,
            "lambda_used": self.lambda_used,
        }


def _retrieve(
    word: str,
    linear_map: LinearMap,
    src: EmbeddingTable,
    tgt: EmbeddingTable,
    lambda_threshold: float,
) -> Optional[List[Neighbor]]:
    # None marks an out-of-vocabulary source word
    row = src.index_of(word)
    if row is None:
        return None
    projected = project(linear_map, src.vectors[row])
    if not np.any(projected):
        return []
    return neighbors_above(tgt, projected, lambda_threshold)


def transfer_lexicon(
    lexicon: PolarityLexicon,
    linear_map: LinearMap,
    src: EmbeddingTable,
    tgt: EmbeddingTable,
    lambda_threshold: Optional[float] = None,
    native: Optional[PolarityLexicon] = None,
    workers: Optional[int] = None,
) -> tuple[PolarityLexicon, TransferReport]:
    """
    Translate a source-language lexicon into the target language.

    Every in-vocabulary source word is projected with the map; every target
    word with cosine strictly above the threshold inherits the source word's
    polarity. A target word reached from both polarities is dropped. When a
    target word is reached from several same-polarity source words, the most
    similar one is recorded as origin. Entries of a native target lexicon win
    on collision: a native word reached by transfer (even one dropped as a
    conflict) takes its native polarity and provenance; native words never
    reached are not added, so every output word is in the target vocabulary.

    Args:
        lexicon: Source-language lexicon
        linear_map: Map from the source to the target space
        src: Source-language table
        tgt: Target-language table
        lambda_threshold: Cosine threshold in (0, 1] (defaults to settings, 0.65)
        native: Optional human-labelled target-language lexicon
        workers: Threads used for retrieval (defaults to settings)

    Returns:
        (target-language lexicon, TransferReport)

    Raises:
        ContractError: If the threshold is out of range or dimensions disagree
    """
    if lambda_threshold is None:
        lambda_threshold = settings.transfer.lambda_threshold
    if workers is None:
        workers = settings.transfer.workers
    if not 0.0 < lambda_threshold <= 1.0:
        raise ContractError(f"lambda must lie in (0, 1], got {lambda_threshold}")
    if (linear_map.d_src, linear_map.d_tgt) != (src.dim, tgt.dim):
        raise ContractError(
            f"map is {linear_map.d_tgt}x{linear_map.d_src} but tables are "
            f"{src.dim}->{tgt.dim}"
        )

    source_words = sorted(lexicon.entries)

    def retrieve(word: str) -> Optional[List[Neighbor]]:
        return _retrieve(word, linear_map, src, tgt, lambda_threshold)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(retrieve, source_words))
    else:
        results = [retrieve(word) for word in source_words]

    oov = 0
    no_neighbor = 0
    translated = 0
    # target word -> polarity -> best (similarity, origin)
    candidates: Dict[str, Dict[Polarity, tuple[float, str]]] = {}

    for word, neighbors in zip(source_words, results):
        if neighbors is None:
            oov += 1
            continue
        if not neighbors:
            no_neighbor += 1
            continue
        translated += 1
        polarity = lexicon.entries[word]
        for neighbor in neighbors:
            by_polarity = candidates.setdefault(neighbor.word, {})
            best = by_polarity.get(polarity)
            # source words are visited in sorted order, so ties keep the smaller origin
            if best is None or neighbor.similarity > best[0]:
                by_polarity[polarity] = (neighbor.similarity, word)

    entries: Dict[str, Polarity] = {}
    provenance: Dict[str, Provenance] = {}
    conflicts = 0
    for target_word, by_polarity in candidates.items():
        if len(by_polarity) > 1:
            conflicts += 1
            continue
        (polarity, (similarity, origin)), = by_polarity.items()
        entries[target_word] = polarity
        provenance[target_word] = Provenance(
            method=ProvenanceMethod.TRANSFERRED, origin=origin, similarity=similarity
        )

    overrides = 0
    if native is not None:
        for word in native.entries:
            # only words reached by transfer, conflict drops included
            if word not in candidates:
                continue
            overrides += 1
            entries[word] = native.entries[word]
            provenance[word] = native.provenance_of(word)

    output = make_lexicon(f"{lexicon.name}.{tgt.language_tag}", entries, provenance, conflicts)
    report = TransferReport(
        source_size=len(source_words),
        translated_source_words=translated,
        oov_source_words=oov,
        no_neighbor_source_words=no_neighbor,
        conflict_drops=conflicts,
        native_overrides=overrides,
        output_size=len(output),
        lambda_used=lambda_threshold,
    )

    log_report(logger, f"Transfer of '{lexicon.name}'", report.as_fields())
    if not output.entries:
        logger.warning(
            f"Transfer of '{lexicon.name}' produced an empty lexicon at lambda={lambda_threshold}"
        )
    return output, report
