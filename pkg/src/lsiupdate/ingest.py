"""Readers, writers, and preprocessing for term-document data.

Covers the Matrix Market coordinate exchange format (the form the classic
SMART collections ship in), TREC-style qrels files, SMART triple-letter
weighting, and a minimal tokenizer for turning raw text into a count matrix.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .sparse import SparseMatrix

_MM_HEADER = "%%matrixmarket"
_TOKEN_RE = re.compile(r"[a-z0-9]+")

# Triple-letter codes, one per weighting slot: term frequency, inverse
# document frequency, normalization.
_TF_LETTERS = frozenset("lbx")
_IDF_LETTERS = frozenset("xp")
_NORM_LETTERS = frozenset("nx")


class FormatError(ValueError):
    """Malformed input file; message carries the offending line number."""


@dataclass(frozen=True)
class WeightingScheme:
    """SMART-style weighting: one triple for documents, one for queries.

    Letters follow the Kolda/O'Leary convention with natural log:
    tf slot      l: 1 + log(tf),  b: 1,  x: raw tf  (all for tf > 0)
    idf slot     x: none,  p: log((n - df) / df) floored at 0
    norm slot    n or x: none
    """

    documents: str = "lxn"
    queries: str = "bpx"

    def __post_init__(self):
        for triple in (self.documents, self.queries):
            if len(triple) != 3:
                raise ValueError(f"weighting triple must have 3 letters: {triple!r}")
            if triple[0] not in _TF_LETTERS:
                raise ValueError(f"unsupported tf letter {triple[0]!r}")
            if triple[1] not in _IDF_LETTERS:
                raise ValueError(f"unsupported idf letter {triple[1]!r}")
            if triple[2] not in _NORM_LETTERS:
                raise ValueError(f"unsupported normalization letter {triple[2]!r}")

    @classmethod
    def parse(cls, text: str) -> "WeightingScheme":
        """Parse the dotted 'ddd.qqq' form, e.g. 'lxn.bpx'."""
        doc, dot, query = text.strip().partition(".")
        if not dot:
            raise ValueError(f"expected '<docs>.<queries>', got {text!r}")
        return cls(documents=doc, queries=query)


def read_matrix_market(path) -> SparseMatrix:
    """Read a real/integer general coordinate Matrix Market file.

    File indices are 1-based and converted to 0-based; duplicate entries are
    rejected rather than summed so that weight files cannot silently collide.
    """
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        header = fh.readline()
        parts = header.strip().lower().split()
        if (len(parts) != 5 or parts[0] != _MM_HEADER or parts[1] != "matrix"
                or parts[2] != "coordinate"):
            raise FormatError(f"{path}:1: not a coordinate MatrixMarket header")
        if parts[3] not in ("real", "integer"):
            raise FormatError(f"{path}:1: unsupported field {parts[3]!r}")
        if parts[4] != "general":
            raise FormatError(f"{path}:1: unsupported symmetry {parts[4]!r}")
        lineno = 1
        size_line = None
        for line in fh:
            lineno += 1
            stripped = line.strip()
            if not stripped or stripped.startswith("%"):
                continue
            size_line = stripped
            break
        if size_line is None:
            raise FormatError(f"{path}: missing size line")
        try:
            rows, cols, nnz = (int(tok) for tok in size_line.split())
        except ValueError as exc:
            raise FormatError(f"{path}:{lineno}: bad size line {size_line!r}") from exc
        ri = np.empty(nnz, dtype=np.int64)
        ci = np.empty(nnz, dtype=np.int64)
        vals = np.empty(nnz, dtype=np.float64)
        seen: set[tuple[int, int]] = set()
        count = 0
        for line in fh:
            lineno += 1
            stripped = line.strip()
            if not stripped or stripped.startswith("%"):
                continue
            toks = stripped.split()
            if len(toks) != 3:
                raise FormatError(f"{path}:{lineno}: expected 'row col value'")
            try:
                i, j, v = int(toks[0]), int(toks[1]), float(toks[2])
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: bad entry {stripped!r}") from exc
            if not (1 <= i <= rows and 1 <= j <= cols):
                raise FormatError(f"{path}:{lineno}: index ({i}, {j}) out of range")
            if (i, j) in seen:
                raise FormatError(f"{path}:{lineno}: duplicate entry ({i}, {j})")
            seen.add((i, j))
            if count >= nnz:
                raise FormatError(f"{path}:{lineno}: more entries than declared")
            ri[count], ci[count], vals[count] = i - 1, j - 1, v
            count += 1
        if count != nnz:
            raise FormatError(f"{path}: declared {nnz} entries, found {count}")
    return SparseMatrix.from_coo(rows, cols, ri, ci, vals)


def write_matrix_market(matrix: SparseMatrix, path) -> None:
    """Write in coordinate form with 17 significant digits (exact round trip)."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("%%MatrixMarket matrix coordinate real general\n")
        fh.write(f"{matrix.rows} {matrix.cols} {matrix.nnz}\n")
        for j in range(matrix.cols):
            for idx in range(matrix.indptr[j], matrix.indptr[j + 1]):
                fh.write(f"{matrix.indices[idx] + 1} {j + 1} {matrix.data[idx]:.17g}\n")


def read_qrels(path) -> dict[int, set[int]]:
    """TREC qrels: 'query-id iteration doc-id relevance' per line.

    Documents with relevance > 0 are kept. Ids are stored exactly as the file
    gives them (SMART collections number queries and documents from 1).
    """
    path = Path(path)
    qrels: dict[int, set[int]] = {}
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            toks = stripped.split()
            if len(toks) != 4:
                raise FormatError(f"{path}:{lineno}: expected 4 columns")
            try:
                qid, doc, rel = int(toks[0]), int(toks[2]), int(toks[3])
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: bad line {stripped!r}") from exc
            if rel > 0:
                qrels.setdefault(qid, set()).add(doc)
    return qrels


def _tf_transform(letter: str, data: np.ndarray) -> np.ndarray:
    if letter == "l":
        return 1.0 + np.log(data)
    if letter == "b":
        return np.ones_like(data)
    return data


def apply_weighting(tf: SparseMatrix, scheme: WeightingScheme, side: str,
                    df_source: SparseMatrix | None = None) -> SparseMatrix:
    """Weight a raw count matrix with the scheme triple for the given side.

    side is 'document' or 'query'. The probabilistic idf uses document
    frequencies from df_source when given (pass the document collection when
    weighting queries), else from tf itself. Counts must be nonnegative
    integers; the sparsity pattern only shrinks (the idf letter p can zero
    terms occurring in at least half the documents).
    """
    if side not in ("document", "query"):
        raise ValueError(f"side must be 'document' or 'query', got {side!r}")
    if np.any(tf.data < 0.0) or np.any(tf.data != np.rint(tf.data)):
        raise ValueError("weighting input must hold nonnegative integer counts")
    triple = scheme.documents if side == "document" else scheme.queries
    out = tf.map_values(lambda d: _tf_transform(triple[0], d))
    if triple[1] == "p":
        stats = df_source if df_source is not None else tf
        df = stats.row_counts().astype(np.float64)
        if stats.rows != tf.rows:
            raise ValueError("df_source row count must match the weighted matrix")
        n_docs = stats.cols
        with np.errstate(divide="ignore"):
            idf = np.where(df > 0.0, np.log(np.maximum(n_docs - df, 0.0) / np.maximum(df, 1.0)), 0.0)
        idf = np.maximum(idf, 0.0)
        out = out.scale_rows(idf)
    return out


def queries_from_terms(lines, vocabulary) -> SparseMatrix:
    """Term-count query matrix (one query per line) over a fixed vocabulary.

    Tokens outside the vocabulary are ignored; an all-unknown query becomes a
    zero column. Returns a terms-by-queries matrix of raw counts.
    """
    index = {term: i for i, term in enumerate(vocabulary)}
    rows, cols, vals = [], [], []
    lines = list(lines)
    for j, line in enumerate(lines):
        counts: dict[int, int] = {}
        for tok in _TOKEN_RE.findall(line.lower()):
            i = index.get(tok)
            if i is not None:
                counts[i] = counts.get(i, 0) + 1
        for i, c in counts.items():
            rows.append(i)
            cols.append(j)
            vals.append(float(c))
    return SparseMatrix.from_coo(len(index), len(lines), rows, cols, vals)


def read_query_lines(path, vocabulary) -> SparseMatrix:
    """Read a one-query-per-line term-list file against a vocabulary."""
    with Path(path).open("r", encoding="utf-8") as fh:
        return queries_from_terms(fh.read().splitlines(), vocabulary)


@dataclass(frozen=True)
class TokenizedCorpus:
    vocabulary: tuple[str, ...]
    counts: SparseMatrix
    empty_documents: tuple[int, ...]


def tokenize_corpus(texts, stoplist=(), min_global_tf: int = 1,
                    max_df: int | None = None) -> TokenizedCorpus:
    """Lowercase alphanumeric tokenization into a term-by-document count matrix.

    Terms below min_global_tf total occurrences or appearing in more than
    max_df documents are dropped. Documents left with no terms stay as zero
    columns and are reported in empty_documents.
    """
    stop = {w.lower() for w in stoplist}
    doc_tokens = []
    for text in texts:
        doc_tokens.append([t for t in _TOKEN_RE.findall(text.lower()) if t not in stop])
    totals: dict[str, int] = {}
    dfs: dict[str, int] = {}
    for tokens in doc_tokens:
        for tok in tokens:
            totals[tok] = totals.get(tok, 0) + 1
        for tok in set(tokens):
            dfs[tok] = dfs.get(tok, 0) + 1
    vocab = sorted(
        tok for tok, total in totals.items()
        if total >= min_global_tf and (max_df is None or dfs[tok] <= max_df)
    )
    index = {tok: i for i, tok in enumerate(vocab)}
    rows, cols, vals = [], [], []
    empty = []
    for j, tokens in enumerate(doc_tokens):
        counts: dict[int, int] = {}
        for tok in tokens:
            i = index.get(tok)
            if i is not None:
                counts[i] = counts.get(i, 0) + 1
        if not counts:
            empty.append(j)
        for i, c in counts.items():
            rows.append(i)
            cols.append(j)
            vals.append(float(c))
    matrix = SparseMatrix.from_coo(len(vocab), len(doc_tokens), rows, cols, vals)
    return TokenizedCorpus(tuple(vocab), matrix, tuple(empty))
