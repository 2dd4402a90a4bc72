"""
Text encoder and cosine similarity.

The builtin encoder is a hashed bag of words: each token goes to bucket
``blake2b_64(token) mod dim``, term frequencies are L2-normalized.
Precomputed vectors can replace it for node attributes.
"""
import hashlib
import json
import re
from pathlib import Path
from time import time
import numpy as np
import logging

from .exceptions import EmptyText, DimensionMismatch, ZeroVector, MissingVector, MalformedRecord

logger = logging.getLogger(__name__)

EMBEDDING_FORMAT_VERSION = 1
BUILTIN = "builtin-hashed-bow"
PRECOMPUTED = "precomputed"

_APOSTROPHE = re.compile(r"(?<=\w)['’](?=\w)")
_PUNCT = re.compile(r"[^\w\s]")


def tokenize(text):
    """Lowercase word tokens.

    Apostrophes inside a word are dropped ("don't" -> "dont"); any other
    punctuation separates tokens ("gibbs-sampler" -> "gibbs", "sampler").
    """
    text = _APOSTROPHE.sub("", text.lower())
    return _PUNCT.sub(" ", text).split()


def stable_hash(token):
    """Platform independent 64-bit hash of a token."""
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


class EncoderConfig:
    def __init__(self, kind=BUILTIN, dim=256, vectors_path=None) -> None:
        if kind not in (BUILTIN, PRECOMPUTED):
            raise ValueError("unknown encoder kind %r" % kind)
        if kind == PRECOMPUTED and vectors_path is None:
            raise ValueError("precomputed encoder needs vectors_path")
        if kind == PRECOMPUTED:
            dim = read_vectors_header(vectors_path)
        if int(dim) < 1:
            raise ValueError("dim must be positive, got %s" % dim)
        self.kind = kind
        self.dim = int(dim)
        self.vectors_path = vectors_path

    def as_dict(self):
        return {"kind": self.kind, "dim": self.dim, "vectors_path": self.vectors_path}

    def __repr__(self) -> str:
        return "EncoderConfig(kind=%r, dim=%s)" % (self.kind, self.dim)


class Encoder:
    """Encoder phi.

    Query texts are always encoded with the hashed bag of words at ``dim``,
    so that they share a space with builtin attribute vectors.
    """

    def __init__(self, cfg=None) -> None:
        self.cfg = cfg if cfg is not None else EncoderConfig()
        self._buckets = {}

    @property
    def dim(self):
        return self.cfg.dim

    def bucket(self, token):
        b = self._buckets.get(token)
        if b is None:
            b = stable_hash(token) % self.cfg.dim
            self._buckets[token] = b
        return b

    def encode(self, text):
        tokens = tokenize(text)
        if not tokens:
            raise EmptyText("text has no tokens: %r" % text[:80])
        buckets = [self.bucket(t) for t in tokens]
        vec = np.bincount(buckets, minlength=self.cfg.dim).astype(np.float64)
        return vec / np.linalg.norm(vec)

    def encode_batch(self, texts):
        out = np.zeros((len(texts), self.cfg.dim), dtype=np.float64)
        for i, text in enumerate(texts):
            out[i] = self.encode(text)
        return out


def encode(cfg, text):
    """Encode one text with the encoder described by cfg."""
    return Encoder(cfg).encode(text)


def cos_sim(a, b):
    """dot(a, b) / (|a| |b|)

    Raises:
        DimensionMismatch: a and b differ in length.
        ZeroVector: either vector has zero norm.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch("dims %s and %s differ" % (a.shape, b.shape))
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ZeroVector("cosine similarity of a zero vector")
    value = float(np.dot(a, b) / (na * nb))
    return min(1.0, max(-1.0, value))


def read_vectors_header(path):
    with open(path, encoding="utf-8") as f:
        header = f.readline().strip()
    if not header.startswith("dim="):
        raise ValueError("%s: first line must be dim=<D>, got %r" % (path, header))
    return int(header[4:])


def read_vectors(path):
    """Read a precomputed vectors file.

    Returns:
        dict: external_id -> float64 array
    """
    dim = read_vectors_header(path)
    vectors = {}
    with open(path, encoding="utf-8") as f:
        f.readline()
        for lineno, line in enumerate(f, start=2):
            line = line.strip()
            if not line:
                continue
            if "\t" not in line:
                raise MalformedRecord(path, lineno, "expected external_id<TAB>values")
            external_id, values = line.split("\t", 1)
            try:
                vec = np.array([float(x) for x in values.split(",")], dtype=np.float64)
            except ValueError:
                raise MalformedRecord(path, lineno, "values are not comma separated numbers") from None
            if len(vec) != dim:
                raise DimensionMismatch(
                    "%s line %s: %s values, header says dim=%s" % (path, lineno, len(vec), dim)
                )
            if not np.all(np.isfinite(vec)):
                raise MalformedRecord(path, lineno, "non-finite value")
            vectors[external_id.strip()] = vec
    return vectors


class CorpusEmbeddings:
    """One unit vector per node, float64 in memory, f32 on disk.

    Rows pass through f32 and are renormalized on construction, so a table
    built in memory and the same table reloaded from disk are identical.
    """

    def __init__(self, matrix, kind=BUILTIN) -> None:
        m = np.ascontiguousarray(matrix, dtype="<f4").astype(np.float64)
        norms = np.linalg.norm(m, axis=1)
        if np.any(norms == 0):
            raise ZeroVector("node %s has a zero vector" % int(np.argmin(norms)))
        self.matrix = m / norms[:, None]
        self.matrix.setflags(write=False)
        self.kind = kind

    @property
    def dim(self):
        return self.matrix.shape[1]

    def __len__(self):
        return self.matrix.shape[0]

    def vector(self, v):
        if v < 0 or v >= len(self):
            raise MissingVector(v)
        return self.matrix[v]

    def to_bytes(self):
        return self.matrix.astype("<f4").tobytes()

    def content_hash(self):
        return hashlib.sha256(self.to_bytes()).hexdigest()

    def save(self, index_dir):
        index_dir = Path(index_dir)
        index_dir.mkdir(parents=True, exist_ok=True)
        data = self.to_bytes()
        (index_dir / "embeddings.bin").write_bytes(data)
        manifest = {
            "format_version": EMBEDDING_FORMAT_VERSION,
            "dim": self.dim,
            "n": len(self),
            "encoder": self.kind,
            "content_hash": hashlib.sha256(data).hexdigest(),
        }
        (index_dir / "embeddings.json").write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )

    @classmethod
    def load(cls, index_dir):
        index_dir = Path(index_dir)
        manifest = json.loads((index_dir / "embeddings.json").read_text(encoding="utf-8"))
        if manifest["format_version"] != EMBEDDING_FORMAT_VERSION:
            raise ValueError(
                "embeddings format version %s, expected %s"
                % (manifest["format_version"], EMBEDDING_FORMAT_VERSION)
            )
        data = (index_dir / "embeddings.bin").read_bytes()
        if hashlib.sha256(data).hexdigest() != manifest["content_hash"]:
            raise ValueError("%s does not match its manifest hash" % (index_dir / "embeddings.bin"))
        matrix = np.frombuffer(data, dtype="<f4").reshape(manifest["n"], manifest["dim"])
        return cls(matrix, kind=manifest["encoder"])


def corpus_embeddings(cfg, g, index_dir=None):
    """Build the per-node vector table.

    Args:
        cfg (EncoderConfig): encoder description
        g (AttributedGraph): graph
        index_dir (str, optional): persist the table here when given.

    Raises:
        MissingVector: a precomputed file lacks a node.

    Returns:
        CorpusEmbeddings
    """
    tstart = time()
    if cfg.kind == PRECOMPUTED:
        vectors = read_vectors(cfg.vectors_path)
        matrix = np.zeros((g.n_nodes, cfg.dim), dtype=np.float64)
        for record in g.nodes:
            key = g.external_id(record.id)
            if key not in vectors:
                raise MissingVector(
                    record.id, "precomputed vectors lack node %s (%s)" % (record.id, key)
                )
            matrix[record.id] = vectors[key]
    else:
        matrix = Encoder(cfg).encode_batch([r.text for r in g.nodes])
    table = CorpusEmbeddings(matrix, kind=cfg.kind)
    logger.debug("Corpus embeddings: {:1.2f}".format(time() - tstart))
    if index_dir is not None:
        table.save(index_dir)
    return table
