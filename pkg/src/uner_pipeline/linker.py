"""Knowledge-base class lookup for link targets.

Each unique target resolves to an ordered list of ontology classes, either
from a persistent TSV cache or through a SPARQL endpoint (batched VALUES
queries with single-entity fallback, retries, and client-side rate
limiting). Response order is the canonical class order and is frozen into
the cache so reruns are deterministic. Unresolved targets are recorded, not
fatal.
"""

from __future__ import annotations

import logging
import os
import threading
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from urllib.parse import unquote

import requests

from .errors import DataError, QueryError

log = logging.getLogger(__name__)

DEFAULT_RESOURCE_BASE = "http://dbpedia.org/resource"
DEFAULT_ENDPOINT = "https://dbpedia.org/sparql"
ENDPOINT_ENV_VAR = "UNER_SPARQL_ENDPOINT"

# rdf:type lookup; the batch variant resolves many entities per request
SINGLE_QUERY_TEMPLATE = (
    "PREFIX rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#> "
    "SELECT ?type WHERE {{ <{uri}> rdf:type ?type }}"
)
BATCH_QUERY_TEMPLATE = (
    "PREFIX rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#> "
    "SELECT ?entity ?type WHERE {{ VALUES ?entity {{ {uris} }} ?entity rdf:type ?type }}"
)

_NAMESPACE_PREFIXES = {
    "http://dbpedia.org/ontology/": "dbo:",
    "http://www.w3.org/2002/07/owl#": "owl:",
    "http://www.w3.org/2000/01/rdf-schema#": "rdfs:",
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#": "rdf:",
    "http://schema.org/": "schema:",
    "http://xmlns.com/foaf/0.1/": "foaf:",
    "http://www.wikidata.org/entity/": "wikidata:",
    "http://www.ontologydesignpatterns.org/ont/dul/DUL.owl#": "dul:",
}

# characters emitted verbatim in entity URIs; underscores are reserved as the
# space marker, so literal underscores in a target are percent-encoded
_URI_SAFE = frozenset(
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-.~()!*',"
)


def build_entity_uri(target: str, resource_base: str = DEFAULT_RESOURCE_BASE) -> str:
    """Deterministic entity URI: spaces become underscores, the rest is
    percent-encoded so the URI round-trips to the original target."""
    if not target:
        raise DataError("cannot build an entity URI from an empty target")
    pieces: list[str] = []
    for ch in target:
        if ch == " ":
            pieces.append("_")
        elif ch == "_":
            pieces.append("%5F")
        elif ch in _URI_SAFE:
            pieces.append(ch)
        else:
            pieces.append("".join(f"%{byte:02X}" for byte in ch.encode("utf-8")))
    return f"{resource_base}/{''.join(pieces)}"


def target_from_uri(uri: str, resource_base: str = DEFAULT_RESOURCE_BASE) -> str:
    """Inverse of build_entity_uri."""
    tail = uri[len(resource_base) + 1 :]
    return unquote(tail.replace("_", " "))


def compact_class_name(class_uri: str) -> str:
    """Abbreviate well-known namespaces (dbo:, owl:, ...), else keep the IRI."""
    for namespace, prefix in _NAMESPACE_PREFIXES.items():
        if class_uri.startswith(namespace):
            return prefix + class_uri[len(namespace) :]
    return class_uri


@dataclass
class ClassCatalog:
    """Target -> ordered, duplicate-free list of class names."""

    entries: dict[str, list[str]] = field(default_factory=dict)


def load_catalog(path: str | Path) -> ClassCatalog:
    """Read a ``target<TAB>class1,class2,...`` TSV cache; # comments allowed."""
    path = Path(path)
    entries: dict[str, list[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            target, sep, classes_field = line.partition("\t")
            if not sep or not target:
                raise DataError(f"{path}:{line_no}: expected 'target<TAB>classes'")
            if target in entries:
                raise DataError(f"{path}:{line_no}: duplicate target {target!r}")
            entries[target] = [c for c in classes_field.split(",") if c]
    return ClassCatalog(entries)


def save_catalog(catalog: ClassCatalog, path: str | Path) -> None:
    """Write the cache atomically, targets sorted, class order preserved."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write("# target<TAB>comma-separated classes in canonical order\n")
        for target in sorted(catalog.entries):
            fh.write(f"{target}\t{','.join(catalog.entries[target])}\n")
    os.replace(tmp, path)


class RateLimiter:
    """Spaces request start times at least 1/per_second apart; thread-safe.

    The clock and sleep functions are injectable so tests can drive it with
    virtual time.
    """

    def __init__(self, per_second: float, clock=time.monotonic, sleep=time.sleep):
        self._interval = 1.0 / per_second if per_second and per_second > 0 else 0.0
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()
        self._next_free: float | None = None

    def wait(self) -> None:
        if not self._interval:
            return
        with self._lock:
            now = self._clock()
            if self._next_free is None or now >= self._next_free:
                self._next_free = now + self._interval
                delay = 0.0
            else:
                delay = self._next_free - now
                self._next_free += self._interval
        if delay > 0:
            self._sleep(delay)


class SparqlClient:
    """Thin SPARQL-protocol client: POSTs the query, expects JSON results."""

    def __init__(
        self,
        endpoint: str,
        *,
        resource_base: str = DEFAULT_RESOURCE_BASE,
        timeout: float = 30.0,
        retries: int = 3,
        batch_size: int = 50,
        rate_limit: float = 2.0,
        concurrency: int = 2,
        backoff: float = 0.5,
        session=None,
        sleep=time.sleep,
        clock=time.monotonic,
    ):
        self.endpoint = endpoint
        self.resource_base = resource_base
        self.timeout = timeout
        self.retries = max(1, retries)
        self.batch_size = max(1, batch_size)
        self.concurrency = max(1, concurrency)
        self._backoff = backoff
        self._session = session if session is not None else requests.Session()
        self._sleep = sleep
        self._limiter = RateLimiter(rate_limit, clock=clock, sleep=sleep)
        self._count_lock = threading.Lock()
        self.request_count = 0

    def _request(self, query: str) -> dict:
        """One query with retries; raises QueryError when attempts run out."""
        last_error: Exception | None = None
        for attempt in range(self.retries):
            self._limiter.wait()
            with self._count_lock:
                self.request_count += 1
            try:
                response = self._session.post(
                    self.endpoint,
                    data={"query": query, "format": "json"},
                    headers={"Accept": "application/sparql-results+json"},
                    timeout=self.timeout,
                )
                if response.status_code != 200:
                    raise QueryError(f"HTTP {response.status_code} from {self.endpoint}")
                payload = response.json()
                if "results" not in payload or "bindings" not in payload["results"]:
                    raise QueryError("response is not a SPARQL JSON result")
                return payload
            except QueryError as exc:
                last_error = exc
            except Exception as exc:  # connection/timeout/JSON errors
                last_error = exc
            if attempt + 1 < self.retries:
                self._sleep(self._backoff * (attempt + 1))
        raise QueryError(f"query failed after {self.retries} attempts: {last_error}")

    def query_classes(self, uri: str) -> list[str]:
        """Ordered, duplicate-free class list for one entity; [] if unknown."""
        payload = self._request(SINGLE_QUERY_TEMPLATE.format(uri=uri))
        classes: list[str] = []
        for binding in payload["results"]["bindings"]:
            value = binding.get("type", {}).get("value")
            if value is None:
                continue
            name = compact_class_name(value)
            if name not in classes:
                classes.append(name)
        return classes

    def query_batch(self, targets: list[str]) -> dict[str, list[str]]:
        """Class lists for many targets in one request.

        Every requested target appears in the result; targets without rows map
        to []. Raises QueryError when the request fails after retries.
        """
        uri_to_target = {build_entity_uri(t, self.resource_base): t for t in targets}
        uris = " ".join(f"<{uri}>" for uri in uri_to_target)
        payload = self._request(BATCH_QUERY_TEMPLATE.format(uris=uris))
        result: dict[str, list[str]] = {t: [] for t in targets}
        for binding in payload["results"]["bindings"]:
            entity = binding.get("entity", {}).get("value")
            value = binding.get("type", {}).get("value")
            if entity is None or value is None:
                continue
            target = uri_to_target.get(entity)
            if target is None:
                continue
            name = compact_class_name(value)
            if name not in result[target]:
                result[target].append(name)
        return result

    def resolve_batch(self, targets: list[str]) -> dict[str, list[str] | None]:
        """Batch query with per-target fallback; None marks unresolved targets."""
        try:
            return dict(self.query_batch(targets))
        except QueryError:
            log.warning("batch of %d targets failed, falling back to single queries", len(targets))
        result: dict[str, list[str] | None] = {}
        for target in targets:
            try:
                result[target] = self.query_classes(build_entity_uri(target, self.resource_base))
            except QueryError:
                result[target] = None
        return result


def resolve_all(
    targets: list[str],
    cache: ClassCatalog,
    client: SparqlClient | None = None,
    counters: Counter | None = None,
) -> ClassCatalog:
    """Resolve every target via the cache, then the endpoint for the misses.

    Returns the catalog restricted to the requested targets; newly queried
    entries are also added to ``cache`` (the caller persists it). Cache hits
    are never re-queried; without a client, misses are simply unresolved.
    """
    counters = counters if counters is not None else Counter()
    counters["targets"] += len(targets)
    result = ClassCatalog()
    misses: list[str] = []
    for target in targets:
        if target in cache.entries:
            result.entries[target] = list(cache.entries[target])
            counters["cache_hits"] += 1
        else:
            misses.append(target)
    if not misses:
        return result
    if client is None:
        counters["unresolved"] += len(misses)
        return result

    batches = [misses[i : i + client.batch_size] for i in range(0, len(misses), client.batch_size)]
    with ThreadPoolExecutor(max_workers=client.concurrency) as executor:
        outcomes = list(executor.map(client.resolve_batch, batches))
    for batch, outcome in zip(batches, outcomes):
        for target in batch:
            classes = outcome.get(target)
            if classes is None:
                counters["unresolved"] += 1
                continue
            counters["resolved_by_query"] += 1
            result.entries[target] = list(classes)
            cache.entries[target] = list(classes)
    return result


def endpoint_from_environment(configured: str | None) -> str | None:
    """Environment override for the endpoint; empty string disables it."""
    value = os.environ.get(ENDPOINT_ENV_VAR)
    if value is not None:
        return value or None
    return configured
