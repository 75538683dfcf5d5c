from __future__ import annotations

import hashlib
import random

import pytest
from hypothesis import given, settings, strategies as st

from clinistruct.docstore import DocStore, IntegrityError, ObjectNotFoundError, ObjectRef
from clinistruct.scatter import scatter_corpus


def test_put_twice_single_copy(tmp_path):
    store = DocStore(tmp_path)
    a = store.put_object(b"hello")
    b = store.put_object(b"hello")
    assert a == b
    assert store.object_count() == 1
    assert len(store.records()) == 1


def test_empty_bytes_digest(tmp_path):
    ref = DocStore(tmp_path).put_object(b"")
    assert ref.digest == hashlib.sha256(b"").hexdigest()
    assert ref.size_bytes == 0


def test_layout(tmp_path):
    ref = DocStore(tmp_path).put_object(b"x")
    assert (tmp_path / "objects" / ref.digest[:2] / ref.digest).read_bytes() == b"x"
    assert (tmp_path / "index.jsonl").exists()
    assert str(ref) == f"sha256:{ref.digest}"


@settings(max_examples=50, deadline=None)
@given(st.binary(max_size=256))
def test_get_put_identity(tmp_path_factory, data):
    store = DocStore(tmp_path_factory.mktemp("s"))
    assert store.get_object(store.put_object(data)) == data


def test_unknown_digest(tmp_path):
    with pytest.raises(ObjectNotFoundError):
        DocStore(tmp_path).get_object("0" * 64)


def test_corruption_detected(tmp_path):
    store = DocStore(tmp_path)
    ref = store.put_object(b"payload")
    store.object_path(ref.digest).write_bytes(b"tampered")
    with pytest.raises(IntegrityError):
        store.get_object(ref)


def test_index_survives_reopen(tmp_path):
    store = DocStore(tmp_path)
    with store.batch():
        store.put_object(b"a", {"doc_id": "D1", "patient": "P_2"})
        store.put_object(b"b", {"doc_id": "D2", "patient": "P_1"})
    reopened = DocStore(tmp_path)
    assert reopened.records() == store.records()
    assert [r.tags["patient"] for r in reopened.records()] == ["P_1", "P_2"]


def test_corpus_dedup_and_queries(tmp_path, small_corpus):
    records, _ = small_corpus
    docs = scatter_corpus(records, 3)
    rng = random.Random(0)
    extra = rng.sample(docs, max(1, len(docs) // 20))
    store = DocStore(tmp_path)
    with store.batch():
        for d in [*docs, *extra]:
            store.put_object(d.body, {"doc_id": d.doc_id, "patient": d.patient_id,
                                      "disease_id": d.disease_id, "format": d.format.value,
                                      "created_at": d.created_at.isoformat()})
    assert store.object_count() == len({d.body for d in docs})
    # one record per logical document
    assert len(store.records()) == len(docs)

    copd = store.query_by_tags(disease_id="copd")
    assert {r.tags["doc_id"] for r in copd} == {d.doc_id for d in docs if d.disease_id == "copd"}
    assert store.query_by_tags() == store.records()
    assert store.query_by_tags({"disease_id": "no-such"}) == []
    keys = [(r.tags["patient"], r.tags["created_at"]) for r in store.records()]
    assert keys == sorted(keys)


def test_object_ref_for_bytes():
    assert ObjectRef.for_bytes(b"abc").size_bytes == 3
