"""A fielded BM25 index with a date filter.

Run: python demos/02_search_engine.py
"""

from datetime import datetime, timezone

from buglocate.searchengine import FieldedDocument, build_index, max_normalize, multi_field_query, query
from buglocate.textprep import tokenize


def utc(*args):
    return datetime(*args, tzinfo=timezone.utc)


reports = [
    ("BUG-1", "Crash when saving an empty document", "Saving fails with a NullPointerException.", utc(2021, 1, 5)),
    ("BUG-2", "Slow startup", "Startup takes a minute when the plugin cache is cold.", utc(2021, 2, 1)),
    ("BUG-3", "Document save loses formatting", "Bold text becomes plain after save.", utc(2021, 5, 20)),
    ("BUG-4", "Crash in plugin loader", "Loading a plugin without a manifest crashes.", None),
]
docs = [
    FieldedDocument(rid, {"summary": tokenize(s), "content": tokenize(d)}, {"closing_date": closed})
    for rid, s, d, closed in reports
]
index = build_index(docs, ["summary", "content"])

terms = tokenize("crash while saving the document")
print("summary only:     ", query(index, "summary", terms))
print("summary + content:", multi_field_query(index, {"summary": 1, "content": 1}, terms))

# A new report filed on 2021-03-01 may only learn from reports closed before
# it. Filtered documents are left out of the BM25 statistics as well, so the
# scores below are those of an index that never held BUG-3 or BUG-4.
created = utc(2021, 3, 1)
hits = multi_field_query(
    index,
    {"summary": 1, "content": 1},
    terms,
    filter=lambda a: a["closing_date"] is not None and a["closing_date"] < created,
)
print("closed before 2021-03-01:", hits)
print("max-normalized:", max_normalize(hits))
