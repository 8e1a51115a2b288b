#!/usr/bin/env python3
"""Fetch the four benchmark datasets into data/ in UCI .data layout.

The UCI repository is not always reachable, so every file is extracted from a
pinned artifact on PyPI (content-addressed URL plus SHA-256) and rewritten in
the comma-separated layout of the original UCI distribution. The output files
are verified against data/SHA256SUMS.

Usage: python3 scripts/fetch_datasets.py [--data-dir DIR] [--force]
"""

import argparse
import gzip
import hashlib
import io
import os
import sys
import tarfile
import urllib.request
import zipfile

PYPI = "https://files.pythonhosted.org/packages/"

ARTIFACTS = {
    "orange": (
        PYPI + "bb/4e/540bf3fe40ec0a35480e0476f6bbc08cd04638c49de372d31dd50df2773a/"
        "Orange-2.7.8-cp27-none-win32.whl",
        "c6fd9e1b19d71d71fba597ab94a8114aecef6307cfe1d3bb22fd09e5b6a549b1",
    ),
    "wittgenstein": (
        PYPI + "94/0e/a15dc9131d5bebaf2a18e0f5a68b3ad1685319808f354371846e22c9170c/"
        "wittgenstein-0.3.4-py3-none-any.whl",
        "99c771d1917ecbd967b7be5bd008789f95c378207456c5a3a99d3a069f69011e",
    ),
    "imbalanced_databases": (
        PYPI + "9e/44/5bc6bf4d05a19e711fcdbceb0f4fcc48b46b85d3f140285bacafee2a40d8/"
        "imbalanced_databases-0.1.1-py3-none-any.whl",
        "9fc58c203f1adfebe54bef86d4b3dfe1f6f9f027a9ef35d47031981997391add",
    ),
    "scikit-learn": (
        PYPI + "98/c2/a7855e41c9d285dfe86dc50b250978105dce513d6e459ea66a6aeb0e1e0c/"
        "scikit_learn-1.7.2.tar.gz",
        "20e9e49ecd130598f1ca38a1d85090e1a600147b9c02fa6f15d69cb53d968fda",
    ),
}

SKLEARN_KRKP = "sklearn/datasets/tests/data/openml/id_3/data-v1-dl-3.arff.gz"


def download(name, cache):
    url, digest = ARTIFACTS[name]
    path = os.path.join(cache, url.rsplit("/", 1)[1])
    if not os.path.exists(path):
        print(f"downloading {url}", file=sys.stderr)
        with urllib.request.urlopen(url, timeout=120) as resp:
            blob = resp.read()
        with open(path, "wb") as out:
            out.write(blob)
    with open(path, "rb") as f:
        blob = f.read()
    actual = hashlib.sha256(blob).hexdigest()
    if actual != digest:
        raise SystemExit(f"checksum mismatch for {path}: {actual}")
    return blob


def orange_tab_to_data(text):
    # Orange .tab: three header lines (names, types, flags), tab separated,
    # empty cell = missing. Column order already matches the UCI file.
    lines = text.splitlines()[3:]
    rows = []
    for line in lines:
        if not line.strip():
            continue
        cells = [c.strip() or "?" for c in line.split("\t")]
        rows.append(",".join(cells))
    return "\n".join(rows) + "\n"


def breast_cancer(cache):
    blob = download("orange", cache)
    with zipfile.ZipFile(io.BytesIO(blob)) as z:
        text = z.read("Orange/datasets/breast-cancer.tab").decode("latin1")
    return orange_tab_to_data(text)


def house_votes(cache):
    blob = download("wittgenstein", cache)
    with zipfile.ZipFile(io.BytesIO(blob)) as z:
        text = z.read("tests/house-votes-84.csv").decode("ascii")
    lines = [l.strip() for l in text.splitlines()[1:] if l.strip()]
    return "\n".join(lines) + "\n"


def pima(cache):
    blob = download("imbalanced_databases", cache)
    with zipfile.ZipFile(io.BytesIO(blob)) as z:
        text = z.read("imbalanced_databases/data/pima/pima.dat").decode("ascii")
    labels = {"positive": "1", "negative": "0"}
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("@"):
            continue
        cells = [c.strip() for c in line.split(",")]
        cells[-1] = labels[cells[-1]]
        rows.append(",".join(cells))
    return "\n".join(rows) + "\n"


def kr_vs_kp(cache):
    arff = None
    try:
        import sklearn  # noqa: F401

        local = os.path.join(os.path.dirname(os.path.dirname(sklearn.__file__)), SKLEARN_KRKP)
        if os.path.exists(local):
            with open(local, "rb") as f:
                arff = gzip.decompress(f.read()).decode("ascii")
    except ImportError:
        pass
    if arff is None:
        blob = download("scikit-learn", cache)
        with tarfile.open(fileobj=io.BytesIO(blob), mode="r:gz") as t:
            member = "scikit_learn-1.7.2/" + SKLEARN_KRKP
            arff = gzip.decompress(t.extractfile(member).read()).decode("ascii")
    rows = []
    in_data = False
    for line in arff.splitlines():
        line = line.strip()
        if not line or line.startswith("%"):
            continue
        if line.lower() == "@data":
            in_data = True
            continue
        if in_data:
            rows.append(line.replace("'", ""))
    return "\n".join(rows) + "\n"


DATASETS = {
    "breast-cancer.data": breast_cancer,
    "pima-indians-diabetes.data": pima,
    "kr-vs-kp.data": kr_vs_kp,
    "house-votes-84.data": house_votes,
}


def read_sums(path):
    sums = {}
    with open(path) as f:
        for line in f:
            if line.strip():
                digest, name = line.split()
                sums[name] = digest
    return sums


def main():
    here = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--data-dir", default=os.path.join(here, "data"))
    parser.add_argument("--cache-dir", default=os.path.join(here, "data", ".cache"))
    parser.add_argument("--force", action="store_true")
    args = parser.parse_args()

    os.makedirs(args.cache_dir, exist_ok=True)
    sums = read_sums(os.path.join(here, "data", "SHA256SUMS"))
    failed = False
    for name, produce in DATASETS.items():
        target = os.path.join(args.data_dir, name)
        if os.path.exists(target) and not args.force:
            content = open(target, "rb").read()
        else:
            content = produce(args.cache_dir).encode("ascii")
            with open(target, "wb") as out:
                out.write(content)
        digest = hashlib.sha256(content).hexdigest()
        ok = sums.get(name) == digest
        failed |= not ok
        print(f"{name:32s} {len(content.splitlines()):5d} rows  {'ok' if ok else 'CHECKSUM MISMATCH ' + digest}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
