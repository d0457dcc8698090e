#!/usr/bin/env python3
"""Record an /embed exchange into the main package's test fixtures.

Usage: python3 record_fixture.py http://127.0.0.1:8601 ../tests/fixtures/remote_embed_fixture.json

The recorded request/response pair lets the remote-backend tests replay a
real sidecar exchange without the service running.
"""

import json
import sys

import requests

TEXTS = [
    "Catalytic hydrogenation of carbon dioxide.",
    "An ontology class describing reaction vessels.",
]


def main(url, out_path):
    response = requests.post(f"{url.rstrip('/')}/embed", json={"texts": TEXTS}, timeout=60)
    response.raise_for_status()
    payload = response.json()
    assert len(payload["vectors"]) == len(TEXTS)
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump({"request": {"texts": TEXTS}, "response": payload}, fh)
    print(f"recorded {len(TEXTS)} texts x {len(payload['vectors'][0])} dims "
          f"from {payload['model_id']} -> {out_path}")


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
