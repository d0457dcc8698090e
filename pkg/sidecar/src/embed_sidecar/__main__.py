"""Run the sidecar: python -m embed_sidecar [--port N].

Environment:
  EMBED_MODEL_PATH / EMBED_MODEL  checkpoint directory or hub name
                                  (default recobo/chemical-bert-uncased)
  EMBED_POOLING                   cls (default) or mean
  EMBED_SIDECAR_PORT              default 8601
"""

import argparse
import os

import uvicorn

from .app import create_app
from .encoder import TransformerEncoder

DEFAULT_CHECKPOINT = "recobo/chemical-bert-uncased"


def main(argv=None):
    parser = argparse.ArgumentParser(prog="embed-sidecar", description=__doc__)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int,
                        default=int(os.environ.get("EMBED_SIDECAR_PORT", "8601")))
    args = parser.parse_args(argv)

    checkpoint = (os.environ.get("EMBED_MODEL_PATH")
                  or os.environ.get("EMBED_MODEL", DEFAULT_CHECKPOINT))
    pooling = os.environ.get("EMBED_POOLING", "cls")
    app = create_app(lambda: TransformerEncoder(checkpoint, pooling=pooling))
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")


if __name__ == "__main__":
    main()
