"""Launch the fill-mask sidecar. The model is loaded before binding, so a
bad model path fails fast."""

from __future__ import annotations

import argparse
import logging
import sys


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="mlm-server", description=__doc__)
    parser.add_argument("--model", required=True, help="model name or local checkpoint path")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8710)
    parser.add_argument("--device", default="cpu", help="torch device hint (default cpu)")
    parser.add_argument("--max-context", type=int, default=None,
                        help="cap on encoded pattern length (default: model limit)")
    args = parser.parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")

    import uvicorn

    from mlm_server.model import MaskedLmModel
    from mlm_server.service import create_app

    try:
        model = MaskedLmModel(args.model, device=args.device, max_context=args.max_context)
    except Exception as exc:
        logging.getLogger("mlm-server").error("cannot load model %r: %s", args.model, exc)
        return 2
    uvicorn.run(create_app(model), host=args.host, port=args.port, log_level="warning")
    return 0


if __name__ == "__main__":
    sys.exit(main())
