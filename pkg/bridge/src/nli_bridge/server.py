"""The bridge server: read scoring requests as JSON lines, answer in kind.

Requests:  {"id": str, "premise": str, "hypothesis": str}
Responses: {"id": str, "p_e": float, "p_c": float, "p_n": float}
           {"id": str|null, "error": str}  for malformed requests

Malformed input never kills the process; a model that fails to load does,
with a nonzero exit at startup. One request is answered per line read, in
order, so pipelined batches come back id-matched.
"""

from __future__ import annotations

import argparse
import json
import socket
import sys
from typing import IO

from .config import BridgeConfig, load_config
from .models import build_model


def _respond(model, mapping: dict[str, str], line: str) -> dict:
    try:
        request = json.loads(line)
    except json.JSONDecodeError as exc:
        return {"id": None, "error": f"bad JSON: {exc}"}
    if not isinstance(request, dict):
        return {"id": None, "error": "request must be a JSON object"}
    request_id = request.get("id")
    premise = request.get("premise")
    hypothesis = request.get("hypothesis")
    if not isinstance(premise, str) or not isinstance(hypothesis, str):
        return {"id": request_id, "error": "request needs string 'premise' and 'hypothesis'"}
    try:
        classes = model.classify(premise, hypothesis)
    except Exception as exc:  # keep serving even if one pair misbehaves
        return {"id": request_id, "error": f"scoring failed: {exc}"}
    response = {"id": request_id, "p_e": 0.0, "p_c": 0.0, "p_n": 0.0}
    for class_name, score in classes.items():
        field = mapping.get(class_name) or mapping.get(class_name.upper())
        if field is not None:
            response[field] = float(score)
    return response


def serve_stream(model, config: BridgeConfig, reader: IO[str], writer: IO[str]) -> int:
    """Answer every request line until the stream closes."""
    answered = 0
    for line in reader:
        line = line.strip()
        if not line:
            continue
        writer.write(json.dumps(_respond(model, config.label_mapping, line)) + "\n")
        writer.flush()
        answered += 1
    return answered


def serve_tcp(model, config: BridgeConfig, host: str, port: int) -> None:
    """Accept connections one at a time, each served to completion."""
    sock = socket.socket()
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    sock.bind((host, port))
    sock.listen(1)
    bound = sock.getsockname()
    print(f"listening on {bound[0]}:{bound[1]}", file=sys.stderr, flush=True)
    try:
        while True:
            conn, _ = sock.accept()
            stream = conn.makefile("rw", encoding="utf-8", newline="\n")
            try:
                serve_stream(model, config, stream, stream)
            finally:
                conn.close()
    finally:
        sock.close()


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="nli-bridge")
    parser.add_argument("--config", default=None,
                        help="JSON config selecting the model and label mapping")
    parser.add_argument("--tcp", default=None, metavar="HOST:PORT",
                        help="serve over TCP instead of stdio (port 0 picks a free one)")
    args = parser.parse_args(argv)

    try:
        config = load_config(args.config)
        model = build_model(config)
    except Exception as exc:
        print(f"startup failed: {exc}", file=sys.stderr)
        return 2
    print(f"model ready: {model.name}", file=sys.stderr, flush=True)

    if args.tcp:
        host, _, port = args.tcp.rpartition(":")
        if not host or not port.isdigit():
            print(f"bad --tcp address {args.tcp!r}", file=sys.stderr)
            return 2
        serve_tcp(model, config, host, int(port))
        return 0
    serve_stream(model, config, sys.stdin, sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
