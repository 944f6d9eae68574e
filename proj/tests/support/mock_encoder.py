#!/usr/bin/env python3
"""Protocol-compatible stand-in for tools/hf_encoder.py used by the
subprocess-encoder tests. Whitespace tokenizer, arithmetic hidden states:

    state[layer][pos][c] = ((id*31 + layer*7 + pos*3 + c) % 1000) / 1000
"""

import argparse
import json
import struct
import sys

LAYERS = 3
HIDDEN = 4
UNK_ID = 1


def send(obj):
    sys.stdout.write(json.dumps(obj) + "\n")
    sys.stdout.flush()


def vocab_id(piece):
    if piece == "[UNK]":
        return UNK_ID
    if piece == "[CLS]":
        return 2
    if piece == "[SEP]":
        return 3
    return 10 + sum(piece.encode()) % 9973


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--model", required=True)
    parser.parse_args()

    send(
        {
            "event": "ready",
            "model_id": "mock",
            "layers": LAYERS,
            "hidden": HIDDEN,
            "unk_token": "[UNK]",
            "unk_id": UNK_ID,
            "unk_policy": "unk",
            "max_len": 64,
            "tokenizer_version": "mock-tokenizer-1",
        }
    )
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        req = json.loads(line)
        if req["op"] == "quit":
            return 0
        if req["op"] == "tokenize":
            sentence = req["sentence"]
            pieces = [
                {"piece": "[CLS]", "start": 0, "end": 0, "id": 2, "marker": True}
            ]
            pos = 0
            for word in sentence.split(" "):
                if word:
                    pieces.append(
                        {
                            "piece": word,
                            "start": pos,
                            "end": pos + len(word),
                            "id": vocab_id(word),
                            "marker": False,
                        }
                    )
                pos += len(word) + 1
            end = len(sentence)
            pieces.append(
                {"piece": "[SEP]", "start": end, "end": end, "id": 3, "marker": True}
            )
            send({"event": "tokens", "pieces": pieces})
        elif req["op"] == "states":
            ids = req["ids"]
            send(
                {
                    "event": "states",
                    "layers": LAYERS + 1,
                    "seq": len(ids),
                    "hidden": HIDDEN,
                    "dtype": "f32le",
                }
            )
            values = []
            for layer in range(LAYERS + 1):
                for pos, token_id in enumerate(ids):
                    for c in range(HIDDEN):
                        values.append(
                            ((token_id * 31 + layer * 7 + pos * 3 + c) % 1000) / 1000.0
                        )
            sys.stdout.buffer.write(struct.pack(f"<{len(values)}f", *values))
            sys.stdout.buffer.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
