#!/usr/bin/env python3
"""Hidden-state helper for the C++ pipeline.

Speaks line-delimited JSON on stdin/stdout (protocol in docs/formats.md):

  -> {"op": "tokenize", "sentence": "..."}
  <- {"event": "tokens", "pieces": [{"piece", "start", "end", "id", "marker"}]}

  -> {"op": "states", "ids": [int, ...]}
  <- {"event": "states", "layers": L+1, "seq": T, "hidden": H, "dtype": "f32le"}
     followed by (L+1)*T*H little-endian float32 bytes

  -> {"op": "quit"}

Offsets are Python string indices (codepoints). Inference only; no gradients.
"""

import argparse
import json
import sys


def send(obj):
    sys.stdout.write(json.dumps(obj) + "\n")
    sys.stdout.flush()


def fail(message):
    send({"event": "error", "message": message})


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--model", required=True)
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--local-files-only", action="store_true")
    args = parser.parse_args()

    try:
        import torch
        from transformers import AutoModel, AutoTokenizer
    except Exception as exc:  # noqa: BLE001
        fail(f"transformers/torch unavailable: {exc}")
        return 3

    try:
        tokenizer = AutoTokenizer.from_pretrained(
            args.model, local_files_only=args.local_files_only
        )
        model = AutoModel.from_pretrained(
            args.model,
            output_hidden_states=True,
            local_files_only=args.local_files_only,
        )
        model.eval()
        model.to(args.device)
    except Exception as exc:  # noqa: BLE001
        fail(f"cannot load model '{args.model}': {exc}")
        return 3

    torch.manual_seed(0)
    torch.use_deterministic_algorithms(True, warn_only=True)

    unk_token = tokenizer.unk_token
    unk_policy = "unk"
    if unk_token is None:
        unk_token = tokenizer.mask_token
        unk_policy = "mask"
    if unk_token is None:
        fail("tokenizer has neither an unk nor a mask token")
        return 3

    send(
        {
            "event": "ready",
            "model_id": args.model,
            "layers": model.config.num_hidden_layers,
            "hidden": model.config.hidden_size,
            "unk_token": unk_token,
            "unk_id": tokenizer.convert_tokens_to_ids(unk_token),
            "unk_policy": unk_policy,
            "max_len": tokenizer.model_max_length
            if tokenizer.model_max_length < 1_000_000
            else 0,
            "tokenizer_version": f"{tokenizer.__class__.__name__}/"
            f"{getattr(tokenizer, 'vocab_size', 0)}",
        }
    )

    special_ids = set(tokenizer.all_special_ids)
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        try:
            req = json.loads(line)
        except json.JSONDecodeError as exc:
            fail(f"bad request: {exc}")
            continue
        op = req.get("op")
        if op == "quit":
            return 0
        if op == "tokenize":
            sentence = req["sentence"]
            enc = tokenizer(
                sentence,
                return_offsets_mapping=True,
                add_special_tokens=True,
            )
            pieces = []
            tokens = tokenizer.convert_ids_to_tokens(enc["input_ids"])
            for token, token_id, (start, end) in zip(
                tokens, enc["input_ids"], enc["offset_mapping"]
            ):
                pieces.append(
                    {
                        "piece": token,
                        "start": start,
                        "end": end,
                        "id": token_id,
                        "marker": token_id in special_ids,
                    }
                )
            send({"event": "tokens", "pieces": pieces})
        elif op == "states":
            ids = req["ids"]
            with torch.no_grad():
                output = model(
                    input_ids=torch.tensor([ids], device=args.device),
                    attention_mask=torch.ones(1, len(ids), dtype=torch.long,
                                              device=args.device),
                )
            # hidden_states: (L+1) tensors of shape (1, T, H); layer 0 is the
            # input embedding layer.
            states = torch.stack(output.hidden_states, dim=0)[:, 0, :, :]
            states = states.to(torch.float32).cpu().contiguous()
            layers, seq, hidden = states.shape
            send(
                {
                    "event": "states",
                    "layers": layers,
                    "seq": seq,
                    "hidden": hidden,
                    "dtype": "f32le",
                }
            )
            sys.stdout.buffer.write(states.numpy().tobytes())
            sys.stdout.buffer.flush()
        else:
            fail(f"unknown op: {op}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
