"""Pure-numpy skip-gram inner loop; the fallback when the extension is absent.

Replays the same LCG draw sequence as the compiled backend, so the trained
pair schedule is identical; arithmetic is batched per (center, context) pair
over the positive target and its negatives, so low-order float rounding may
differ from the compiled core.
"""

from __future__ import annotations

from bisect import bisect_left

import numpy as np

_MULT = 25214903917
_INC = 11
_MASK = (1 << 64) - 1


def train_chunk(
    syn0,
    syn1,
    data,
    offsets,
    keep_prob,
    cum_table,
    window,
    negatives,
    initial_lr,
    min_alpha,
    subsample_enabled,
    state,
    processed,
    total_planned,
):
    cum = cum_table.tolist()
    domain = cum[-1]
    keep = keep_prob.tolist()
    tokens = data.tolist()
    bounds = offsets.tolist()
    obj_sum = 0.0
    obj_terms = 0
    # one label template per batch size; index 0 is the positive target
    label_templates = [np.zeros(k) for k in range(negatives + 2)]
    for template in label_templates[1:]:
        template[0] = 1.0

    with np.errstate(over="ignore"):
        for s in range(len(bounds) - 1):
            sentence = tokens[bounds[s] : bounds[s + 1]]
            alpha = initial_lr * (1.0 - processed / (total_planned + 1.0))
            if alpha < min_alpha:
                alpha = min_alpha
            if subsample_enabled:
                kept = []
                for w in sentence:
                    state = (state * _MULT + _INC) & _MASK
                    if keep[w] >= (state & 0xFFFF) / 65536.0:
                        kept.append(w)
            else:
                kept = sentence
            processed += len(sentence)

            n = len(kept)
            for pos in range(n):
                center = kept[pos]
                state = (state * _MULT + _INC) & _MASK
                radius = window - state % window
                lo = pos - radius
                if lo < 0:
                    lo = 0
                hi = pos + radius + 1
                if hi > n:
                    hi = n
                for j in range(lo, hi):
                    if j == pos:
                        continue
                    context = kept[j]
                    targets = [center]
                    for _ in range(negatives):
                        state = (state * _MULT + _INC) & _MASK
                        candidate = bisect_left(cum, (state >> 16) % domain)
                        if candidate != center:
                            targets.append(candidate)
                    idx = np.array(targets, dtype=np.intp)
                    out_rows = syn1[idx]
                    in_row = syn0[context]
                    scores = (out_rows @ in_row).astype(np.float64)
                    sig = 1.0 / (1.0 + np.exp(-scores))
                    grad = ((label_templates[len(targets)] - sig) * alpha).astype(
                        np.float32
                    )
                    obj_sum += float(
                        -np.logaddexp(0.0, -scores[0]) - np.logaddexp(0.0, scores[1:]).sum()
                    )
                    obj_terms += len(targets)
                    in_delta = grad @ out_rows
                    update = grad[:, None] * in_row[None, :]
                    if len(set(targets)) == len(targets):
                        syn1[idx] += update
                    else:
                        np.add.at(syn1, idx, update)
                    syn0[context] += in_delta

    return state, processed, obj_sum, obj_terms
