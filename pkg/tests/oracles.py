"""Brute-force reference implementations used to pin expected values.

These stay deliberately naive and independent of the library's streaming
code paths: everything is built from explicit position lists over small
corpora.
"""

from __future__ import annotations

from collections import Counter


def scorable_layout(tokens, connectors):
    """(scorable tokens, gaps) where gaps[i] is the list of connectors
    strictly between scorable i and scorable i+1."""
    scorable = []
    gaps = []
    pending = []
    for tok in tokens:
        if tok in connectors:
            if scorable:
                pending.append(tok)
            continue
        if scorable:
            gaps.append(list(pending))
        scorable.append(tok)
        pending = []
    return scorable, gaps


def oracle_pass_counts(unit_sents, connectors):
    """Unit counts, pair counts and type count for one scoring pass."""
    unit_counts = Counter()
    pair_counts = Counter()
    for sent in unit_sents:
        scorable, gaps = scorable_layout_units(sent, connectors)
        unit_counts.update(scorable)
        for i in range(len(scorable) - 1):
            if len(gaps[i]) <= 1:
                pair_counts[(scorable[i], tuple(gaps[i]), scorable[i + 1])] += 1
    return unit_counts, pair_counts, len(unit_counts)


def scorable_layout_units(units, connectors):
    scorable = []
    gaps = []
    pending = []
    for unit in units:
        if len(unit) == 1 and unit[0] in connectors:
            if scorable:
                pending.append(unit[0])
            continue
        if scorable:
            gaps.append(list(pending))
        scorable.append(unit)
        pending = []
    return scorable, gaps


def oracle_score(count_ab, count_a, count_b, vocab_size, min_count):
    return (count_ab - min_count) * vocab_size / (count_a * count_b)


def unit_arity(unit, connectors):
    return sum(1 for t in unit if t not in connectors)


def oracle_accept(unit_counts, pair_counts, vocab_size, threshold, min_count, connectors):
    accepted = set()
    for (left, gap, right), c_ab in pair_counts.items():
        if unit_arity(left, connectors) + unit_arity(right, connectors) > 3:
            continue
        score = oracle_score(c_ab, unit_counts[left], unit_counts[right],
                             vocab_size, min_count)
        if score >= threshold:
            accepted.add((left, gap, right))
    return accepted


def oracle_join(unit_sents, accepted, connectors):
    """Greedy left-to-right join, rebuilt per sentence from the layout."""
    out = []
    for sent in unit_sents:
        result = []
        i = 0
        while i < len(sent):
            unit = sent[i]
            if len(unit) == 1 and unit[0] in connectors:
                result.append(unit)
                i += 1
                continue
            # find the next scorable unit and the connectors between
            j = i + 1
            gap = []
            while j < len(sent) and len(sent[j]) == 1 and sent[j][0] in connectors:
                gap.append(sent[j][0])
                j += 1
            if j < len(sent) and len(gap) <= 1 and (unit, tuple(gap), sent[j]) in accepted:
                result.append(unit + tuple(gap) + sent[j])
                i = j + 1
                continue
            result.append(unit)
            i += 1
        out.append(result)
    return out


def oracle_vocabulary(sentences, connectors, min_count, threshold):
    """Exhaustive two-pass phrase vocabulary: {key: (arity, count)}."""
    unit_sents = [[(t,) for t in s] for s in sentences]
    vocab = {}
    first_units = None
    for pass_no in range(2):
        unit_counts, pair_counts, vocab_size = oracle_pass_counts(unit_sents, connectors)
        if pass_no == 0:
            first_units = unit_counts
        accepted = oracle_accept(unit_counts, pair_counts, vocab_size,
                                 threshold, min_count, connectors)
        for key in accepted:
            left, gap, right = key
            joined = " ".join(left + gap + right)
            count = pair_counts[key]
            if count >= min_count:
                arity = unit_arity(left + gap + right, connectors)
                if joined in vocab:
                    vocab[joined] = (arity, vocab[joined][1] + count)
                else:
                    vocab[joined] = (arity, count)
        unit_sents = oracle_join(unit_sents, accepted, connectors)
    for (word,), count in first_units.items():
        if count >= min_count:
            vocab[word] = (1, count)
    return vocab


def oracle_segment(sentences, connectors, min_count, threshold):
    """Final segmentation under the oracle's accepted sets."""
    unit_sents = [[(t,) for t in s] for s in sentences]
    for _ in range(2):
        unit_counts, pair_counts, vocab_size = oracle_pass_counts(unit_sents, connectors)
        accepted = oracle_accept(unit_counts, pair_counts, vocab_size,
                                 threshold, min_count, connectors)
        unit_sents = oracle_join(unit_sents, accepted, connectors)
    return [[" ".join(u) for u in sent] for sent in unit_sents]


def oracle_bucket_counts(segmented_docs, vocab_keys, connectors):
    """Naive recount of the component-increment rule for one bucket."""
    counts = Counter()
    for units in segmented_docs:
        for unit in units:
            parts = unit.split(" ")
            if len(parts) == 1:
                if unit in vocab_keys:
                    counts[unit] += 1
                continue
            if unit in vocab_keys:
                counts[unit] += 1
            for part in parts:
                if part not in connectors and part in vocab_keys:
                    counts[part] += 1
    return counts
