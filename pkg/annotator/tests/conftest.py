import json

import pytest

CLUSTER_VOCAB = {
    0: ["galaxy", "nebula", "comet", "orbit", "cosmos"],
    1: ["sourdough", "yeast", "flour", "oven", "crumb"],
    2: ["penalty", "goalkeeper", "midfield", "corner", "offside"],
}


def cluster_fixture_lines(posts_per_cluster=20, communities=("news",)):
    """Three disjoint-vocabulary clusters; ground truth is the cluster id."""
    lines, truth = [], {}
    seq = 0
    for community in communities:
        for cluster, vocab in CLUSTER_VOCAB.items():
            for i in range(posts_per_cluster):
                pid = f"{community}-{seq:05d}"
                seq += 1
                words = [vocab[(i + j) % len(vocab)] for j in range(6)]
                lines.append(json.dumps({
                    "id": pid, "subreddit": community,
                    "created_utc": 1600000000 + seq,
                    "title": " ".join(words),
                }))
                truth[pid] = cluster
    return lines, truth


@pytest.fixture
def cluster_dump(tmp_path):
    lines, truth = cluster_fixture_lines()
    path = tmp_path / "posts.ndjson"
    path.write_text("\n".join(lines) + "\n")
    return path, truth


@pytest.fixture(scope="session")
def tiny_model_dir(tmp_path_factory):
    """A local, randomly initialized 3-class sequence classifier.

    Built offline so tests never depend on a model hub; predictions are
    arbitrary but deterministic, which is all the contract tests need.
    """
    import torch
    from transformers import (
        DistilBertConfig,
        DistilBertForSequenceClassification,
        DistilBertTokenizer,
    )

    root = tmp_path_factory.mktemp("tinymodel")
    vocab = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
    vocab += [w for ws in CLUSTER_VOCAB.values() for w in ws]
    vocab_file = root / "vocab.txt"
    vocab_file.write_text("\n".join(vocab))
    tokenizer = DistilBertTokenizer(str(vocab_file))

    torch.manual_seed(7)
    config = DistilBertConfig(
        vocab_size=len(vocab), dim=32, n_layers=1, n_heads=2, hidden_dim=64,
        num_labels=3, id2label={0: "F", 1: "T", 2: "U"},
        label2id={"F": 0, "T": 1, "U": 2},
    )
    model = DistilBertForSequenceClassification(config)
    target = root / "model"
    model.save_pretrained(target)
    tokenizer.save_pretrained(target)
    return target
