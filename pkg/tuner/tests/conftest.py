import numpy as np
import pytest

from masktune import ArticleRecord, build_tiny_checkpoint, load_checkpoint


@pytest.fixture(scope="session")
def checkpoint_dir(tmp_path_factory):
    directory = tmp_path_factory.mktemp("checkpoint")
    build_tiny_checkpoint(directory, seed=0)
    return directory


@pytest.fixture
def model_and_tokenizer(checkpoint_dir):
    # reload per test: tuning mutates the model in place
    return load_checkpoint(checkpoint_dir)


@pytest.fixture(scope="session")
def article_corpus(checkpoint_dir):
    """24 labeled articles over the fixture's own vocabulary."""
    _, tokenizer = load_checkpoint(checkpoint_dir)
    words = sorted(w for w in tokenizer.get_vocab()
                   if w.isalpha() and w not in ("news", "rumor"))
    rng = np.random.default_rng(7)
    return [
        ArticleRecord(f"a{i:02d}", " ".join(rng.choice(words, size=12)), i % 2)
        for i in range(24)
    ]
