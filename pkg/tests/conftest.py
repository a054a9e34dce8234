import pytest

from gaussenhance import corpus


@pytest.fixture(scope="session")
def corpus_images():
    return corpus.synthetic_corpus()
