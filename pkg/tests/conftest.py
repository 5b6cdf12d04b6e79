import pytest
from loguru import logger

from loewner_lab import NumericConfig


@pytest.fixture
def cfg():
    return NumericConfig()


@pytest.fixture(autouse=True)
def single_thread(monkeypatch):
    monkeypatch.setenv("LOEWNER_LAB_THREADS", "1")


@pytest.fixture
def warnings_logged():
    messages = []
    handler_id = logger.add(messages.append, level="WARNING", format="{message}")
    yield messages
    logger.remove(handler_id)
