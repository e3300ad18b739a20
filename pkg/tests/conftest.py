import importlib

import pytest
from hypothesis import settings

from strucdiv.classifier import ClassifierConfig, init_classifier, train
from strucdiv.data import generate_synthetic, partition

evolve_mod = importlib.import_module("strucdiv.evolve")
harness_mod = importlib.import_module("strucdiv.harness")

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


@pytest.fixture(autouse=True)
def monotone_ga(monkeypatch):
    """Check the elitism invariant on every GA run made anywhere in the suite."""
    real = evolve_mod.evolve_votes

    def checked(votes, y, target, ga, *args, **kwargs):
        res = real(votes, y, target, ga, *args, **kwargs)
        if ga.elitism_count >= 1:
            h = res.fitness_history
            assert all(b >= a for a, b in zip(h, h[1:])), h
        return res

    monkeypatch.setattr(evolve_mod, "evolve_votes", checked)
    monkeypatch.setattr(harness_mod, "evolve_votes", checked)


@pytest.fixture(scope="session")
def small_data():
    return partition(generate_synthetic(300, 0.5, seed=3, separation=2.0), seed=3)


@pytest.fixture(scope="session")
def small_pool(small_data):
    X, y = small_data.split("train")
    cfgs = [
        ClassifierConfig("logistic", 7, 0.05),
        ClassifierConfig("linear", 9, 0.03),
        ClassifierConfig("softmax", 12, 0.01),
        ClassifierConfig("logistic", 21, 0.02),
        ClassifierConfig("linear", 15, 0.04),
    ]
    return [train(init_classifier(c, small_data.input_dim, seed=i), X, y, epochs=3) for i, c in enumerate(cfgs)]


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when != "call" or "test_acceptance" not in rep.nodeid:
                continue
            props = dict(rep.user_properties)
            if "criterion" in props:
                lines.append((props["criterion"], props.get("title", ""), outcome.upper(), props.get("detail", "")))
    if lines:
        terminalreporter.section("acceptance criteria")
        for num, title, outcome, detail in sorted(lines):
            terminalreporter.write_line(f"criterion {num}: {outcome:6s} {title} {detail}".rstrip())
