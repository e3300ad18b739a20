import numpy as np

from strucdiv.classifier import ClassifierConfig, init_classifier


def random_pool(n, input_dim=7, seed=0):
    """Untrained classifiers with distinct configs: cheap, varied votes."""
    rng = np.random.default_rng(seed)
    acts = ["linear", "logistic", "softmax"]
    out = []
    for i in range(n):
        cfg = ClassifierConfig(acts[i % 3], 7 + i % 15, (0.01, 0.02, 0.03, 0.04, 0.05)[i % 5])
        out.append(init_classifier(cfg, input_dim, int(rng.integers(2**31))))
    return out
