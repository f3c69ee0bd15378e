import numpy as np
import pytest

from ldpcbench import CnRule, DecodeParams, LdpcCode, decode_batch
from ldpcbench.construction import BaseGraph, BgId, CodeConfig, expand


@pytest.fixture(scope="session")
def paper_code() -> LdpcCode:
    """K=512, E=1024 (rate 1/2): derives BG2 with Z=52 and 8 fillers."""
    return LdpcCode.build(512, 1024)


TOY_ENTRIES = ((0, 0, (0,) * 8), (0, 1, (1,) * 8))


@pytest.fixture(scope="session")
def toy_graph() -> BaseGraph:
    """1 base row x 2 base cols, shifts (0, 1); lifts at Z=2 to the 2x4
    matrix [[1,0,0,1],[0,1,1,0]]."""
    return BaseGraph(id=None, rows=1, cols=2, info_cols=1, entries=TOY_ENTRIES)


@pytest.fixture(scope="session")
def toy_code(toy_graph):
    pcm = expand(toy_graph, 2)
    # bg_id is a placeholder: the toy never goes through rate matching
    cfg = CodeConfig(k_info=2, n_coded=4, bg_id=BgId.BG2, z=2, k_lifted=2, num_filler=0)
    return cfg, pcm


@pytest.fixture(scope="session", autouse=True)
def warm_min_sum_kernel(paper_code):
    """Compile the min-sum kernel once so timing-sensitive tests never pay
    the JIT cost inside a measured region."""
    rng = np.random.default_rng(0)
    llr = rng.standard_normal((2, paper_code.config.n_coded)).astype(np.float32)
    params = DecodeParams(iterations=1, cn_rule=CnRule.NORMALIZED_MIN_SUM)
    decode_batch(llr, params, paper_code.config, paper_code.pcm, "ref-st")
