import pytest

from ruminlab.model import lens_space, su2_model
from ruminlab.operators import BlockContext
from ruminlab.spectral import Assembly


@pytest.fixture(scope="session")
def s3():
    return su2_model()


@pytest.fixture(scope="session")
def s3_asm_small(s3):
    return Assembly(s3, 3)


@pytest.fixture(scope="session")
def s3_contexts(s3):
    return {m: BlockContext(s3.frame, b) for m, b in enumerate(s3.blocks(4))}


@pytest.fixture(scope="session")
def lens_models():
    out = []
    for p in (2, 3):
        for l in range(p):
            out.append(lens_space(p, character=l))
    return out
