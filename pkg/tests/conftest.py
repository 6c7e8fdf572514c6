import pytest

from jetlegendre.manifest import load_fixture
from jetlegendre.variational import LagrangianSpec

EXAMPLE1 = "q''^2/2 + 5*q^2*q'^2 + q^6"
PU = "q''^2/2 - (w1^2 + w2^2)*q'^2/2 + w1^2*w2^2*q^2/2"


@pytest.fixture
def example1():
    return LagrangianSpec.from_text(["q"], 2, EXAMPLE1)


@pytest.fixture
def pu():
    return LagrangianSpec.from_text(["q"], 2, PU, ["w1", "w2"])


@pytest.fixture(params=["example3", "sarioglu_tekin", "clement"])
def degenerate_fixture(request):
    return load_fixture(request.param)
