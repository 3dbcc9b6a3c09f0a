import pathlib

import pytest

from fraclie import parse_system

DEMOS = pathlib.Path(__file__).resolve().parent.parent / "demos"

ZK_SRC = (DEMOS / "zk.fpde").read_text()
HS_SRC = (DEMOS / "hs.fpde").read_text()
TELE_SRC = (DEMOS / "telegraph.fpde").read_text()
TELE_POW_SRC = (DEMOS / "telegraph_power.fpde").read_text()
TELE_POW_GEN = (DEMOS / "telegraph_power.gen").read_text()


@pytest.fixture(scope="session")
def zk():
    return parse_system(ZK_SRC)


@pytest.fixture(scope="session")
def hs():
    return parse_system(HS_SRC)


@pytest.fixture(scope="session")
def tele():
    return parse_system(TELE_SRC)


@pytest.fixture(scope="session")
def tele_pow():
    return parse_system(TELE_POW_SRC)
