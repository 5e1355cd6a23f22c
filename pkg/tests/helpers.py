from eqpn import data_path
from eqpn.io_formats import parse_bn, parse_qpn
from eqpn.network import Bn


def antibiotics_bn() -> Bn:
    return parse_bn(data_path("antibiotics.bn").read_text())


def antibiotics_qpn():
    return parse_qpn(data_path("antibiotics.qpn").read_text())


def two_node_bn(pa=0.5, pb_a=0.9, pb_na=0.2) -> Bn:
    return Bn(("A", "B"), {"A": (), "B": ("A",)}, {"A": {(): pa}, "B": {(True,): pb_a, (False,): pb_na}})
