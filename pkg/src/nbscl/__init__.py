"""Successive cancellation list decoding of non-binary linear block codes
over GF(2^r), by decomposition into r coupled binary polar codes."""

from .codes import CodeSpec, encode, nb_bch, reed_solomon
from .galois import FieldElem, FieldSpec, make_field
from .polar_map import PolarMapping, build_mapping, decompose, polar_encode
from .scl_decoder import SclDecoder, sc_decode, scl_decode

__all__ = [
    "CodeSpec", "FieldElem", "FieldSpec", "PolarMapping", "SclDecoder",
    "build_mapping", "decompose", "encode", "make_field", "nb_bch",
    "polar_encode", "reed_solomon", "sc_decode", "scl_decode",
]
__version__ = "0.1.0"
