# storage/property_codec.py
"""
Binary encoding of property maps (the in-record property blocks of props.dat).

Block:  u32 payload_length | u16 entry_count | entries...
Entry:  u16 key_id | u8 tag | payload
Tags:   1 string  (u32 byte length + UTF-8)
        2 int64
        3 float64
        4 float vector (u32 length + length x float64)
"""
import struct
from typing import Any, Callable, Dict, List, Tuple
import numpy as np
from .errors import PropertyTypeError
TAG_STRING = 1
TAG_INT = 2
TAG_FLOAT = 3
TAG_VECTOR = 4
TAG_NAMES = {TAG_STRING: 'string', TAG_INT: 'int', TAG_FLOAT: 'float', TAG_VECTOR: 'vector'}
_U32 = struct.Struct('<I')
_U16 = struct.Struct('<H')
_ENTRY = struct.Struct('<HB')
_I64 = struct.Struct('<q')
_F64 = struct.Struct('<d')
INT64_MIN = -(1 << 63)
INT64_MAX = (1 << 63) - 1
def value_tag(value: Any) -> int:
    """Tag of a Python value, or PropertyTypeError for anything outside the union"""
    if isinstance(value, (bool, np.bool_)):
        raise PropertyTypeError("boolean properties are not supported")
    if isinstance(value, str):
        return TAG_STRING
    if isinstance(value, (int, np.integer)):
        if not INT64_MIN <= int(value) <= INT64_MAX:
            raise PropertyTypeError(f"integer {value} does not fit in 64 bits")
        return TAG_INT
    if isinstance(value, (float, np.floating)):
        return TAG_FLOAT
    if isinstance(value, np.ndarray):
        if value.ndim != 1:
            raise PropertyTypeError("only 1-d float vectors can be stored")
        return TAG_VECTOR
    if isinstance(value, (list, tuple)):
        for item in value:
            if isinstance(item, (bool, np.bool_)) or not isinstance(item, (int, float, np.integer, np.floating)):
                raise PropertyTypeError("vector properties must contain only numbers")
        return TAG_VECTOR
    raise PropertyTypeError(f"unsupported property type {type(value).__name__}")
def normalize_value(value: Any) -> Any:
    """Canonical in-memory form: str, int, float or float64 ndarray"""
    tag = value_tag(value)
    if tag == TAG_STRING:
        return value
    if tag == TAG_INT:
        return int(value)
    if tag == TAG_FLOAT:
        return float(value)
    return np.asarray(value, dtype=np.float64)
def encode_value(value: Any) -> bytes:
    tag = value_tag(value)
    if tag == TAG_STRING:
        raw = value.encode('utf-8')
        return bytes([tag]) + _U32.pack(len(raw)) + raw
    if tag == TAG_INT:
        return bytes([tag]) + _I64.pack(int(value))
    if tag == TAG_FLOAT:
        return bytes([tag]) + _F64.pack(float(value))
    vec = np.asarray(value, dtype='<f8')
    return bytes([tag]) + _U32.pack(len(vec)) + vec.tobytes()
def decode_value(buf: bytes, pos: int, tag: int) -> Tuple[Any, int]:
    if tag == TAG_STRING:
        (length,) = _U32.unpack_from(buf, pos)
        pos += 4
        return buf[pos:pos + length].decode('utf-8'), pos + length
    if tag == TAG_INT:
        return _I64.unpack_from(buf, pos)[0], pos + 8
    if tag == TAG_FLOAT:
        return _F64.unpack_from(buf, pos)[0], pos + 8
    if tag == TAG_VECTOR:
        (length,) = _U32.unpack_from(buf, pos)
        pos += 4
        vec = np.frombuffer(buf, dtype='<f8', count=length, offset=pos).astype(np.float64)
        return vec, pos + 8 * length
    raise PropertyTypeError(f"unknown property tag {tag}")
def encode_properties(properties: Dict[str, Any], key_id: Callable[[str], int]) -> bytes:
    """Encode a property map; `key_id` interns key names into the catalog"""
    body = bytearray(_U16.pack(len(properties)))
    for key, value in properties.items():
        encoded = encode_value(value)
        body += _U16.pack(key_id(key))
        body += encoded
    return _U32.pack(len(body)) + bytes(body)
def block_length(header: bytes) -> int:
    return _U32.unpack_from(header, 0)[0]
def decode_properties(payload: bytes, key_names: List[str]) -> Dict[str, Any]:
    """Decode the payload part of a block (without its u32 length prefix)"""
    (count,) = _U16.unpack_from(payload, 0)
    pos = 2
    props: Dict[str, Any] = {}
    for _ in range(count):
        key, tag = _ENTRY.unpack_from(payload, pos)
        pos += _ENTRY.size
        value, pos = decode_value(payload, pos, tag)
        props[key_names[key]] = value
    return props
