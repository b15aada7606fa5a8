# core/wire_protocol.py
"""
Framing for the sampling server: a 4-byte big-endian unsigned body length,
then a UTF-8 JSON body.

Request:  {"template": name, "seeds": [...], "max": N, "node_type": str,
           "rel_type": str, "seed": S, "sequence": K (optional, default 0)}
Response: {"ok": true, "rows": [...]} or {"ok": false, "code": n, "msg": str}
"""
import asyncio
import json
import socket
import struct
from typing import Any, Dict, Optional
import numpy as np
from .errors import ProtocolError
HEADER_SIZE = 4
MAX_MESSAGE_SIZE = 64 * 1024 * 1024
# response error codes
MALFORMED = 1
UNKNOWN_TEMPLATE = 2
BAD_PARAMS = 3
INTERNAL = 4
def to_jsonable(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    return value
def encode_body(message: Dict[str, Any]) -> bytes:
    return json.dumps(to_jsonable(message), separators=(',', ':'), ensure_ascii=False,
                      allow_nan=False).encode('utf-8')
def decode_body(body: bytes) -> Dict[str, Any]:
    try:
        message = json.loads(body.decode('utf-8'))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ProtocolError(MALFORMED, f"body is not UTF-8 JSON: {e}")
    if not isinstance(message, dict):
        raise ProtocolError(MALFORMED, "body must be a JSON object")
    return message
def encode_frame(message: Dict[str, Any]) -> bytes:
    body = encode_body(message)
    if len(body) > MAX_MESSAGE_SIZE:
        raise ProtocolError(MALFORMED, f"message too large: {len(body)} bytes")
    return struct.pack('>I', len(body)) + body
def error_response(code: int, message: str) -> Dict[str, Any]:
    return {'ok': False, 'code': int(code), 'msg': str(message)}
def validate_request(message: Dict[str, Any], templates) -> Dict[str, Any]:
    """Normalised request; raises ProtocolError with the response code on any problem"""
    template = message.get('template')
    if not isinstance(template, str):
        raise ProtocolError(MALFORMED, "request needs a string 'template'")
    if template not in templates:
        raise ProtocolError(UNKNOWN_TEMPLATE, f"unknown template {template!r}")
    seeds = message.get('seeds')
    if not isinstance(seeds, list):
        raise ProtocolError(BAD_PARAMS, "'seeds' must be a list")
    limit = message.get('max', 0)
    if isinstance(limit, bool) or not isinstance(limit, int) or limit < 0:
        raise ProtocolError(BAD_PARAMS, "'max' must be a non-negative integer")
    for key in ('node_type', 'rel_type'):
        if not isinstance(message.get(key), str) or not message.get(key):
            raise ProtocolError(BAD_PARAMS, f"'{key}' must be a non-empty string")
    seed = message.get('seed', 0)
    sequence = message.get('sequence', 0)
    for key, value in (('seed', seed), ('sequence', sequence)):
        if isinstance(value, bool) or not isinstance(value, int) or value < 0:
            raise ProtocolError(BAD_PARAMS, f"'{key}' must be a non-negative integer")
    return {'template': template, 'seeds': seeds, 'max': limit, 'node_type': message['node_type'],
            'rel_type': message['rel_type'], 'seed': seed, 'sequence': sequence}
async def read_message(reader) -> Optional[bytes]:
    """Next frame body, or None on a clean EOF between frames"""
    try:
        header = await reader.readexactly(HEADER_SIZE)
    except asyncio.IncompleteReadError as e:
        if not e.partial:
            return None
        raise ProtocolError(MALFORMED, "truncated frame header")
    (length,) = struct.unpack('>I', header)
    if length > MAX_MESSAGE_SIZE:
        raise ValueError(f"Message too large: {length} bytes (limit {MAX_MESSAGE_SIZE})")
    try:
        return await reader.readexactly(length)
    except asyncio.IncompleteReadError:
        raise ProtocolError(MALFORMED, "truncated frame body")
async def write_message(writer, message: Dict[str, Any]):
    writer.write(encode_frame(message))
    await writer.drain()
def _recv_exactly(sock: socket.socket, count: int) -> bytes:
    chunks = bytearray()
    while len(chunks) < count:
        chunk = sock.recv(count - len(chunks))
        if not chunk:
            raise ProtocolError(MALFORMED, "connection closed mid-frame")
        chunks.extend(chunk)
    return bytes(chunks)
def send_frame(sock: socket.socket, message: Dict[str, Any]):
    sock.sendall(encode_frame(message))
def recv_frame(sock: socket.socket) -> Dict[str, Any]:
    (length,) = struct.unpack('>I', _recv_exactly(sock, HEADER_SIZE))
    if length > MAX_MESSAGE_SIZE:
        raise ProtocolError(MALFORMED, f"message too large: {length} bytes")
    return decode_body(_recv_exactly(sock, length))
