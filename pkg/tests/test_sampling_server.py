# tests/test_sampling_server.py
import asyncio
import socket
import struct
import numpy as np
import pytest
from core.errors import ProtocolError
from core.sampler import TWO_HOP_TEMPLATE, TEMPLATES, run_template
from core.sampling_server import SamplingClient, SamplingServer, parse_address
from core.wire_protocol import (BAD_PARAMS, MALFORMED, MAX_MESSAGE_SIZE, UNKNOWN_TEMPLATE, decode_body,
                                encode_frame, read_message, recv_frame, send_frame, validate_request,
                                write_message)
def two_hop_request(**overrides):
    message = {'template': 'two_hop', 'seeds': ['s0', 's1', 's2'], 'max': 5, 'node_type': 'PAPER',
               'rel_type': 'CITES', 'seed': 1, 'sequence': 0}
    message.update(overrides)
    return message
async def read_from(data: bytes):
    reader = asyncio.StreamReader()
    reader.feed_data(data)
    reader.feed_eof()
    return await read_message(reader)
class FakeWriter:
    def __init__(self):
        self.data = bytearray()
    def write(self, chunk):
        self.data.extend(chunk)
    async def drain(self):
        pass
class TestWireProtocol:
    """Framing: 4-byte big-endian length then a JSON body"""
    def test_read_message_success(self):
        body = asyncio.run(read_from(struct.pack('>I', 5) + b'hello'))
        assert body == b'hello'
    def test_clean_eof_between_frames(self):
        assert asyncio.run(read_from(b'')) is None
    def test_truncated_header(self):
        with pytest.raises(ProtocolError) as info:
            asyncio.run(read_from(b'\x00\x00'))
        assert info.value.code == MALFORMED
    def test_truncated_body(self):
        with pytest.raises(ProtocolError):
            asyncio.run(read_from(struct.pack('>I', 10) + b'abc'))
    def test_read_message_too_large(self):
        with pytest.raises(ValueError) as info:
            asyncio.run(read_from(struct.pack('>I', MAX_MESSAGE_SIZE + 1)))
        assert "too large" in str(info.value)
    def test_write_message_header(self):
        writer = FakeWriter()
        asyncio.run(write_message(writer, {'ok': True, 'rows': []}))
        (length,) = struct.unpack('>I', bytes(writer.data[:4]))
        assert length == len(writer.data) - 4
        assert decode_body(bytes(writer.data[4:])) == {'ok': True, 'rows': []}
    def test_numpy_values_encode(self):
        frame = encode_frame({'rows': [{'features': np.array([0.5, 1.5]), 'n': np.int64(3)}]})
        assert decode_body(frame[4:]) == {'rows': [{'features': [0.5, 1.5], 'n': 3}]}
    @pytest.mark.parametrize('body', [b'{bad', b'[1, 2]', b'\xff\xfe'])
    def test_decode_rejects_non_objects(self, body):
        with pytest.raises(ProtocolError) as info:
            decode_body(body)
        assert info.value.code == MALFORMED
    @pytest.mark.parametrize('overrides, code', [
        ({'template': 7}, MALFORMED),
        ({'template': 'three_hop'}, UNKNOWN_TEMPLATE),
        ({'seeds': 's0'}, BAD_PARAMS),
        ({'max': -1}, BAD_PARAMS),
        ({'max': True}, BAD_PARAMS),
        ({'node_type': ''}, BAD_PARAMS),
        ({'seed': 1.5}, BAD_PARAMS),
        ({'sequence': -2}, BAD_PARAMS),
    ])
    def test_validate_request_codes(self, overrides, code):
        with pytest.raises(ProtocolError) as info:
            validate_request(two_hop_request(**overrides), TEMPLATES)
        assert info.value.code == code
    def test_validate_defaults(self):
        message = two_hop_request()
        del message['sequence']
        assert validate_request(message, TEMPLATES)['sequence'] == 0
    @pytest.mark.parametrize('text, expected', [('127.0.0.1:7687', ('127.0.0.1', 7687)), ('9000', ('127.0.0.1', 9000)),
                                                ('graph-host:1', ('graph-host', 1))])
    def test_parse_address(self, text, expected):
        assert parse_address(text) == expected
    def test_parse_bad_address(self):
        with pytest.raises(ValueError):
            parse_address('localhost:http')
@pytest.fixture
def server(tree_store):
    with SamplingServer(tree_store, max_workers=2) as running:
        yield running
def connect(server):
    return socket.create_connection(server.address, timeout=10)
class TestSamplingServer:
    def test_unknown_template(self, server):
        with connect(server) as sock:
            send_frame(sock, two_hop_request(template='three_hop'))
            response = recv_frame(sock)
        assert response['ok'] is False and response['code'] == UNKNOWN_TEMPLATE
    def test_malformed_body_keeps_connection(self, server):
        with connect(server) as sock:
            sock.sendall(struct.pack('>I', 4) + b'{bad')
            assert recv_frame(sock)['code'] == MALFORMED
            send_frame(sock, two_hop_request())
            response = recv_frame(sock)
        assert response['ok'] and len(response['rows']) == 5
    def test_oversized_frame_closes_connection(self, server):
        with connect(server) as sock:
            sock.sendall(struct.pack('>I', MAX_MESSAGE_SIZE + 1))
            assert recv_frame(sock)['code'] == MALFORMED
            assert sock.recv(1) == b''
    def test_same_request_replays(self, server):
        responses = []
        for _ in range(2):
            with connect(server) as sock:
                send_frame(sock, two_hop_request(seed=9, sequence=4))
                responses.append(recv_frame(sock))
        assert responses[0] == responses[1]
        assert server.requests_served == 2
    def test_client_matches_local_rows(self, server, tree_store):
        params = {'NODE_TYPE': 'PAPER', 'REL_TYPE': 'CITES', 'SEED_NODES': ['s0', 's2'], 'MAX_NEIGHBOURS': 3}
        with SamplingClient(server.address) as client:
            remote = client.run_template(TWO_HOP_TEMPLATE, params, seed=2, sequence=1)
        local = run_template(tree_store, TWO_HOP_TEMPLATE, params, seed=2, sequence=1)
        assert [(r['src_id'], r['node_1.id'], r['node_2.id']) for r in remote] == \
               [(r['src_id'], r['node_1.id'], r['node_2.id']) for r in local]
        assert remote[0]['node_1.features'] == local[0]['node_1.features'].tolist()
    def test_client_raises_error_responses(self, server):
        with SamplingClient(server.address) as client:
            with pytest.raises(ProtocolError) as info:
                client.request(two_hop_request(max=-3))
        assert info.value.code == BAD_PARAMS
    def test_one_hop_ids(self, server):
        with SamplingClient(server.address) as client:
            rows = client.request(two_hop_request(template='one_hop', seeds=['s1'], max=10))
        assert sorted(r['id(node_dst)'] for r in rows) == ['h10', 'h11']
