# core/sampling_server.py
"""
Sampling server and client.

The server is an asyncio loop that reads framed requests and runs each one
on a thread pool against the shared store, every request in its own read
transaction. The client is a blocking socket with the same interface the
sampler uses for a local store (run_template), so training workers can
sample through it without opening the store themselves.
"""
import asyncio
import socket
import threading
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Mapping, Optional, Tuple
from storage import GraphStore, StorageError
from query.errors import QueryError
from .errors import ProtocolError
from .sampler import TEMPLATES, run_template
from .wire_protocol import (BAD_PARAMS, INTERNAL, MALFORMED, decode_body, encode_frame, error_response,
                            read_message, recv_frame, send_frame, validate_request, write_message)
logger = logging.getLogger(__name__)
TEMPLATE_NAMES = {text: name for name, text in TEMPLATES.items()}
def parse_address(text: str) -> Tuple[str, int]:
    """'host:port' -> (host, port); a bare port binds localhost"""
    host, _, port = str(text).rpartition(':')
    try:
        return host or '127.0.0.1', int(port)
    except ValueError:
        raise ValueError(f"invalid address {text!r}, expected host:port")
class SamplingServer:
    """Serves the sampling templates of one open store"""
    def __init__(self, store: GraphStore, host: str = '127.0.0.1', port: int = 0, max_workers: Optional[int] = None):
        self.store = store
        self.host = host
        self.port = port
        self.address: Optional[Tuple[str, int]] = None
        self.requests_served = 0
        self._executor = ThreadPoolExecutor(max_workers=max_workers, thread_name_prefix='sampler')
        self._count_lock = threading.Lock()
        self._loop: Optional[asyncio.AbstractEventLoop] = None
        self._server = None
        self._thread: Optional[threading.Thread] = None
    def process_request(self, message: Dict[str, Any]) -> Dict[str, Any]:
        """Validate and run one decoded request; always returns a response object"""
        try:
            request = validate_request(message, TEMPLATES)
        except ProtocolError as e:
            return error_response(e.code, e.message)
        params = {'NODE_TYPE': request['node_type'], 'REL_TYPE': request['rel_type'],
                  'SEED_NODES': request['seeds'], 'MAX_NEIGHBOURS': request['max']}
        try:
            rows = run_template(self.store, TEMPLATES[request['template']], params, request['seed'],
                                request['sequence'])
        except QueryError as e:
            return error_response(BAD_PARAMS, str(e))
        except StorageError as e:
            logger.error(f"Store error while sampling: {e}")
            return error_response(INTERNAL, str(e))
        except Exception as e:
            logger.error(f"Sampling request failed: {e}", exc_info=True)
            return error_response(INTERNAL, f"{type(e).__name__}: {e}")
        with self._count_lock:
            self.requests_served += 1
        return {'ok': True, 'rows': rows}
    def _respond(self, body: bytes) -> bytes:
        try:
            response = self.process_request(decode_body(body))
        except ProtocolError as e:
            response = error_response(e.code, e.message)
        try:
            return encode_frame(response)
        except (ValueError, ProtocolError) as e:
            return encode_frame(error_response(INTERNAL, f"response not encodable: {e}"))
    async def _handle(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter):
        peer = writer.get_extra_info('peername')
        logger.debug(f"Sampling connection from {peer}")
        loop = asyncio.get_running_loop()
        try:
            while True:
                try:
                    body = await read_message(reader)
                except ValueError as e:
                    # oversized frame: the stream cannot be resynchronised
                    await write_message(writer, error_response(MALFORMED, str(e)))
                    break
                except ProtocolError as e:
                    await write_message(writer, error_response(e.code, e.message))
                    break
                if body is None:
                    break
                frame = await loop.run_in_executor(self._executor, self._respond, body)
                writer.write(frame)
                await writer.drain()
        except (ConnectionError, asyncio.CancelledError):
            pass
        finally:
            writer.close()
            try:
                await writer.wait_closed()
            except (ConnectionError, OSError):
                pass
            logger.debug(f"Sampling connection from {peer} closed")
    async def _start(self):
        self._server = await asyncio.start_server(self._handle, self.host, self.port)
        self.address = tuple(self._server.sockets[0].getsockname()[:2])
        logger.info(f"Sampling server listening on {self.address[0]}:{self.address[1]}")
    def start(self) -> Tuple[str, int]:
        """Run the server loop on a daemon thread; returns the bound (host, port)"""
        ready = threading.Event()
        failure: List[BaseException] = []
        def run():
            self._loop = asyncio.new_event_loop()
            asyncio.set_event_loop(self._loop)
            try:
                self._loop.run_until_complete(self._start())
            except BaseException as e:
                failure.append(e)
                ready.set()
                return
            ready.set()
            try:
                self._loop.run_forever()
            finally:
                self._server.close()
                self._loop.run_until_complete(self._server.wait_closed())
                self._loop.close()
        self._thread = threading.Thread(target=run, name='sampling-server', daemon=True)
        self._thread.start()
        if not ready.wait(timeout=30) or failure:
            raise RuntimeError(f"sampling server failed to start: {failure[0] if failure else 'timeout'}")
        return self.address
    def serve_forever(self):
        self.start()
        try:
            while self._thread.is_alive():
                self._thread.join(timeout=0.5)
        except KeyboardInterrupt:
            logger.info("Interrupted, stopping sampling server")
        finally:
            self.stop()
    def stop(self):
        if self._loop is not None and self._loop.is_running():
            self._loop.call_soon_threadsafe(self._loop.stop)
        if self._thread is not None:
            self._thread.join(timeout=10)
        self._executor.shutdown(wait=False)
        logger.info(f"Sampling server stopped after {self.requests_served} requests")
    def __enter__(self):
        self.start()
        return self
    def __exit__(self, exc_type, exc, tb):
        self.stop()
def serve_sampling(store: GraphStore, endpoint: str, max_workers: Optional[int] = None) -> SamplingServer:
    """Start a server on `endpoint` (host:port) and return it running"""
    host, port = parse_address(endpoint)
    server = SamplingServer(store, host, port, max_workers)
    server.start()
    return server
class SamplingClient:
    """Blocking client; one connection, one request in flight"""
    def __init__(self, address, timeout: float = 60.0):
        self.address = parse_address(address) if isinstance(address, str) else tuple(address)
        self.timeout = timeout
        self._sock: Optional[socket.socket] = None
    def _connect(self) -> socket.socket:
        if self._sock is None:
            self._sock = socket.create_connection(self.address, timeout=self.timeout)
        return self._sock
    def request(self, message: Dict[str, Any]) -> List[Dict[str, Any]]:
        sock = self._connect()
        send_frame(sock, message)
        response = recv_frame(sock)
        if not response.get('ok'):
            raise ProtocolError(int(response.get('code', INTERNAL)), str(response.get('msg', 'unknown error')))
        return response.get('rows', [])
    def run_template(self, template: str, params: Mapping[str, Any], seed: int = 0,
                     sequence: int = 0) -> List[Dict[str, Any]]:
        name = TEMPLATE_NAMES.get(template, template)
        seeds = params.get('SEED_NODES', [])
        return self.request({
            'template': name,
            'seeds': [s.item() if hasattr(s, 'item') else s for s in seeds],
            'max': int(params.get('MAX_NEIGHBOURS', 0)),
            'node_type': params.get('NODE_TYPE', ''),
            'rel_type': params.get('REL_TYPE', '') or 'ANY',
            'seed': int(seed),
            'sequence': int(sequence),
        })
    def close(self):
        if self._sock is not None:
            try:
                self._sock.close()
            finally:
                self._sock = None
    def __enter__(self):
        return self
    def __exit__(self, exc_type, exc, tb):
        self.close()
