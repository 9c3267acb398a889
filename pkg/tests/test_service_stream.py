"""Live server-sent-events behavior over a real HTTP server.

TestClient covers the JSON mode; these tests boot uvicorn on an
ephemeral port to prove events are pushed to an open stream as
mutations land, without the client reconnecting.
"""

import json
import threading
import time

import httpx
import pytest
import uvicorn

import golden_data
from chai.config import ServiceConfig
from chai.service import create_app
from chai.session import event_from_dict, replay, state_to_dict


@pytest.fixture
def live_server(tmp_path):
    app = create_app(ServiceConfig(data_dir=tmp_path / "data"))
    config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="warning")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("server did not start")
        time.sleep(0.02)
    port = server.servers[0].sockets[0].getsockname()[1]
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5)


class StreamReader:
    """Collects SSE events from /events in a background thread."""

    def __init__(self, base_url: str, session_id: str):
        self.events = []
        self._lock = threading.Lock()
        self._got = threading.Condition(self._lock)
        self._stop = threading.Event()
        self._thread = threading.Thread(
            target=self._read, args=(base_url, session_id), daemon=True
        )
        self._thread.start()

    def _read(self, base_url: str, session_id: str) -> None:
        with httpx.Client(base_url=base_url, timeout=10) as client:
            with client.stream(
                "GET",
                f"/sessions/{session_id}/events",
                headers={"accept": "text/event-stream"},
            ) as response:
                assert response.status_code == 200
                assert response.headers["content-type"].startswith("text/event-stream")
                for line in response.iter_lines():
                    if self._stop.is_set():
                        return
                    if line.startswith("data: "):
                        with self._got:
                            self.events.append(json.loads(line[len("data: "):]))
                            self._got.notify_all()

    def wait_for(self, count: int, timeout: float = 10.0) -> list:
        deadline = time.time() + timeout
        with self._got:
            while len(self.events) < count:
                remaining = deadline - time.time()
                assert remaining > 0, f"timed out waiting for {count} events"
                self._got.wait(remaining)
            return list(self.events)

    def stop(self) -> None:
        self._stop.set()


def test_stream_pushes_live_events(live_server, transcript_replies):
    with httpx.Client(base_url=live_server, timeout=10) as client:
        created = client.post(
            "/sessions",
            json={
                "activity": "hills",
                "context": golden_data.retailinc_narrative(),
                "mode": "stepwise",
            },
        )
        assert created.status_code == 201
        sid = created.json()["id"]

        reader = StreamReader(live_server, sid)
        try:
            initial = reader.wait_for(2)
            assert [e["type"] for e in initial] == ["SessionStarted", "AgentRequested"]

            pasted = client.post(
                f"/sessions/{sid}/agent-response",
                json={"text": transcript_replies[0]},
            )
            assert pasted.status_code == 200

            streamed = reader.wait_for(4)
            assert [e["sequence"] for e in streamed] == [1, 2, 3, 4]
            assert streamed[2]["type"] == "AgentResponded"
            assert streamed[3]["type"] == "ArtifactsRecorded"

            # replaying the stream reconstructs GET /sessions/{id} exactly
            rebuilt = state_to_dict(
                replay([event_from_dict(e) for e in streamed], session_id=sid)
            )
            assert rebuilt == client.get(f"/sessions/{sid}").json()
        finally:
            reader.stop()


def test_stream_resumes_after_cursor(live_server):
    with httpx.Client(base_url=live_server, timeout=10) as client:
        created = client.post(
            "/sessions",
            json={
                "activity": "hills",
                "context": golden_data.retailinc_narrative(),
                "mode": "stepwise",
            },
        )
        sid = created.json()["id"]
        body = client.get(f"/sessions/{sid}/events", params={"after": 1}).json()
        assert [e["sequence"] for e in body["events"]] == [2]
