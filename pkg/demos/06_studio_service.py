#!/usr/bin/env python3
"""Drive the studio HTTP service end to end over a real socket.

Starts the session service on a spare port with the template mock,
then walks the create -> generate -> edit -> history flow exactly the
way the browser studio does.  (layoutforge serve --backend template
gives you the same server from a shell.)
"""

import json
import socket
import threading
import time
import urllib.request

import uvicorn

from layoutforge.gateway import Gateway, TemplateBackend
from layoutforge.service import create_app

# find a free port, then run uvicorn in a daemon thread
with socket.socket() as probe:
    probe.bind(("127.0.0.1", 0))
    port = probe.getsockname()[1]

app = create_app(Gateway(TemplateBackend()))
server = uvicorn.Server(uvicorn.Config(app, host="127.0.0.1", port=port, log_level="error"))
threading.Thread(target=server.run, daemon=True).start()
while not server.started:
    time.sleep(0.02)
base = f"http://127.0.0.1:{port}"
print("service up at", base)


def call(method, path, body=None):
    data = json.dumps(body).encode() if body is not None else None
    req = urllib.request.Request(base + path, data=data, method=method,
                                 headers={"content-type": "application/json"})
    with urllib.request.urlopen(req) as resp:
        raw = resp.read()
        return json.loads(raw) if resp.headers.get_content_type() == "application/json" else raw


task = {
    "room_type": "bedroom",
    "floor": {"vertices": [[0, 0], [4, 0], [4, 3], [0, 3]]},
    "objects": [
        {"description": "double bed", "quantity": 1, "bbox": {"width": 1.8, "depth": 2.0, "height": 0.5}},
        {"description": "nightstand", "quantity": 2, "bbox": {"width": 0.5, "depth": 0.4, "height": 0.55}},
        {"description": "wardrobe", "quantity": 1, "bbox": {"width": 1.2, "depth": 0.6, "height": 2.0}},
    ],
}

sid = call("POST", "/sessions", {"task": task})["session_id"]
print("session", sid)

out = call("POST", f"/sessions/{sid}/generate")
print("generated", len(out["layout"]["objects"]), "objects, usable:", out["report"]["usable"])

out = call("POST", f"/sessions/{sid}/edit", {"instruction": "remove the wardrobe"})
print("after edit:", [o["description"] for o in out["layout"]["objects"]])

history = call("GET", f"/sessions/{sid}/history")["history"]
print("history:", [(e["index"], e["instruction"]) for e in history])

svg = call("GET", f"/sessions/{sid}/render.svg")
print("render.svg:", len(svg), "bytes")

server.should_exit = True
time.sleep(0.1)
print("done")
