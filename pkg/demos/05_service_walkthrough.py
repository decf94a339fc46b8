"""
The annotation service, driven in-process
=========================================

The HTTP layer is a thin adapter over the session store. fastapi's
TestClient lets this script exercise the real routes without opening a
port; a browser UI would issue exactly these requests.
"""

import json
import tempfile

from fastapi.testclient import TestClient

from pairsort.fileio import dump_items_jsonl, dump_similarities
from pairsort.service import create_app
from pairsort.simulator import SyntheticPreorderConfig, make_items, synthesize_similarities

workdir = tempfile.mkdtemp(prefix="pairsort-demo-")
app = create_app(workdir)
client = TestClient(app)

print("health:", client.get("/v1/health").json())

# Sessions are created from the two on-disk formats: an items JSONL and a
# similarities JSON. Both can also be posted as parsed objects.
items = make_items(8, seed=21)
truth = {it.id: it.ground_truth for it in items}
sims = synthesize_similarities(items, SyntheticPreorderConfig(rng_seed=22))

created = client.post("/v1/sessions", json={
    "items": dump_items_jsonl(items),
    "similarities": dump_similarities(0.1, sims),
    "config": {"rng_seed": 7},
}).json()
sid = created["session_id"]
print("created:", sid, "status", created["status"])

# The annotation loop: GET next, POST a judgment, repeat. `next` is
# idempotent, so a refreshing browser never double-issues a comparison.
answered = 0
while True:
    nxt = client.get(f"/v1/sessions/{sid}/next").json()
    if nxt["done"]:
        break
    req = nxt["request"]
    left, right = req["left"]["id"], req["right"]["id"]
    outcome = "left_first" if truth[left] >= truth[right] else "right_first"
    client.post(f"/v1/sessions/{sid}/judgments", json={
        "request_id": req["request_id"],
        "outcome": outcome,
    })
    answered += 1

print("human judgments over HTTP:", answered)

ranking = client.get(f"/v1/sessions/{sid}/ranking").json()
print("top 3:", [row["id"] for row in ranking["ranking"][:3]])

stats = client.get(f"/v1/sessions/{sid}/stats").json()
print("stats:", json.dumps(stats, indent=2)[:200], "...")

# Everything the session did is exportable as one portable bundle: config,
# full event history, and the items. Another store can import it.
export = client.get(f"/v1/sessions/{sid}/export").json()
print("export holds", len(export["events"]), "events, format", export["format"])

# Errors come back as a uniform envelope.
bad = client.post(f"/v1/sessions/{sid}/judgments", json={"request_id": 1, "outcome": "left_first"})
print("judging a finished session:", bad.status_code, bad.json()["code"])
