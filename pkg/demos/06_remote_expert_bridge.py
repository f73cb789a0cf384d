"""Human-in-the-loop over HTTP: a search blocked on a remote expert.

Starts the bridge server in this process, launches a run through the REST
API, and plays the part of the console: poll the pending queries, submit a
prior, watch the run advance.  A contradictory answer demonstrates the
consistency ledger's 409 rejection.  (The real console in frontend/ does
exactly these calls.)
"""

import time

import httpx

from hitlbo.server import BridgeServer, RunRegistry

GRAPH = "p edge 6 9\ne 1 2\ne 2 3\ne 1 3\ne 3 4\ne 4 5\ne 3 5\ne 5 6\ne 1 6\ne 2 6\n"

registry = RunRegistry(expert_timeout=60.0)
server = BridgeServer(registry, host="127.0.0.1", port=8733)
server.start()
base = "http://127.0.0.1:8733/api/v1"
print(f"bridge up at {base}")

run_id = httpx.post(f"{base}/runs", json={
    "instance": {"text": GRAPH, "format": "graph"},
    "config": {"s": 2, "x": 8, "max_expansions": 4, "seed": 5},
}).json()["run_id"]
print(f"started {run_id}; the search is now blocked on its first prior query\n")

answered = 0
rejected = False
while True:
    pending = httpx.get(f"{base}/queries", params={"state": "pending"}).json()
    for q in pending:
        print(f"query {q['query_id']}: cell [{q['cell']['lo']}, {q['cell']['hi']}] "
              f"prefix {q['prefix']} stats {q['stats']}")
        if answered == 1 and not rejected:
            # deliberately contradict the Wiener(1) we already gave
            r = httpx.post(f"{base}/queries/{q['query_id']}/response",
                           json={"kernel": "wiener", "variance": 50.0})
            print(f"  submitted Wiener(50) -> HTTP {r.status_code}: "
                  f"{r.json()['detail'][:72]}...")
            rejected = True
        r = httpx.post(f"{base}/queries/{q['query_id']}/response",
                       json={"kernel": "wiener", "variance": 1.0,
                             "annotation": "console demo"})
        print(f"  submitted Wiener(1)  -> HTTP {r.status_code}")
        answered += 1
    detail = httpx.get(f"{base}/runs/{run_id}").json()
    if detail["status"] != "running":
        break
    time.sleep(0.05)

print(f"\nrun {detail['status']}: best value {detail['result']['best_value']} "
      f"after {detail['result']['total_evaluations']} evaluations, "
      f"{answered} priors supplied")
server.stop()
