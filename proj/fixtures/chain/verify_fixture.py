#!/usr/bin/env python3
"""Recounts the chain fixture from the raw files and checks the target
aggregates. Shares no code with make_fixture.py or the C++ library.

Exit 0 when every check holds; prints each check either way.
"""
import hashlib
import json
import sys
from collections import Counter, defaultdict
from pathlib import Path

HERE = Path(__file__).resolve().parent

EXPECT_SENT = {"Email": 25, "Form": 30, "Instagram": 20, "Telegram": 5, "Url": 20}
EXPECT_STOLEN = {"Email": 8, "Form": 17, "Instagram": 3, "Telegram": 2, "Url": 5}
EXPECT_RECIPIENTS = 26
EXPECT_BTC = {
    "watched": 72,
    "active": 49,
    "receives": 3234,
    "sends": 2426,
    "received_sat": 3_840_000_000,
    "sent_sat": 3_774_100_000,
    "funded": 16,
    "balance_sat": 65_900_000,
}


def load(name):
    with open(HERE / name) as f:
        return [json.loads(line) for line in f if line.strip()]


failures = 0


def check(label, got, want):
    global failures
    ok = got == want
    failures += not ok
    print(f"{'ok  ' if ok else 'FAIL'} {label}: {got}" + ("" if ok else f" (want {want})"))


def eth():
    wallets = load("honey_wallets.jsonl")
    ledger = sorted(load("eth_ledger.jsonl"), key=lambda t: t["at"])
    by_addr = {w["address"]: w for w in wallets}
    for w in wallets:
        if "0x" + hashlib.sha256(w["key_phrase"].encode()).hexdigest()[:40] != w["address"]:
            check(f"address of {w['wallet_id']}", "mismatch", "match")
    # Stolen: a wallet that ever ends below 10% of its peak funding, counted
    # from balances alone.
    balance = defaultdict(int)
    peak = defaultdict(int)
    outbound_to = defaultdict(set)
    low_point = {}
    for t in ledger:
        v = int(t["value"])
        if t["to"] in by_addr:
            balance[t["to"]] += v
            peak[t["to"]] = max(peak[t["to"]], balance[t["to"]])
        if t["from"] in by_addr:
            a = t["from"]
            balance[a] -= v
            assert balance[a] >= 0, t["txid"]
            if a not in low_point:
                outbound_to[a].add(t["to"])
                if balance[a] * 10 < peak[a]:
                    low_point[a] = t["txid"]
    sent = Counter(w["released_on"] for w in wallets)
    stolen = Counter(by_addr[a]["released_on"] for a in low_point)
    check("wallets", len(wallets), 100)
    check("sent per medium", dict(sent), EXPECT_SENT)
    check("stolen per medium", dict(stolen), EXPECT_STOLEN)
    check("stolen total", sum(stolen.values()), 35)
    recipients = set().union(*(outbound_to[a] for a in low_point))
    check("distinct recipients", len(recipients), EXPECT_RECIPIENTS)


def btc():
    watched = [a for a in (HERE / "btc_addresses.txt").read_text().split() if a]
    ws = set(watched)
    ledger = load("btc_ledger.jsonl")
    received = Counter()
    sent = Counter()
    n_recv = Counter()
    n_sent = Counter()
    for t in ledger:
        touched = {leg["address"] for leg in t["inputs"] + t["outputs"]} & ws
        assert len(touched) <= 1, t["txid"]
        assert sum(i["value"] for i in t["inputs"]) >= sum(o["value"] for o in t["outputs"]), t["txid"]
        for o in t["outputs"]:
            if o["address"] in ws:
                received[o["address"]] += o["value"]
                n_recv[o["address"]] += 1
        for i in t["inputs"]:
            if i["address"] in ws:
                sent[i["address"]] += i["value"]
                n_sent[i["address"]] += 1
    active = set(n_recv) | set(n_sent)
    balances = {a: received[a] - sent[a] for a in ws}
    check("btc watched", len(ws), EXPECT_BTC["watched"])
    check("btc active", len(active), EXPECT_BTC["active"])
    check("btc receive txs", sum(n_recv.values()), EXPECT_BTC["receives"])
    check("btc send txs", sum(n_sent.values()), EXPECT_BTC["sends"])
    check("btc received sat", sum(received.values()), EXPECT_BTC["received_sat"])
    check("btc sent sat", sum(sent.values()), EXPECT_BTC["sent_sat"])
    check("btc funded addresses", sum(1 for b in balances.values() if b > 0), EXPECT_BTC["funded"])
    check("btc balance sat", sum(balances.values()), EXPECT_BTC["balance_sat"])
    check("btc negative balances", sum(1 for b in balances.values() if b < 0), 0)


eth()
btc()
sys.exit(1 if failures else 0)
