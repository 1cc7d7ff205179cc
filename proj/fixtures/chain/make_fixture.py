#!/usr/bin/env python3
"""Builds the honey-wallet and BTC ledger fixtures in this directory.

Deterministic: rerunning rewrites byte-identical files. verify_fixture.py
checks the aggregates with its own arithmetic.
"""
import hashlib
import json
import random
from datetime import datetime, timedelta, timezone
from pathlib import Path

HERE = Path(__file__).resolve().parent
rng = random.Random(20230115)

CONS = "bdfghjklmnprstvz"
VOWELS = "aeiou"
WORDS = [CONS[i // 400] + VOWELS[(i // 80) % 5] + CONS[(i // 5) % 16] + VOWELS[i % 5] for i in range(2048)]
PHRASE_WORDS = 12

USD_PER_ETH = 1300
FUNDED_USD_CENTS = 126
FUND_WEI = FUNDED_USD_CENTS * 10**16 // USD_PER_ETH

RELEASED = {"Email": 25, "Form": 30, "Instagram": 20, "Telegram": 5, "Url": 20}
STOLEN = {"Email": 8, "Form": 17, "Instagram": 3, "Telegram": 2, "Url": 5}
N_RECIPIENTS = 26

BTC_WATCHED = 72
BTC_ACTIVE = 49
BTC_RECEIVES = 3234
BTC_SENDS = 2426
BTC_RECEIVED_SAT = 3_840_000_000
BTC_SENT_SAT = 3_774_100_000
BTC_FUNDED_ADDRESSES = 16

T0 = datetime(2022, 11, 1, tzinfo=timezone.utc)


def iso(t):
    return t.strftime("%Y-%m-%dT%H:%M:%SZ")


def eth_address():
    return "0x" + "".join(rng.choice("0123456789abcdef") for _ in range(40))


def txid():
    return "".join(rng.choice("0123456789abcdef") for _ in range(64))


B58 = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz"


def base58check(payload):
    data = payload + hashlib.sha256(hashlib.sha256(payload).digest()).digest()[:4]
    n = int.from_bytes(data, "big")
    out = ""
    while n:
        n, r = divmod(n, 58)
        out = B58[r] + out
    pad = len(data) - len(data.lstrip(b"\0"))
    return "1" * pad + out


def btc_address():
    return base58check(b"\x00" + bytes(rng.randrange(256) for _ in range(20)))


def partition(total, parts, unit=1):
    """total split into `parts` positive multiples of unit."""
    assert total % unit == 0 and total // unit >= parts
    cuts = sorted(rng.sample(range(1, total // unit), parts - 1))
    bounds = [0] + cuts + [total // unit]
    return [(bounds[i + 1] - bounds[i]) * unit for i in range(parts)]


def write_jsonl(name, rows):
    with open(HERE / name, "w") as f:
        for r in rows:
            f.write(json.dumps(r, separators=(",", ":")) + "\n")


def make_eth():
    wallets = []
    media = [m for m, n in RELEASED.items() for _ in range(n)]
    rng.shuffle(media)
    for i, medium in enumerate(media):
        phrase = " ".join(rng.choice(WORDS) for _ in range(PHRASE_WORDS))
        address = "0x" + hashlib.sha256(phrase.encode()).hexdigest()[:40]
        released_at = T0 + timedelta(days=i // 4, hours=rng.randrange(24))
        wallets.append({
            "wallet_id": f"hw-{i:03d}",
            "key_phrase": phrase,
            "address": address,
            "funded_usd": FUNDED_USD_CENTS / 100,
            "released_on": medium,
            "released_at": iso(released_at),
        })

    stolen = []
    for medium, n in STOLEN.items():
        stolen += rng.sample([w for w in wallets if w["released_on"] == medium], n)
    stolen.sort(key=lambda w: w["wallet_id"])
    recipients = [eth_address() for _ in range(N_RECIPIENTS)]
    rng.shuffle(stolen)
    drain_to = {w["wallet_id"]: recipients[k] if k < N_RECIPIENTS else rng.choice(recipients)
                for k, w in enumerate(stolen)}
    stolen_ids = set(drain_to)

    faucet = eth_address()
    txs = []
    for w in wallets:
        funded_at = datetime.strptime(w["released_at"], "%Y-%m-%dT%H:%M:%SZ").replace(tzinfo=timezone.utc)
        funded_at -= timedelta(hours=2)
        txs.append({"txid": "0x" + txid(), "from": faucet, "to": w["address"], "value": str(FUND_WEI),
                    "at": iso(funded_at)})
        released = funded_at + timedelta(hours=2)
        if w["wallet_id"] in stolen_ids:
            at = released + timedelta(minutes=rng.randrange(5, 60 * 24 * 3))
            txs.append({"txid": "0x" + txid(), "from": w["address"], "to": drain_to[w["wallet_id"]],
                        "value": str(FUND_WEI), "at": iso(at)})
        elif rng.random() < 0.15:
            # A small probe transfer that leaves most of the funds in place.
            at = released + timedelta(hours=rng.randrange(1, 48))
            txs.append({"txid": "0x" + txid(), "from": w["address"], "to": eth_address(),
                        "value": str(FUND_WEI // 50), "at": iso(at)})
    txs.sort(key=lambda t: (t["at"], t["txid"]))
    wallets.sort(key=lambda w: w["wallet_id"])
    write_jsonl("honey_wallets.jsonl", wallets)
    write_jsonl("eth_ledger.jsonl", txs)


def make_btc():
    watched = [btc_address() for _ in range(BTC_WATCHED)]
    active = rng.sample(watched, BTC_ACTIVE)
    n_recv = partition(BTC_RECEIVES, BTC_ACTIVE)
    n_send = partition(BTC_SENDS, BTC_ACTIVE)
    funded = set(rng.sample(range(BTC_ACTIVE), BTC_FUNDED_ADDRESSES))
    balances = dict(zip(sorted(funded), partition(BTC_RECEIVED_SAT - BTC_SENT_SAT, BTC_FUNDED_ADDRESSES, 10_000)))
    # Every split below needs at least 10,000 sat per transaction.
    floor = [max(r, s) * 100_000 for r, s in zip(n_recv, n_send)]
    spread = partition(BTC_SENT_SAT - sum(floor) + BTC_ACTIVE * 10_000, BTC_ACTIVE, 10_000)
    sent = [f + x - 10_000 for f, x in zip(floor, spread)]
    externals = [btc_address() for _ in range(400)]
    # The first active address spends together with outside inputs; its
    # co-spend cluster therefore grows beyond the watched set.
    cospender = active[0]

    txs = []
    for k, addr in enumerate(active):
        total_sent = sent[k]
        total_recv = total_sent + balances.get(k, 0)
        recv_amounts = partition(total_recv, n_recv[k], 10_000)
        send_amounts = partition(total_sent, n_send[k], 10_000)
        start = T0 + timedelta(days=rng.randrange(0, 120), seconds=rng.randrange(86_400))
        t = start
        balance = 0
        ri = si = 0
        while ri < len(recv_amounts) or si < len(send_amounts):
            if si < len(send_amounts) and balance >= send_amounts[si]:
                v = send_amounts[si]
                si += 1
                balance -= v
                fee = min(1_000, v // 10)
                inputs = [{"address": addr, "value": v}]
                if addr == cospender:
                    for ext in rng.sample(externals, 2):
                        inputs.append({"address": ext, "value": 50_000})
                out_value = sum(i["value"] for i in inputs) - fee
                txs.append({"txid": txid(), "inputs": inputs,
                            "outputs": [{"address": rng.choice(externals), "value": out_value}], "at": iso(t)})
            else:
                v = recv_amounts[ri]
                ri += 1
                balance += v
                src = rng.choice(externals)
                txs.append({"txid": txid(), "inputs": [{"address": src, "value": v + 2_000}],
                            "outputs": [{"address": addr, "value": v}], "at": iso(t)})
            t += timedelta(minutes=rng.randrange(10, 240))
        assert balance == balances.get(k, 0)
    txs.sort(key=lambda x: (x["at"], x["txid"]))
    write_jsonl("btc_ledger.jsonl", txs)
    (HERE / "btc_addresses.txt").write_text("".join(a + "\n" for a in watched))


if __name__ == "__main__":
    make_eth()
    make_btc()
