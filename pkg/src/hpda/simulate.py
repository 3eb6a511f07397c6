"""Execute HPDA placement and delivery on a synthetic library and check decoding.

Packets are ``uint8`` vectors. Everything is vectorized over a batch of demand
vectors; a single transcript is a batch of one. Users are indexed globally as
``u = k1 * K2 + k2`` (0-based); the public report uses 1-based labels.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ParameterError, PreconditionError
from .hpda import Hpda, hpda_scheme_point
from .pda import STAR

EXHAUSTIVE_LIMIT = 4096
DEFAULT_SAMPLES = 1000
DEFAULT_SEED = 20240601
# bytes of gathered packets held at once while evaluating a chunk of demands
_CHUNK_BYTES = 1 << 25


@dataclass(frozen=True, eq=False)
class Library:
    files: np.ndarray  # N x F x packet_bytes, uint8

    @property
    def N(self) -> int:
        return self.files.shape[0]

    @property
    def F(self) -> int:
        return self.files.shape[1]

    @property
    def packet_bytes(self) -> int:
        return self.files.shape[2]


def make_library(N: int, F: int, packet_bytes: int = 16, seed: int = DEFAULT_SEED) -> Library:
    if N < 1 or F < 1 or packet_bytes < 1:
        raise ParameterError(f"need N, F, packet_bytes >= 1, got {N}, {F}, {packet_bytes}")
    rng = np.random.default_rng(seed)
    files = rng.integers(0, 256, size=(N, F, packet_bytes), dtype=np.uint8)
    files.setflags(write=False)
    return Library(files)


@dataclass(frozen=True)
class CacheState:
    """Rows (0-based packet indices) each node stores for every file."""

    mirror_rows: tuple  # per mirror
    user_rows: tuple  # per global user
    mirror_ratio: Fraction
    user_ratio: Fraction

    def mirror_contents(self, k1: int, N: int) -> set[tuple[int, int]]:
        """1-based (file, packet) pairs held by mirror ``k1`` (0-based)."""
        return {(n + 1, j + 1) for n in range(N) for j in self.mirror_rows[k1]}

    def user_contents(self, u: int, N: int) -> set[tuple[int, int]]:
        return {(n + 1, j + 1) for n in range(N) for j in self.user_rows[u]}


def place(h: Hpda, lib: Library) -> CacheState:
    if lib.F != h.F:
        raise PreconditionError(f"library splits files into {lib.F} packets but the HPDA has F={h.F}")
    mirror_rows = tuple(tuple(np.flatnonzero(h.mirror[:, k1]).tolist()) for k1 in range(h.K1))
    user_rows = tuple(
        tuple(np.flatnonzero(h.users[k1][:, k2] == STAR).tolist()) for k1 in range(h.K1) for k2 in range(h.K2)
    )
    stored_m = sum(len(r) for r in mirror_rows)
    stored_u = sum(len(r) for r in user_rows)
    return CacheState(
        mirror_rows,
        user_rows,
        Fraction(stored_m * lib.N, h.K1 * lib.N * h.F),
        Fraction(stored_u * lib.N, h.K1 * h.K2 * lib.N * h.F),
    )


@dataclass(frozen=True)
class Message:
    """One multicast transmission: who sends it, its integer, the packets it XORs.

    ``terms`` are (row, user) pairs; the packet of a term is row ``row`` of the
    file that ``user`` demands. A mirror message derived from a server
    message lists the terms it strips using its own cache in ``removed``.
    """

    sender: int  # -1 for the server, else the mirror index
    s: int
    terms: tuple
    removed: tuple = ()
    source: int = -1  # index of the server message it was derived from

    @property
    def label(self) -> str:
        return f"X[{self.s}]" if self.sender < 0 else f"X[{self.sender + 1},{self.s}]"

    def packets(self, demand) -> list[tuple[int, int]]:
        """1-based (file, packet) pairs combined in this message under ``demand``."""
        return [(int(demand[u]), j + 1) for j, u in self.terms]


@dataclass(frozen=True, eq=False)
class DeliveryPlan:
    """Demand-independent message schedule and per-user recovery map."""

    server: tuple
    mirrors: tuple  # per mirror, tuple of Message
    recover: tuple  # per user: tuple of (row, mirror-message index, position of the term)
    faults: tuple  # structural decode failures: (user, row, reason)
    K2: int
    F: int

    @property
    def messages(self) -> list[Message]:
        return [m for ms in self.mirrors for m in ms]


def plan_delivery(h: Hpda) -> DeliveryPlan:
    K2 = h.K2
    flat = h.flat_users()
    where: dict[int, list[tuple[int, int]]] = {}
    js, us = np.nonzero(flat != STAR)
    for j, u in zip(js.tolist(), us.tolist()):
        where.setdefault(int(flat[j, u]), []).append((j, u))

    server = [Message(-1, s, tuple(where.get(s, ()))) for s in h.server_integers()]
    server_index = {m.s: idx for idx, m in enumerate(server)}

    mirrors = []
    for k1 in range(h.K1):
        msgs = []
        for s in sorted(h.S_k[k1]):
            if s in h.S_m:
                terms = tuple((j, u) for j, u in where.get(s, ()) if u // K2 == k1)
                msgs.append(Message(k1, s, terms))
                continue
            src = server[server_index[s]]
            # strip what this mirror caches from other mirrors' users
            removed = tuple((j, u) for j, u in src.terms if u // K2 != k1 and h.mirror[j, k1])
            kept = tuple(t for t in src.terms if t not in removed)
            msgs.append(Message(k1, s, kept, removed, server_index[s]))
        mirrors.append(tuple(msgs))

    recover = []
    faults = []
    for u in range(h.K1 * K2):
        k1, k2 = divmod(u, K2)
        cached = h.users[k1][:, k2] == STAR
        lookup = {}
        for mi, m in enumerate(mirrors[k1]):
            for pos, (j, uu) in enumerate(m.terms):
                if uu == u:
                    if j in lookup:
                        faults.append((u, j, f"row {j} appears in two messages of mirror {k1}"))
                    lookup[j] = (mi, pos)
        entries = []
        for j in np.flatnonzero(~cached).tolist():
            if j not in lookup:
                faults.append((u, j, "no message of its mirror carries this packet"))
                continue
            mi, pos = lookup[j]
            unknown = [(jj, uu) for p, (jj, uu) in enumerate(mirrors[k1][mi].terms) if p != pos and not cached[jj]]
            if unknown:
                faults.append((u, j, f"{mirrors[k1][mi].label} has uncached interference {unknown[:3]}"))
                continue
            entries.append((j, mi, pos))
        recover.append(tuple(entries))
    return DeliveryPlan(tuple(server), tuple(mirrors), tuple(recover), tuple(faults), K2, h.F)


class _Index:
    """Flattened term tables of a plan for vectorized XOR evaluation."""

    def __init__(self, plan: DeliveryPlan):
        def table(groups):
            rows, users, starts = [], [], [0]
            for g in groups:
                for j, u in g:
                    rows.append(j)
                    users.append(u)
                starts.append(len(rows))
            return np.array(rows, dtype=np.int64), np.array(users, dtype=np.int64), np.array(starts, dtype=np.int64)

        msgs = plan.messages
        self.s_rows, self.s_users, self.s_starts = table(m.terms for m in plan.server)
        self.m_rows, self.m_users, self.m_starts = table(m.terms for m in msgs)
        self.r_rows, self.r_users, self.r_starts = table(m.removed for m in msgs)
        self.source = np.array([m.source for m in msgs], dtype=np.int64)
        self.local = self.source < 0
        offsets = np.cumsum([0] + [len(ms) for ms in plan.mirrors])
        pu, pj, pm, pt = [], [], [], []
        for u, entries in enumerate(plan.recover):
            k1 = u // plan.K2
            for j, mi, pos in entries:
                gm = offsets[k1] + mi
                pu.append(u)
                pj.append(j)
                pm.append(gm)
                pt.append(self.m_starts[gm] + pos)
        self.p_user = np.array(pu, dtype=np.int64)
        self.p_row = np.array(pj, dtype=np.int64)
        self.p_msg = np.array(pm, dtype=np.int64)
        self.p_term = np.array(pt, dtype=np.int64)
        self.n_terms = len(self.s_rows) + len(self.m_rows) + len(self.r_rows)


def _segment_xor(packets: np.ndarray, starts: np.ndarray) -> np.ndarray:
    """XOR packets[:, starts[i]:starts[i+1]] for each segment (empty -> zeros)."""
    bd, _, nb = packets.shape
    prefix = np.zeros((bd, packets.shape[1] + 1, nb), dtype=np.uint8)
    if packets.shape[1]:
        np.bitwise_xor.accumulate(packets, axis=1, out=prefix[:, 1:])
    return prefix[:, starts[1:]] ^ prefix[:, starts[:-1]]


def _gather(files: np.ndarray, demands: np.ndarray, users: np.ndarray, rows: np.ndarray) -> np.ndarray:
    return files[demands[:, users] - 1, rows[None, :]]


def _payloads(lib: Library, idx: _Index, demands: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Server payloads, then mirror payloads computed from them as the protocol does."""
    files = lib.files
    server = _segment_xor(_gather(files, demands, idx.s_users, idx.s_rows), idx.s_starts)
    own = _segment_xor(_gather(files, demands, idx.m_users, idx.m_rows), idx.m_starts)
    stripped = _segment_xor(_gather(files, demands, idx.r_users, idx.r_rows), idx.r_starts)
    mirror = np.where(
        idx.local[None, :, None],
        own,  # generated locally from the mirror cache
        server[:, np.maximum(idx.source, 0)] ^ stripped,
    )
    return server, mirror


def _decode(lib: Library, idx: _Index, demands: np.ndarray, mirror_payloads: np.ndarray) -> np.ndarray:
    """Boolean (batch, pairs): whether each missing packet is recovered bit-exactly."""
    files = lib.files
    terms = _gather(files, demands, idx.m_users, idx.m_rows)
    # everything in a message except the wanted term comes from the user's cache
    known = _segment_xor(terms, idx.m_starts)[:, idx.p_msg] ^ terms[:, idx.p_term]
    recovered = mirror_payloads[:, idx.p_msg] ^ known
    wanted = _gather(files, demands, idx.p_user, idx.p_row)
    return np.all(recovered == wanted, axis=2)


@dataclass
class DeliveryTranscript:
    demand: tuple
    server_msgs: list  # (Message, payload bytes)
    mirror_msgs: list  # per mirror: list of (Message, payload bytes)
    measured_r1: Fraction
    measured_r2: Fraction
    per_mirror_load: list

    def payload(self, label: str) -> bytes:
        for m, p in self.server_msgs:
            if m.label == label:
                return p
        for msgs in self.mirror_msgs:
            for m, p in msgs:
                if m.label == label:
                    return p
        raise KeyError(label)


def _check_demand(h: Hpda, lib: Library, demands: np.ndarray) -> None:
    if demands.ndim != 2 or demands.shape[1] != h.K1 * h.K2:
        raise ParameterError(f"demand vectors must have {h.K1 * h.K2} entries, got shape {demands.shape}")
    if demands.size and (demands.min() < 1 or demands.max() > lib.N):
        raise ParameterError(f"demanded file index outside 1..{lib.N}")


def deliver(h: Hpda, lib: Library, d, plan: DeliveryPlan | None = None) -> DeliveryTranscript:
    """Run the server and mirror delivery for one demand vector (1-based files)."""
    plan = plan or plan_delivery(h)
    demands = np.asarray([d], dtype=np.int64)
    _check_demand(h, lib, demands)
    server, mirror = _payloads(lib, _Index(plan), demands)
    server_msgs = [(m, server[0, i].tobytes()) for i, m in enumerate(plan.server)]
    mirror_msgs = []
    pos = 0
    for msgs in plan.mirrors:
        mirror_msgs.append([(m, mirror[0, pos + i].tobytes()) for i, m in enumerate(msgs)])
        pos += len(msgs)
    loads = [Fraction(len(ms), h.F) for ms in plan.mirrors]
    return DeliveryTranscript(
        tuple(int(x) for x in d),
        server_msgs,
        mirror_msgs,
        Fraction(len(plan.server), h.F),
        max(loads) if loads else Fraction(0),
        loads,
    )


@dataclass
class UserResult:
    user: tuple  # (k1, k2), 1-based
    ok: bool
    log: list  # (packet, source) with source "cache" or a message label
    missing: list  # packets not recovered, 1-based


@dataclass
class DecodeReport:
    users: list

    @property
    def ok(self) -> bool:
        return all(u.ok for u in self.users)

    def failures(self) -> list[UserResult]:
        return [u for u in self.users if not u.ok]


def decode_all(h: Hpda, lib: Library, d, transcript: DeliveryTranscript, plan: DeliveryPlan | None = None) -> DecodeReport:
    """Each user rebuilds its file from its cache and its mirror's messages."""
    plan = plan or plan_delivery(h)
    idx = _Index(plan)
    demands = np.asarray([d], dtype=np.int64)
    _check_demand(h, lib, demands)
    payloads = np.array(
        [[np.frombuffer(p, dtype=np.uint8) for msgs in transcript.mirror_msgs for _, p in msgs]], dtype=np.uint8
    ).reshape(1, len(plan.messages), lib.packet_bytes)
    ok = _decode(lib, idx, demands, payloads)[0]
    faults: dict[int, list[int]] = {}
    for u, j, _ in plan.faults:
        faults.setdefault(u, []).append(j)

    users = []
    offsets = np.cumsum([0] + [len(ms) for ms in plan.mirrors])
    pair = 0
    for u, entries in enumerate(plan.recover):
        k1, k2 = divmod(u, h.K2)
        log = [(j + 1, "cache") for j in np.flatnonzero(h.users[k1][:, k2] == STAR).tolist()]
        missing = [j + 1 for j in faults.get(u, [])]
        for j, mi, _ in entries:
            if ok[pair]:
                log.append((j + 1, plan.mirrors[k1][mi].label))
            else:
                missing.append(j + 1)
            pair += 1
        log.sort()
        users.append(UserResult((k1 + 1, k2 + 1), not missing, log, sorted(missing)))
    assert pair == len(idx.p_user) and offsets[-1] == len(plan.messages)
    return DecodeReport(users)


def verify_loads(h: Hpda, transcripts) -> dict:
    """Compare measured loads with the counting formula on the integer sets."""
    transcripts = list(transcripts)
    if not transcripts:
        raise PreconditionError("need at least one transcript")
    point = hpda_scheme_point(h)
    r1 = {t.measured_r1 for t in transcripts}
    r2 = {t.measured_r2 for t in transcripts}
    return {
        "r1_formula": point.r1,
        "r2_formula": point.r2,
        "r1_measured": sorted(r1),
        "r2_measured": sorted(r2),
        "ok": r1 == {point.r1} and r2 == {point.r2},
    }


def demand_batches(N: int, users: int, policy="auto", samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED, chunk: int = 4096):
    """Yield ``(count, users)`` int arrays of 1-based demands.

    ``policy`` is ``"auto"`` (exhaustive when N**users <= 4096, else sampled),
    ``"exhaustive"`` or ``("sample", count)``.
    """
    if isinstance(policy, str) and policy.startswith("sample:"):
        policy = ("sample", int(policy.split(":", 1)[1]))
    if policy == "auto":
        policy = "exhaustive" if N**users <= EXHAUSTIVE_LIMIT else ("sample", samples)
    if policy == "exhaustive":
        it = itertools.product(range(1, N + 1), repeat=users)
        while True:
            block = list(itertools.islice(it, chunk))
            if not block:
                return
            yield np.array(block, dtype=np.int64)
    elif isinstance(policy, tuple) and policy[0] == "sample":
        count = int(policy[1])
        if count < 1:
            raise ParameterError(f"sample count must be positive, got {count}")
        rng = np.random.default_rng(seed)
        done = 0
        while done < count:
            n = min(chunk, count - done)
            yield rng.integers(1, N + 1, size=(n, users), dtype=np.int64)
            done += n
    else:
        raise ParameterError(f"unknown demand policy {policy!r}")


def describe_policy(N: int, users: int, policy="auto", samples: int = DEFAULT_SAMPLES) -> str:
    if isinstance(policy, str) and policy.startswith("sample:"):
        return policy
    if policy == "auto":
        return "exhaustive" if N**users <= EXHAUSTIVE_LIMIT else f"sample:{samples}"
    if isinstance(policy, tuple):
        return f"sample:{policy[1]}"
    return str(policy)


@dataclass
class SimulationReport:
    K1: int
    K2: int
    F: int
    N: int
    policy: str
    seed: int
    demands_tested: int = 0
    demands_ok: int = 0
    failures: list = field(default_factory=list)  # (demand, user, packets) for the first few
    structural_faults: list = field(default_factory=list)
    measured_r1: Fraction = Fraction(0)
    measured_r2: Fraction = Fraction(0)
    formula_r1: Fraction = Fraction(0)
    formula_r2: Fraction = Fraction(0)
    mirror_ratio: Fraction = Fraction(0)
    user_ratio: Fraction = Fraction(0)

    @property
    def ok(self) -> bool:
        return self.demands_tested > 0 and self.demands_ok == self.demands_tested

    @property
    def t_seq(self) -> Fraction:
        return self.measured_r1 + self.measured_r2

    @property
    def t_par(self) -> Fraction:
        return max(self.measured_r1, self.measured_r2)

    def to_json(self) -> dict:
        def q(x: Fraction) -> str:
            return str(x)

        return {
            "K1": self.K1,
            "K2": self.K2,
            "F": self.F,
            "N": self.N,
            "policy": self.policy,
            "seed": self.seed,
            "demands_tested": self.demands_tested,
            "demands_ok": self.demands_ok,
            "success": self.ok,
            "failures": self.failures,
            "structural_faults": self.structural_faults,
            "R1": q(self.measured_r1),
            "R2": q(self.measured_r2),
            "R1_formula": q(self.formula_r1),
            "R2_formula": q(self.formula_r2),
            "T_seq": q(self.t_seq),
            "T_par": q(self.t_par),
            "mirror_cache_ratio": q(self.mirror_ratio),
            "user_cache_ratio": q(self.user_ratio),
        }


def simulate(
    h: Hpda,
    N: int | None = None,
    policy="auto",
    *,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    packet_bytes: int = 16,
    max_failures: int = 10,
) -> SimulationReport:
    """Place, deliver and decode for every demand the policy yields."""
    users = h.K1 * h.K2
    N = users if N is None else N
    lib = make_library(N, h.F, packet_bytes, seed)
    cache = place(h, lib)
    plan = plan_delivery(h)
    idx = _Index(plan)
    point = hpda_scheme_point(h)
    report = SimulationReport(
        h.K1,
        h.K2,
        h.F,
        N,
        describe_policy(N, users, policy, samples),
        seed,
        structural_faults=[((u // h.K2 + 1, u % h.K2 + 1), j + 1, why) for u, j, why in plan.faults],
        measured_r1=Fraction(len(plan.server), h.F),
        measured_r2=max(Fraction(len(ms), h.F) for ms in plan.mirrors),
        formula_r1=point.r1,
        formula_r2=point.r2,
        mirror_ratio=cache.mirror_ratio,
        user_ratio=cache.user_ratio,
    )
    per_demand_terms = max(idx.n_terms + 2 * len(idx.p_user), 1) * packet_bytes
    step = max(1, _CHUNK_BYTES // per_demand_terms)
    for batch in demand_batches(N, users, policy, samples, seed + 1):
        for lo in range(0, len(batch), step):
            demands = batch[lo : lo + step]
            _check_demand(h, lib, demands)
            _, mirror = _payloads(lib, idx, demands)
            ok = _decode(lib, idx, demands, mirror)
            good = ok.all(axis=1) & (not plan.faults)
            report.demands_tested += len(demands)
            report.demands_ok += int(good.sum())
            for b in np.flatnonzero(~good)[: max(0, max_failures - len(report.failures))]:
                bad = np.flatnonzero(~ok[b])
                bad_users = sorted({int(idx.p_user[p]) for p in bad})
                report.failures.append(
                    {
                        "demand": demands[b].tolist(),
                        "users": [(u // h.K2 + 1, u % h.K2 + 1) for u in bad_users[:5]],
                        "packets": [int(idx.p_row[p]) + 1 for p in bad[:5]],
                    }
                )
    return report
