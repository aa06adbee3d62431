import random

import numpy as np
import pytest

from dtnsat.contacts import (
    ContactTracker,
    LinkParams,
    TransferJob,
    contact_diff,
    detect,
    detect_bruteforce,
    progress_transfers,
)
from dtnsat.routing import Message


def make_job(size, sender=0, receiver=1, mid="M1"):
    msg = Message(id=mid, source=sender, destination=receiver, size=size)
    return TransferJob(message=msg, sender=sender, receiver=receiver,
                       bytes_remaining=float(size), started_at=0.0)


def test_link_params_defaults_and_validation():
    p = LinkParams()
    assert p.range_m == 10.0
    assert p.bandwidth == 1_400_000.0
    with pytest.raises(ValueError):
        LinkParams(range_m=0.0)
    with pytest.raises(ValueError):
        LinkParams(bandwidth=-1.0)


def test_detect_range_boundary_is_inclusive():
    pos = np.array([[0.0, 0.0], [10.0, 0.0], [20.02, 0.0]])
    pairs = detect(pos, 10.0)
    assert pairs == [(0, 1)]  # exactly 10.0 in, 10.02 out
    pos2 = np.array([[0.0, 0.0], [10.01, 0.0]])
    assert detect(pos2, 10.0) == []


def test_detect_matches_brute_force():
    rng = random.Random(17)
    for _ in range(100):
        n = rng.randint(2, 200)
        side = rng.choice([30.0, 80.0, 300.0])
        pos = np.array([[rng.uniform(0, side), rng.uniform(0, side)]
                        for _ in range(n)])
        fast = detect(pos, 10.0)
        slow = detect_bruteforce(pos, 10.0)
        assert fast == slow
        for i, j in fast:
            assert i < j


def test_detect_sorted_order():
    pos = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [100.0, 0.0]])
    assert detect(pos, 10.0) == [(0, 1), (0, 2), (1, 2)]


def test_contact_diff():
    ups, downs = contact_diff([(0, 1), (2, 3)], [(0, 1), (1, 2)])
    assert ups == [(1, 2)]
    assert downs == [(2, 3)]
    ups, downs = contact_diff([], [(0, 1)])
    assert ups == [(0, 1)]
    assert downs == []


def test_small_message_completes_in_one_tick():
    # 1.4e6 B/s * 0.1 s = 140000 B budget, plenty for one 2064 B message
    job = make_job(2064)
    done, aborted, ongoing = progress_transfers([job], 0.1, {(0, 1)}, 1_400_000.0)
    assert done == [job]
    assert aborted == [] and ongoing == []
    assert job.bytes_remaining == 0.0


def test_large_message_takes_four_ticks():
    job = make_job(500_000)
    contacts = {(0, 1)}
    for tick in range(1, 5):
        done, aborted, ongoing = progress_transfers([job], 0.1, contacts, 1_400_000.0)
        if tick < 4:
            assert done == [] and ongoing == [job]
            assert job.bytes_remaining == pytest.approx(500_000 - 140_000 * tick)
        else:
            assert done == [job]


def test_transfer_aborts_when_pair_separates():
    job = make_job(500_000)
    done, aborted, ongoing = progress_transfers([job], 0.1, {(0, 1)}, 1_400_000.0)
    assert ongoing == [job]
    done, aborted, ongoing = progress_transfers([job], 0.1, set(), 1_400_000.0)
    assert aborted == [job]
    assert done == [] and ongoing == []


def test_sender_budget_shared_between_jobs():
    # same sender, two receivers: combined bytes this tick capped at 140000
    j1 = make_job(100_000, sender=0, receiver=1, mid="A")
    j2 = make_job(100_000, sender=0, receiver=2, mid="B")
    contacts = {(0, 1), (0, 2)}
    done, aborted, ongoing = progress_transfers([j1, j2], 0.1, contacts, 1_400_000.0)
    assert done == [j1]
    assert ongoing == [j2]
    assert j2.bytes_remaining == pytest.approx(60_000)


def test_receiver_budget_shared_between_jobs():
    j1 = make_job(100_000, sender=0, receiver=2, mid="A")
    j2 = make_job(100_000, sender=1, receiver=2, mid="B")
    contacts = {(0, 2), (1, 2)}
    done, aborted, ongoing = progress_transfers([j1, j2], 0.1, contacts, 1_400_000.0)
    assert done == [j1]
    assert j2.bytes_remaining == pytest.approx(60_000)


def test_used_dict_carries_budget_across_calls():
    used = {}
    j1 = make_job(140_000, mid="A")
    done, _, _ = progress_transfers([j1], 0.1, {(0, 1)}, 1_400_000.0, used=used)
    assert done == [j1]
    # the whole tick budget for nodes 0 and 1 is now consumed
    j2 = make_job(10, mid="B")
    done, _, ongoing = progress_transfers([j2], 0.1, {(0, 1)}, 1_400_000.0, used=used)
    assert done == []
    assert ongoing == [j2]
    assert j2.bytes_remaining == 10.0


def test_jobs_with_equal_fields_are_distinct_objects():
    a = make_job(2064)
    b = make_job(2064)
    assert a != b
    jobs = [a, b]
    jobs.remove(b)
    assert jobs == [a]


def test_pair_is_ordered():
    job = make_job(2064, sender=5, receiver=2)
    assert job.pair == (2, 5)


def test_tracker_matches_detect_across_moving_ticks():
    # random walk with per-tick displacement <= max_speed * dt; the tracker
    # must return exactly detect()'s pairs on every tick, rebuild or not
    rng = random.Random(41)
    n, r, max_speed, dt = 80, 10.0, 1.7, 0.1
    pos = np.array([[rng.uniform(0, 60), rng.uniform(0, 60)] for _ in range(n)])
    tracker = ContactTracker(r, max_speed, dt, rebuild_every=7)
    step = max_speed * dt
    for _ in range(60):
        got = tracker.pairs(pos)
        assert got == set(detect(pos, r))
        for i in range(n):
            ang = rng.uniform(0, 2 * np.pi)
            d = rng.uniform(0, step)
            pos[i, 0] += d * np.cos(ang)
            pos[i, 1] += d * np.sin(ang)


def test_tracker_sees_pairs_that_close_between_rebuilds():
    # two nodes start outside range but inside the inflated candidate
    # radius, then close at full speed: the cached candidates must still
    # surface the pair the tick it enters range
    tracker = ContactTracker(10.0, 1.0, 1.0, rebuild_every=5)
    pos = np.array([[0.0, 0.0], [13.0, 0.0]])
    assert tracker.pairs(pos) == set()  # rebuild happens here
    for _ in range(4):
        pos[1, 0] -= 2.0  # both close at max speed toward each other
        expected = {(0, 1)} if pos[1, 0] <= 10.0 else set()
        assert tracker.pairs(pos) == expected


def test_tracker_step_reports_exact_contact_churn():
    rng = random.Random(97)
    n, r, max_speed, dt = 60, 10.0, 1.7, 0.1
    pos = np.array([[rng.uniform(0, 45), rng.uniform(0, 45)] for _ in range(n)])
    tracker = ContactTracker(r, max_speed, dt, rebuild_every=5)
    prev = []
    for _ in range(40):
        ups, downs = tracker.step(pos)
        cur = detect(pos, r)
        assert (ups, downs) == contact_diff(prev, cur)
        prev = cur
        for i in range(n):
            ang = rng.uniform(0, 2 * np.pi)
            d = rng.uniform(0, max_speed * dt)
            pos[i, 0] += d * np.cos(ang)
            pos[i, 1] += d * np.sin(ang)


def test_tracker_handles_population_change_and_small_n():
    tracker = ContactTracker(10.0, 1.7, 0.1)
    assert tracker.pairs(np.empty((0, 2))) == set()
    assert tracker.pairs(np.array([[0.0, 0.0]])) == set()
    assert tracker.pairs(np.array([[0.0, 0.0], [5.0, 0.0]])) == {(0, 1)}
    grown = np.array([[0.0, 0.0], [5.0, 0.0], [5.0, 4.0], [100.0, 0.0]])
    assert tracker.pairs(grown) == {(0, 1), (0, 2), (1, 2)}


def test_tracker_validation():
    with pytest.raises(ValueError):
        ContactTracker(0.0, 1.0, 0.1)
    with pytest.raises(ValueError):
        ContactTracker(10.0, -1.0, 0.1)
    with pytest.raises(ValueError):
        ContactTracker(10.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        ContactTracker(10.0, 1.0, 0.1, rebuild_every=0)
