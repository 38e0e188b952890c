import numpy as np

from usflab.rng import Uniforms, child, run_replicas, split, stream, thread_count


def test_streams_are_reproducible_and_distinct():
    assert stream(7, 3).random() == stream(7, 3).random()
    assert stream(7, 3).random() != stream(7, 4).random()
    assert stream(7, 3, 1).random() != stream(7, 3, 2).random()


def test_replicas_independent_of_threads():
    def fn(rng, i):
        return rng.standard_normal(50).sum() + i

    one = run_replicas(fn, 11, 32, threads=1)
    many = run_replicas(fn, 11, 32, threads=8)
    assert one == many


def test_split():
    assert split(10, 4) == [4, 4, 2]
    assert split(8, 4) == [4, 4]
    assert sum(split(100_003, 4096)) == 100_003


def test_thread_count(monkeypatch):
    monkeypatch.delenv("USF_LAB_THREADS", raising=False)
    assert thread_count() == 1
    monkeypatch.setenv("USF_LAB_THREADS", "6")
    assert thread_count() == 6
    assert thread_count(3) == 3


def test_uniforms_and_child():
    u = Uniforms(np.random.default_rng(0), block=4)
    xs = [u() for _ in range(10)]
    assert all(0 <= x < 1 for x in xs) and len(set(xs)) == 10
    assert 0 <= u.index(5) < 5
    assert child(stream(1), 2).random() == child(stream(1), 2).random()
