#! /usr/bin/env python

# Standard Imports
from queue import Queue
from threading import Thread, Lock

# coresmc Imports
from coresmc import *

# Logging
log = logging.getLogger('coresmc.kits.thread_pool')

# Ideas was originally taken from https://www.metachris.com/2016/04/python-threadpool/ and modified heavily

_STOP = object()


class Worker(Thread):
    """daemon thread taking (func, args, kwargs) tasks off the pool queue until it sees the stop marker"""

    def __init__(self, worker_id, pool):
        super(Worker, self).__init__(name='{}-{}'.format(pool.name, worker_id))
        self.worker_id = worker_id
        self.pool = pool
        self.daemon = True
        self.start()

    def run(self):
        while True:
            task = self.pool.tasks.get()
            try:
                if task is _STOP:
                    return
                func, args, kwargs = task
                if self.pool.trace_logs:
                    log.trace('{} starting task: func={} args={}'.format(self.name, func, args))
                try:
                    func(*args, **kwargs)
                except Exception as exc:
                    log.error('{} task failed: func={} args={} exc={}'.format(self.name, func, args, exc))
                    self.pool.task_done(self.worker_id, exc)
                else:
                    self.pool.task_done(self.worker_id)
            finally:
                self.pool.tasks.task_done()


class ThreadPool(object):
    """
    fixed pool of worker threads consuming a task queue.
    theta-particle work units are submitted with run_indexed, which blocks until every unit finished,
    so each call is one synchronisation point of the sampler.
    """

    def __init__(self, num_threads, name='pool', trace_logs=False):
        self.name = name
        self.trace_logs = trace_logs
        self.tasks = Queue()
        self._lock = Lock()
        self._operating = True
        self._total_task_count = 0
        self._tasks_ok_count = 0
        self._tasks_nok_count = 0
        self.worker_counters = {}
        self.errors = []
        self._workers = []
        for worker_id in range(max(1, int(num_threads))):
            self.worker_counters[worker_id] = 0
            self._workers.append(Worker(worker_id, self))
        log.trace('thread pool started: name={} size={}'.format(self.name, self.size))

    @property
    def size(self):
        return len(self._workers)

    @property
    def operating(self):
        return self._operating

    @property
    def count_total(self):
        return self._total_task_count

    @property
    def count_completed(self):
        return sum(self.worker_counters.values())

    @property
    def count_remaining(self):
        return self.count_total - self.count_completed

    @property
    def count_ok(self):
        return self._tasks_ok_count

    @property
    def count_nok(self):
        return self._tasks_nok_count

    @property
    def finished(self):
        return self.count_remaining == 0

    def task_done(self, worker_id, exc=None):
        with self._lock:
            self.worker_counters[worker_id] += 1
            if exc is None:
                self._tasks_ok_count += 1
            else:
                self._tasks_nok_count += 1
                self.errors.append(exc)

    def add_task(self, func, *args, **kwargs):
        if not self._operating:
            raise RuntimeError('thread pool is stopped: name={}'.format(self.name))
        with self._lock:
            self._total_task_count += 1
        self.tasks.put((func, args, kwargs))

    def map(self, func, args_list):
        for args in args_list:
            self.add_task(func, args)

    def wait_completion(self):
        """block until the queue is drained"""
        self.tasks.join()

    def run_indexed(self, func, count):
        """
        run func(i) for i in range(count) and block until all are done.
        the first exception raised by a unit of this batch is re-raised once the whole batch finished.
        :param func: callable taking the work unit index
        :param count: number of work units
        """
        errors_before = len(self.errors)
        self.map(func, range(count))
        self.wait_completion()
        if len(self.errors) > errors_before:
            raise self.errors[errors_before]

    def stop(self):
        """workers exit once they reach the stop markers, queued tasks ahead of them still run"""
        if not self._operating:
            return
        self._operating = False
        for _ in self._workers:
            self.tasks.put(_STOP)

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.stop()
