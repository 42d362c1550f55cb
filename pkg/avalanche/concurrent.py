from concurrent.futures import Executor, Future, wait
from typing import Any, List


class ExceptionRaisingAwaitableExecutor(Executor):
    """
    Wrap an executor, keeping the futures it submits so their exceptions surface and their results come back in
    submission order.
    """

    def __init__(self, executor: Executor):
        self._executor = executor
        self._awaitables: List[Future] = []

    def submit(self, *args, **kwargs):
        future = self._executor.submit(*args, **kwargs)
        self._awaitables.append(future)
        return future

    def map(self, *args, **kwargs):
        return self._executor.map(*args, **kwargs)

    def wait(self) -> None:
        awaitables = self._awaitables
        self._awaitables = []
        wait(awaitables)
        for future in awaitables:
            future.result()

    def results(self) -> List[Any]:
        awaitables = self._awaitables
        self._awaitables = []
        return [future.result() for future in awaitables]

    def shutdown(self, *args, **kwargs):
        self._executor.shutdown(*args, **kwargs)
        for future in self._awaitables:
            future.result()


class InlineExecutor(Executor):
    """
    Run submitted callables immediately, in the calling process.
    """

    def submit(self, fn, /, *args, **kwargs):
        future: Future = Future()
        try:
            future.set_result(fn(*args, **kwargs))
        except BaseException as e:
            future.set_exception(e)
        return future
