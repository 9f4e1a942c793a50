# Orbit worker and runner for multi process

import logging
import queue
import traceback
from collections.abc import Sequence
from dataclasses import dataclass
from multiprocessing import Process, Queue
from typing import Optional

from gifsolve.chaos import OrbitConfig, random_orbit
from gifsolve.errors import InvalidInputError
from gifsolve.measure import DiscreteMeasure, GifsP
from gifsolve.metric import FloatArray

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OrbitCommand:
    """
    Orbit command.

    Attributes
    ----------
    index : int
        Index of the orbit configuration to run.
        Negative index means an exit command.
    """

    index: int

    @classmethod
    def exit(cls) -> "OrbitCommand":
        """Return an exit command."""
        return cls(-1)

    @property
    def is_exit(self) -> bool:
        """An exit command or not."""
        return self.index < 0


@dataclass(frozen=True)
class OrbitResult:
    """
    Orbit result.

    Attributes
    ----------
    index : int
        Index of the orbit configuration.
    points : Optional[FloatArray], default None
        Orbit points, or None if an error occurred.
    error : Optional[RuntimeError], default None
        Error that occurred when generating the orbit.
    """

    index: int
    points: Optional[FloatArray] = None
    error: Optional[RuntimeError] = None


class OrbitWorker:
    """
    Orbit worker.
    """

    def __init__(
        self,
        p: GifsP,
        nu: DiscreteMeasure,
        configs: Sequence[OrbitConfig],
        request_queue: Queue,
        notify_queue: Queue,
    ) -> None:
        """
        Parameters
        ----------
        p : GifsP
            GIFS with probabilities.
        nu : DiscreteMeasure
            Measure on the tail arguments.
        configs : Sequence[OrbitConfig]
            All orbit configurations; commands refer to them by index.
        request_queue : Queue
            Queue for receiving orbit commands from orbit runner.
        notify_queue : Queue
            Queue for notifying orbit completion to orbit runner.
        """
        self.__p = p
        self.__nu = nu
        self.__configs = tuple(configs)
        self.__request_queue = request_queue
        self.__notify_queue = notify_queue
        self.__process: Optional[Process] = None

    def start(self) -> None:
        """Start orbit worker process."""
        if self.__process is not None:
            return

        self.__process = Process(target=self)
        self.__process.start()

    def stop(self) -> None:
        """Stop orbit worker process."""
        if self.__process is None:
            return

        self.__request_queue.put(OrbitCommand.exit())
        self.__process.join()
        self.__process = None

    def __call__(self) -> None:
        """Main for orbit worker process."""
        while True:
            command = self.__request_queue.get()
            if command.is_exit:
                # Spread the exit command to other worker before exiting,
                # because it may be intended for others.
                self.__request_queue.put(command)
                return
            self.__notify_queue.put(self.execute(command.index))

    def execute(self, index: int) -> OrbitResult:
        """
        Generate one orbit.

        Parameters
        ----------
        index : int
            Index of the orbit configuration.

        Returns
        -------
        result : OrbitResult
            Orbit points, or the error.
        """
        try:
            try:
                points = random_orbit(self.__p, self.__nu, self.__configs[index])
            except Exception as e:
                raise RuntimeError(f"Orbit {index} causes an error.") from e
            return OrbitResult(index, points)
        except RuntimeError as e:
            # Orbit runner can not show stack trace, so print stack trace here.
            print(traceback.format_exc())
            return OrbitResult(index, error=e)


class OrbitRunner:
    """
    Orbit runner for multi process.
    """

    @classmethod
    def create(cls, n_workers: int) -> "OrbitRunner":
        """
        Create an orbit runner.

        Parameters
        ----------
        n_workers : int
            The number of worker processes (1 runs orbits in this process).

        Returns
        -------
        runner : OrbitRunner
            Created orbit runner.
        """
        if n_workers < 1:
            raise InvalidInputError("The number of workers must be positive.")
        return cls(n_workers)

    def __init__(self, n_workers: int) -> None:
        """
        Parameters
        ----------
        n_workers : int
            The number of worker processes.
        """
        self.__n_workers = n_workers

    @property
    def n_workers(self) -> int:
        """The number of worker processes."""
        return self.__n_workers

    def run(
        self, p: GifsP, nu: DiscreteMeasure, configs: Sequence[OrbitConfig]
    ) -> list[FloatArray]:
        """
        Generate independent orbits.

        Parameters
        ----------
        p : GifsP
            GIFS with probabilities.
        nu : DiscreteMeasure
            Measure on the tail arguments.
        configs : Sequence[OrbitConfig]
            One configuration per orbit.

        Returns
        -------
        orbits : list[FloatArray]
            Orbits in the order of configs.

        Raises
        ------
        RuntimeError
            If generating an orbit causes an error.
        """
        request_queue: Queue[OrbitCommand] = Queue()
        notify_queue: Queue[OrbitResult] = Queue()
        if self.__n_workers == 1 or len(configs) <= 1:
            worker = OrbitWorker(p, nu, configs, request_queue, notify_queue)
            return [self.__unwrap(worker.execute(i)) for i in range(len(configs))]

        workers = [
            OrbitWorker(p, nu, configs, request_queue, notify_queue)
            for _ in range(min(self.__n_workers, len(configs)))
        ]
        try:
            for worker in workers:
                worker.start()
            for index in range(len(configs)):
                request_queue.put(OrbitCommand(index))

            results: dict[int, FloatArray] = {}
            while len(results) < len(configs):
                result = notify_queue.get()
                results[result.index] = self.__unwrap(result)
                logger.debug(
                    "orbit %d done (%d/%d)", result.index, len(results), len(configs)
                )
            return [results[i] for i in range(len(configs))]
        finally:
            self.__stop_workers(workers, request_queue)

    @staticmethod
    def __unwrap(result: OrbitResult) -> FloatArray:
        if result.error is not None:
            raise result.error
        assert result.points is not None
        return result.points

    @staticmethod
    def __stop_workers(workers: list[OrbitWorker], request_queue: Queue) -> None:
        # Clear request queue.
        try:
            while True:
                # If request queue is empty, raises queue.Empty exception.
                request_queue.get_nowait()
        except queue.Empty:
            pass

        for worker in workers:
            worker.stop()
