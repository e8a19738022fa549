import asyncio
import logging
import time
from concurrent.futures import ProcessPoolExecutor
import psutil

logger = logging.getLogger("TrialProcessingManager")


class TrialProcessingManager:
    def __init__(self,
                 batch_fetcher,
                 batch_processor_action,
                 processors_number=1,
                 queue_maxsize=4,
                 semaphore_value=1,
                 acknowledgment_function=None,
                 log_interval=60,
                 executor=None):
        """
        Initializes the TrialProcessingManager.

        Batches are (batch_index, first_trial, size) tuples. The processor
        action is a plain function run in `executor` (the loop's default
        executor when None).
        """
        self.batch_fetcher = batch_fetcher
        self.batch_processor_action = batch_processor_action
        self.processors_number = processors_number
        self.queue_maxsize = queue_maxsize
        self.semaphore_value = semaphore_value
        self.acknowledgment_function = acknowledgment_function
        self.executor = executor

        # Batch queue for fetcher and processors to share
        self.queue = asyncio.Queue(maxsize=self.queue_maxsize)
        # Semaphore to limit concurrent processing
        self.semaphore = asyncio.Semaphore(self.semaphore_value)
        # Stop event to gracefully shutdown
        self.stop_event = asyncio.Event()

        # Counters for successful and failed batches
        self.success_count = 0
        self.error_count = 0
        self.failed_batches = []
        self.batch_errors = {}
        self.active_workers = 0
        self.total_processed = 0
        self.processing_times = []
        self.lock = asyncio.Lock()

        # Time interval for logging status and resetting counts
        self.log_interval = log_interval

    async def fetch_tasks(self):
        """The fetcher coroutine that puts batches in the queue."""
        logger.debug("BatchFetcher started!")
        try:
            async for batch in self.batch_fetcher():
                # Wait for space in the queue if it's full
                await self.queue.put(batch)
                logger.debug(f"Batch added to queue: {batch}")
        except Exception as e:
            logger.error(f"BatchFetcher error: {e}")
        finally:
            logger.debug("BatchFetcher stopped fetching batches.")
            # Send poison pills to processors to indicate completion
            for _ in range(self.processors_number):
                await self.queue.put(None)

    async def process_tasks(self, processor_name):
        """The processor coroutine that runs batches from the queue."""
        logger.debug(f"{processor_name} started!")
        loop = asyncio.get_running_loop()
        while True:
            batch = await self.queue.get()
            if batch is None:
                # Poison pill received, stop the processor
                break

            logger.debug(f"{processor_name} took batch from queue: {batch}")

            async with self.semaphore:
                async with self.lock:
                    self.active_workers += 1

                start_time = time.time()
                try:
                    result = await loop.run_in_executor(self.executor, self.batch_processor_action, batch)
                    logger.debug(f"{processor_name} finished batch: {batch}")

                    if self.acknowledgment_function:
                        await self.acknowledgment_function(batch, result)

                    await self.increment_success_count()
                except Exception as e:
                    logger.error(f"Error processing batch {batch}: {e!r}")
                    await self.increment_error_count(batch, e)
                finally:
                    async with self.lock:
                        self.active_workers -= 1
                        self.processing_times.append(time.time() - start_time)

        logger.debug(f"{processor_name} finished working!")

    async def increment_success_count(self):
        async with self.lock:
            self.success_count += 1
            self.total_processed += 1

    async def increment_error_count(self, batch, error):
        async with self.lock:
            self.error_count += 1
            self.total_processed += 1
            self.failed_batches.append(batch)
            self.batch_errors[batch[0]] = error

    async def log_and_reset_counts(self):
        """Periodically logs batch counts, queue size, throughput and memory, then resets the counts."""
        while not self.stop_event.is_set():
            try:
                await asyncio.wait_for(self.stop_event.wait(), timeout=self.log_interval)
                break
            except asyncio.TimeoutError:
                pass

            async with self.lock:
                queue_size = self.queue.qsize()
                avg_processing_time = (sum(self.processing_times) / len(self.processing_times)) if self.processing_times else 0
                throughput = self.total_processed / self.log_interval if self.log_interval > 0 else 0
                resident = psutil.Process().memory_info().rss / (1024 * 1024)

                logger.info(f"{self.success_count} batches done, {self.error_count} failed in the last {self.log_interval} seconds.")
                logger.info(f"{queue_size} batches queued, {self.active_workers} of {self.processors_number} workers active.")
                logger.info(f"Average batch time: {avg_processing_time:.2f} s. Throughput: {throughput:.2f} batches/s.")
                logger.info(f"Resident memory: {resident:.1f} MiB.")

                self.success_count = 0
                self.error_count = 0
                self.total_processed = 0
                self.processing_times.clear()

    async def start(self):
        """Starts the fetcher, processors and periodic logging, and waits for the queue to drain."""
        fetcher_task = asyncio.create_task(self.fetch_tasks())

        processor_tasks = [
            asyncio.create_task(self.process_tasks(f"Processor#{i+1}"))
            for i in range(self.processors_number)
        ]

        logging_task = asyncio.create_task(self.log_and_reset_counts())

        await asyncio.gather(fetcher_task, *processor_tasks)

        self.stop_event.set()
        await logging_task


def make_batches(total, batch_size):
    """(batch_index, first_trial, size) covering range(total) in fixed-size batches."""
    return [
        (index, first, min(batch_size, total - first))
        for index, first in enumerate(range(0, total, batch_size))
    ]


def run_batches(batch_processor_action, batches, workers=1, log_interval=60):
    """
    Runs every batch through a TrialProcessingManager and returns the results
    ordered by batch index. Any failed batch fails the whole run; the error of
    the lowest failed batch is re-raised.
    """
    results = {}

    async def batch_fetcher():
        for batch in batches:
            yield batch

    async def acknowledgment_function(batch, result):
        results[batch[0]] = result

    async def main():
        executor = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
        try:
            manager = TrialProcessingManager(
                batch_fetcher=batch_fetcher,
                batch_processor_action=batch_processor_action,
                processors_number=max(1, workers),
                queue_maxsize=max(1, 2 * workers),
                semaphore_value=max(1, workers),
                acknowledgment_function=acknowledgment_function,
                log_interval=log_interval,
                executor=executor,
            )
            await manager.start()
            return manager.batch_errors
        finally:
            if executor is not None:
                executor.shutdown()

    errors = asyncio.run(main())
    if errors:
        logger.error(f"{len(errors)} of {len(batches)} trial batches failed")
        raise errors[min(errors)]
    return [results[index] for index in sorted(results)]
