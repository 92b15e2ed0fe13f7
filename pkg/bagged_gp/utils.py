#
# Copyright Elasticsearch B.V. and/or licensed to Elasticsearch B.V. under one
# or more contributor license agreements. Licensed under the Elastic License 2.0;
# you may not use this file except in compliance with the Elastic License 2.0.
#
"""This module contains uncategorized utility methods."""

from concurrent.futures import ThreadPoolExecutor

import numpy as np


def split_rows_into_chunks(rows, chunk_size):
    """This method splits a matrix or list into consecutive chunks
    :param rows: array or list to be partitioned into chunks
    :param chunk_size: Maximum number of rows in a chunk
    Returns:
        list_of_chunks: List containing the chunks, in order
    """
    return [rows[i: i + chunk_size] for i in range(0, len(rows), chunk_size)]


def run_in_threads(thread_count, func, items):
    """Apply func to every item using multithreading, preserving item order
    :param thread_count: Total number of threads to be spawned
    :param func: The target function, called once per item
    :param items: iterable of arguments for func
    Returns:
        results: list of func(item) in the order of items
    """
    items = list(items)
    if thread_count <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=thread_count) as executor:
        return list(executor.map(func, items))


def member_rng(seed, *keys):
    """Random generator for stream `keys` of `seed`, independent of scheduling
    :param seed: the run seed
    :param keys: member or restart index, optionally followed by a purpose key
    """
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=tuple(keys)))
