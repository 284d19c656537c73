"""Exceptions shared across the optimizer modules."""


class RunAborted(RuntimeError):
    """Unrecoverable numerical failure inside an optimization run.

    Raised e.g. on non-finite objective values or a failed covariance
    eigendecomposition. The benchmark harness converts this into a failed
    run record tagged with `tag` instead of crashing the suite.
    """

    def __init__(self, tag: str, message: str):
        super().__init__(message)
        self.tag = tag
