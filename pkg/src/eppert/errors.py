"""Exception hierarchy. Input problems raise ValueError; numerical failures
raise subclasses of NumericalError."""


class NumericalError(ArithmeticError):
    pass


class SingularMatrixError(NumericalError):
    def __init__(self, msg, pivot):
        super().__init__(f"{msg} (pivot magnitude {pivot:.3e})")
        self.pivot = pivot


class ConvergenceError(NumericalError):
    def __init__(self, msg, residuals=None):
        super().__init__(msg)
        self.residuals = residuals


class StructureError(NumericalError):
    """Detected Jordan structure disagrees with the requested one."""

    def __init__(self, msg, kernel_dims=None):
        if kernel_dims is not None:
            msg = f"{msg}; kernel dimensions {list(kernel_dims)}"
        super().__init__(msg)
        self.kernel_dims = kernel_dims
