"""Shared helpers: high-order finite differences for residual oracles."""


def fd1(f, x, h):
    """Fourth-order centered first derivative."""
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h)


def fd2(f, x, h):
    """Fourth-order centered second derivative."""
    return (
        -f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)
    ) / (12 * h * h)
