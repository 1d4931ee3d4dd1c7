def nth_even(n):
    """
    Return the n-th even number (1-indexed).
    Examples: 1 -> 0, 2 -> 2, 3 -> 4
    """
    if n < 1:
        raise ValueError("n must be a positive number")
    return (n - 1) * 2
