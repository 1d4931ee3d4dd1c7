def is_prime(n):
    if n <= 1: # +1 ICP (branch)
        return False
    else: # +1 ICP (branch)
        i = 2
        while i < n: # +1 ICP (loop)
            if n % i == 0: # +1 ICP (nested branch)
                return False
            else: # +1 ICP (nested branch)
                i += 1
        return True
