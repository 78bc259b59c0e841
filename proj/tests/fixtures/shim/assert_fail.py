def double(x):
    return x + 1


assert double(4) == 8
