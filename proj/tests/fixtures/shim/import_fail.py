import plum_fixture_missing_module


def double(x):
    return 2 * x


assert double(4) == 8
