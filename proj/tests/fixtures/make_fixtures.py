# Copyright 2026 The Plum Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerates the fixture corpus under tests/fixtures/data.

Every task is checked before anything is written: both correct solutions
must pass every test group and both wrong solutions must fail every group.

    python3 tests/fixtures/make_fixtures.py
"""

import json
import os
import subprocess
import sys
import tempfile
import textwrap

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "data")


def T(name, text, sig, a, b, w1, w2, tests):
    return dict(name=name, text=text, sig=sig,
                a=textwrap.dedent(a).strip("\n"), b=textwrap.dedent(b).strip("\n"),
                w1=textwrap.dedent(w1).strip("\n"), w2=textwrap.dedent(w2).strip("\n"),
                tests=[textwrap.dedent(t).strip("\n") for t in tests])


TASKS = [
    T("add", "Write a function add(a, b) that returns the sum of two integers.", "add(a, b)",
      """
      def add(a, b):
          return a + b
      """, """
      def add(a, b):
          total = a
          total += b
          return total
      """, """
      def add(a, b):
          return a - b
      """, """
      def add(a, b):
          return a * b
      """, [
          "assert add(2, 3) == 5\nassert add(10, -4) == 6",
          "assert add(1, 1) == 2\nassert add(-7, 2) == -5",
          "assert add(100, 23) == 123",
      ]),
    T("is_even", "Write a function is_even(n) that returns True when the integer n is even.",
      "is_even(n)",
      """
      def is_even(n):
          return n % 2 == 0
      """, """
      def is_even(n):
          if n % 2:
              return False
          return True
      """, """
      def is_even(n):
          return n % 2 == 1
      """, """
      def is_even(n):
          return n > 0
      """, [
          "assert is_even(4)\nassert not is_even(7)",
          "assert is_even(-2)\nassert not is_even(3)",
          "assert is_even(0)\nassert not is_even(11)",
      ]),
    T("factorial", "Write a function factorial(n) returning n! for a non-negative integer n.",
      "factorial(n)",
      """
      def factorial(n):
          result = 1
          for i in range(2, n + 1):
              result *= i
          return result
      """, """
      def factorial(n):
          if n <= 1:
              return 1
          return n * factorial(n - 1)
      """, """
      def factorial(n):
          result = 1
          for i in range(2, n):
              result *= i
          return result
      """, """
      def factorial(n):
          return n * (n - 1)
      """, [
          "assert factorial(5) == 120\nassert factorial(0) == 1",
          "assert factorial(4) == 24",
          "assert factorial(6) == 720\nassert factorial(1) == 1",
      ]),
    T("fib", "Write a function fib(n) returning the n-th Fibonacci number with fib(0) == 0 and fib(1) == 1.",
      "fib(n)",
      """
      def fib(n):
          a, b = 0, 1
          for _ in range(n):
              a, b = b, a + b
          return a
      """, """
      def fib(n):
          if n < 2:
              return n
          return fib(n - 1) + fib(n - 2)
      """, """
      def fib(n):
          a, b = 1, 1
          for _ in range(n):
              a, b = b, a + b
          return a
      """, """
      def fib(n):
          return n
      """, [
          "assert fib(0) == 0\nassert fib(10) == 55",
          "assert fib(7) == 13",
          "assert fib(1) == 1\nassert fib(12) == 144",
      ]),
    T("max_of_list", "Write a function max_of_list(xs) returning the largest element of a non-empty list.",
      "max_of_list(xs)",
      """
      def max_of_list(xs):
          best = xs[0]
          for x in xs[1:]:
              if x > best:
                  best = x
          return best
      """, """
      def max_of_list(xs):
          return sorted(xs)[-1]
      """, """
      def max_of_list(xs):
          return xs[0]
      """, """
      def max_of_list(xs):
          return min(xs)
      """, [
          "assert max_of_list([3, 9, 2]) == 9",
          "assert max_of_list([-5, -1, -3]) == -1",
          "assert max_of_list([1, 2, 8, 4]) == 8",
      ]),
    T("reverse_string", "Write a function reverse_string(s) that returns s reversed.",
      "reverse_string(s)",
      """
      def reverse_string(s):
          return s[::-1]
      """, """
      def reverse_string(s):
          out = ''
          for ch in s:
              out = ch + out
          return out
      """, """
      def reverse_string(s):
          return s
      """, """
      def reverse_string(s):
          return s[1:][::-1]
      """, [
          "assert reverse_string('abc') == 'cba'",
          "assert reverse_string('hello') == 'olleh'",
          "assert reverse_string('ab') == 'ba'\nassert reverse_string('') == ''",
      ]),
    T("count_vowels", "Write a function count_vowels(s) counting the lowercase vowels aeiou in s.",
      "count_vowels(s)",
      """
      def count_vowels(s):
          return sum(1 for ch in s if ch in 'aeiou')
      """, """
      def count_vowels(s):
          count = 0
          for ch in s:
              if ch in 'aeiou':
                  count += 1
          return count
      """, """
      def count_vowels(s):
          return len(s)
      """, """
      def count_vowels(s):
          return sum(1 for ch in s if ch in 'aei')
      """, [
          "assert count_vowels('education') == 5",
          "assert count_vowels('queue') == 4",
          "assert count_vowels('rhythm') == 0\nassert count_vowels('you') == 2",
      ]),
    T("is_palindrome", "Write a function is_palindrome(s) that returns True when s reads the same backwards.",
      "is_palindrome(s)",
      """
      def is_palindrome(s):
          return s == s[::-1]
      """, """
      def is_palindrome(s):
          i, j = 0, len(s) - 1
          while i < j:
              if s[i] != s[j]:
                  return False
              i += 1
              j -= 1
          return True
      """, """
      def is_palindrome(s):
          return s[0] == s[-1]
      """, """
      def is_palindrome(s):
          return True
      """, [
          "assert is_palindrome('racecar')\nassert not is_palindrome('abca')",
          "assert not is_palindrome('abcda')",
          "assert is_palindrome('noon')\nassert not is_palindrome('abxa')",
      ]),
    T("sum_of_squares", "Write a function sum_of_squares(n) returning 1*1 + 2*2 + ... + n*n.",
      "sum_of_squares(n)",
      """
      def sum_of_squares(n):
          return sum(i * i for i in range(1, n + 1))
      """, """
      def sum_of_squares(n):
          return n * (n + 1) * (2 * n + 1) // 6
      """, """
      def sum_of_squares(n):
          return sum(i * i for i in range(1, n))
      """, """
      def sum_of_squares(n):
          return sum(range(1, n + 1))
      """, [
          "assert sum_of_squares(3) == 14",
          "assert sum_of_squares(5) == 55",
          "assert sum_of_squares(2) == 5",
      ]),
    T("gcd", "Write a function gcd(a, b) returning the greatest common divisor of two positive integers.",
      "gcd(a, b)",
      """
      def gcd(a, b):
          while b:
              a, b = b, a % b
          return a
      """, """
      def gcd(a, b):
          if b == 0:
              return a
          return gcd(b, a % b)
      """, """
      def gcd(a, b):
          return min(a, b)
      """, """
      def gcd(a, b):
          return 1
      """, [
          "assert gcd(12, 18) == 6",
          "assert gcd(9, 6) == 3",
          "assert gcd(20, 8) == 4",
      ]),
    T("is_prime", "Write a function is_prime(n) that returns True when n is a prime number.",
      "is_prime(n)",
      """
      def is_prime(n):
          if n < 2:
              return False
          for d in range(2, int(n ** 0.5) + 1):
              if n % d == 0:
                  return False
          return True
      """, """
      def is_prime(n):
          return n > 1 and all(n % d for d in range(2, n))
      """, """
      def is_prime(n):
          return n % 2 == 1
      """, """
      def is_prime(n):
          for d in range(2, n):
              if n % d == 0:
                  return True
          return False
      """, [
          "assert is_prime(7)\nassert not is_prime(9)",
          "assert is_prime(13)\nassert not is_prime(15)",
          "assert is_prime(2)\nassert not is_prime(1)\nassert not is_prime(21)",
      ]),
    T("fizzbuzz", "Write a function fizzbuzz(n) returning 'Fizz', 'Buzz', 'FizzBuzz' or str(n) by the usual rules.",
      "fizzbuzz(n)",
      """
      def fizzbuzz(n):
          if n % 15 == 0:
              return 'FizzBuzz'
          if n % 3 == 0:
              return 'Fizz'
          if n % 5 == 0:
              return 'Buzz'
          return str(n)
      """, """
      def fizzbuzz(n):
          out = ''
          if n % 3 == 0:
              out += 'Fizz'
          if n % 5 == 0:
              out += 'Buzz'
          return out or str(n)
      """, """
      def fizzbuzz(n):
          if n % 3 == 0:
              return 'Fizz'
          if n % 5 == 0:
              return 'Buzz'
          return str(n)
      """, """
      def fizzbuzz(n):
          return str(n)
      """, [
          "assert fizzbuzz(15) == 'FizzBuzz'\nassert fizzbuzz(9) == 'Fizz'",
          "assert fizzbuzz(30) == 'FizzBuzz'\nassert fizzbuzz(7) == '7'",
          "assert fizzbuzz(45) == 'FizzBuzz'\nassert fizzbuzz(10) == 'Buzz'",
      ]),
    T("clamp", "Write a function clamp(x, lo, hi) that limits x to the closed range [lo, hi].",
      "clamp(x, lo, hi)",
      """
      def clamp(x, lo, hi):
          return max(lo, min(x, hi))
      """, """
      def clamp(x, lo, hi):
          if x < lo:
              return lo
          if x > hi:
              return hi
          return x
      """, """
      def clamp(x, lo, hi):
          return min(lo, max(x, hi))
      """, """
      def clamp(x, lo, hi):
          return x
      """, [
          "assert clamp(5, 0, 3) == 3\nassert clamp(-1, 0, 3) == 0",
          "assert clamp(10, 2, 4) == 4\nassert clamp(3, 2, 4) == 3",
          "assert clamp(-9, -2, 2) == -2\nassert clamp(1, -2, 2) == 1",
      ]),
    T("second_largest", "Write a function second_largest(xs) returning the second largest distinct value of xs.",
      "second_largest(xs)",
      """
      def second_largest(xs):
          return sorted(set(xs))[-2]
      """, """
      def second_largest(xs):
          top = max(xs)
          return max(x for x in xs if x != top)
      """, """
      def second_largest(xs):
          return sorted(xs)[-2]
      """, """
      def second_largest(xs):
          return max(xs)
      """, [
          "assert second_largest([4, 9, 9, 1]) == 4",
          "assert second_largest([5, 5, 3]) == 3",
          "assert second_largest([7, 2, 7, 6]) == 6",
      ]),
    T("flatten", "Write a function flatten(xss) that concatenates a list of lists into one list.",
      "flatten(xss)",
      """
      def flatten(xss):
          return [x for xs in xss for x in xs]
      """, """
      def flatten(xss):
          out = []
          for xs in xss:
              out.extend(xs)
          return out
      """, """
      def flatten(xss):
          return xss[0]
      """, """
      def flatten(xss):
          return [xs[0] for xs in xss if xs]
      """, [
          "assert flatten([[1, 2], [3]]) == [1, 2, 3]",
          "assert flatten([[4], [5, 6]]) == [4, 5, 6]",
          "assert flatten([[], [1, 2, 3]]) == [1, 2, 3]",
      ]),
    T("char_frequency", "Write a function char_frequency(s) returning a dict mapping each character to its count.",
      "char_frequency(s)",
      """
      def char_frequency(s):
          counts = {}
          for ch in s:
              counts[ch] = counts.get(ch, 0) + 1
          return counts
      """, """
      def char_frequency(s):
          return {ch: s.count(ch) for ch in set(s)}
      """, """
      def char_frequency(s):
          return {ch: 1 for ch in s}
      """, """
      def char_frequency(s):
          counts = {}
          for ch in s:
              counts[ch] = counts.get(ch, 1) + 1
          return counts
      """, [
          "assert char_frequency('aab') == {'a': 2, 'b': 1}",
          "assert char_frequency('xxx') == {'x': 3}",
          "assert char_frequency('abca') == {'a': 2, 'b': 1, 'c': 1}",
      ]),
    T("merge_sorted", "Write a function merge_sorted(a, b) merging two sorted lists into one sorted list.",
      "merge_sorted(a, b)",
      """
      def merge_sorted(a, b):
          out = []
          i = j = 0
          while i < len(a) and j < len(b):
              if a[i] <= b[j]:
                  out.append(a[i])
                  i += 1
              else:
                  out.append(b[j])
                  j += 1
          return out + a[i:] + b[j:]
      """, """
      def merge_sorted(a, b):
          return sorted(a + b)
      """, """
      def merge_sorted(a, b):
          return a + b
      """, """
      def merge_sorted(a, b):
          return sorted(set(a + b))
      """, [
          "assert merge_sorted([3, 5], [1, 5, 9]) == [1, 3, 5, 5, 9]",
          "assert merge_sorted([2, 2], [1]) == [1, 2, 2]",
          "assert merge_sorted([4, 6], [1, 6]) == [1, 4, 6, 6]",
      ]),
    T("binary_search", "Write a function binary_search(xs, target) returning the index of target in sorted xs, or -1.",
      "binary_search(xs, target)",
      """
      def binary_search(xs, target):
          lo, hi = 0, len(xs) - 1
          while lo <= hi:
              mid = (lo + hi) // 2
              if xs[mid] == target:
                  return mid
              if xs[mid] < target:
                  lo = mid + 1
              else:
                  hi = mid - 1
          return -1
      """, """
      def binary_search(xs, target):
          for i, x in enumerate(xs):
              if x == target:
                  return i
          return -1
      """, """
      def binary_search(xs, target):
          lo, hi = 0, len(xs) - 1
          while lo < hi:
              mid = (lo + hi) // 2
              if xs[mid] == target:
                  return mid
              if xs[mid] < target:
                  lo = mid + 1
              else:
                  hi = mid - 1
          return -1
      """, """
      def binary_search(xs, target):
          return 0 if target in xs else -1
      """, [
          "assert binary_search([1, 3, 5, 7], 7) == 3\nassert binary_search([1, 3], 4) == -1",
          "assert binary_search([2, 4, 6], 6) == 2",
          "assert binary_search([1, 2, 3, 4, 5], 5) == 4",
      ]),
    T("remove_duplicates", "Write a function remove_duplicates(xs) removing repeated items while keeping first-seen order.",
      "remove_duplicates(xs)",
      """
      def remove_duplicates(xs):
          seen = set()
          out = []
          for x in xs:
              if x not in seen:
                  seen.add(x)
                  out.append(x)
          return out
      """, """
      def remove_duplicates(xs):
          return list(dict.fromkeys(xs))
      """, """
      def remove_duplicates(xs):
          return sorted(set(xs))
      """, """
      def remove_duplicates(xs):
          return xs
      """, [
          "assert remove_duplicates([3, 1, 3, 2, 1]) == [3, 1, 2]",
          "assert remove_duplicates([5, 5, 4]) == [5, 4]",
          "assert remove_duplicates([9, 1, 9]) == [9, 1]",
      ]),
    T("capitalize_words", "Write a function capitalize_words(s) that upper-cases the first letter of every space-separated word.",
      "capitalize_words(s)",
      """
      def capitalize_words(s):
          return ' '.join(w[:1].upper() + w[1:] for w in s.split(' '))
      """, """
      def capitalize_words(s):
          words = s.split(' ')
          for i in range(len(words)):
              if words[i]:
                  words[i] = words[i][0].upper() + words[i][1:]
          return ' '.join(words)
      """, """
      def capitalize_words(s):
          return s.upper()
      """, """
      def capitalize_words(s):
          return s[:1].upper() + s[1:]
      """, [
          "assert capitalize_words('hello world') == 'Hello World'",
          "assert capitalize_words('a bc') == 'A Bc'",
          "assert capitalize_words('go to it') == 'Go To It'",
      ]),
    T("running_sum", "Write a function running_sum(xs) returning the list of prefix sums of xs.",
      "running_sum(xs)",
      """
      def running_sum(xs):
          out = []
          total = 0
          for x in xs:
              total += x
              out.append(total)
          return out
      """, """
      def running_sum(xs):
          return [sum(xs[:i + 1]) for i in range(len(xs))]
      """, """
      def running_sum(xs):
          return [sum(xs[:i]) for i in range(len(xs))]
      """, """
      def running_sum(xs):
          return xs
      """, [
          "assert running_sum([1, 2, 3]) == [1, 3, 6]",
          "assert running_sum([5, 5]) == [5, 10]",
          "assert running_sum([2, 0, 1]) == [2, 2, 3]",
      ]),
    T("count_words", "Write a function count_words(s) returning the number of whitespace-separated words in s.",
      "count_words(s)",
      """
      def count_words(s):
          return len(s.split())
      """, """
      def count_words(s):
          count = 0
          in_word = False
          for ch in s:
              if ch.isspace():
                  in_word = False
              elif not in_word:
                  in_word = True
                  count += 1
          return count
      """, """
      def count_words(s):
          return s.count(' ') + 1
      """, """
      def count_words(s):
          return len(s)
      """, [
          "assert count_words('a  b c') == 3",
          "assert count_words('  one two ') == 2",
          "assert count_words('x   y') == 2",
      ]),
    T("celsius_to_fahrenheit", "Write a function celsius_to_fahrenheit(c) converting Celsius to Fahrenheit.",
      "celsius_to_fahrenheit(c)",
      """
      def celsius_to_fahrenheit(c):
          return c * 9 / 5 + 32
      """, """
      def celsius_to_fahrenheit(c):
          return 32 + 1.8 * c
      """, """
      def celsius_to_fahrenheit(c):
          return c * 5 / 9 + 32
      """, """
      def celsius_to_fahrenheit(c):
          return c + 32
      """, [
          "assert abs(celsius_to_fahrenheit(100) - 212) < 1e-9",
          "assert abs(celsius_to_fahrenheit(-40) + 40) < 1e-9",
          "assert abs(celsius_to_fahrenheit(10) - 50) < 1e-9",
      ]),
    T("digit_sum", "Write a function digit_sum(n) returning the sum of the decimal digits of a non-negative integer.",
      "digit_sum(n)",
      """
      def digit_sum(n):
          total = 0
          while n > 0:
              total += n % 10
              n //= 10
          return total
      """, """
      def digit_sum(n):
          return sum(int(d) for d in str(n))
      """, """
      def digit_sum(n):
          return n % 10
      """, """
      def digit_sum(n):
          return len(str(n))
      """, [
          "assert digit_sum(1234) == 10",
          "assert digit_sum(99) == 18",
          "assert digit_sum(505) == 10",
      ]),
    T("power", "Write a function power(base, exp) computing base ** exp for a non-negative integer exp without using **.",
      "power(base, exp)",
      """
      def power(base, exp):
          result = 1
          for _ in range(exp):
              result *= base
          return result
      """, """
      def power(base, exp):
          if exp == 0:
              return 1
          half = power(base, exp // 2)
          if exp % 2:
              return half * half * base
          return half * half
      """, """
      def power(base, exp):
          return base * exp
      """, """
      def power(base, exp):
          result = base
          for _ in range(exp):
              result *= base
          return result
      """, [
          "assert power(2, 10) == 1024\nassert power(5, 0) == 1",
          "assert power(3, 3) == 27",
          "assert power(7, 2) == 49",
      ]),
    T("list_product", "Write a function list_product(xs) returning the product of all numbers in xs (1 for an empty list).",
      "list_product(xs)",
      """
      def list_product(xs):
          result = 1
          for x in xs:
              result *= x
          return result
      """, """
      def list_product(xs):
          if not xs:
              return 1
          return xs[0] * list_product(xs[1:])
      """, """
      def list_product(xs):
          return sum(xs)
      """, """
      def list_product(xs):
          result = 0
          for x in xs:
              result *= x
          return result
      """, [
          "assert list_product([2, 3, 4]) == 24",
          "assert list_product([5, 5]) == 25\nassert list_product([]) == 1",
          "assert list_product([1, 7, 2]) == 14",
      ]),
    T("safe_divide", "Write a function safe_divide(a, b) returning a / b, or None when b is zero.",
      "safe_divide(a, b)",
      """
      def safe_divide(a, b):
          try:
              return a / b
          except ZeroDivisionError:
              return None
      """, """
      def safe_divide(a, b):
          if b == 0:
              return None
          return a / b
      """, """
      def safe_divide(a, b):
          if b == 0:
              return 0
          return a / b
      """, """
      def safe_divide(a, b):
          try:
              return a // b
          except ZeroDivisionError:
              return None
      """, [
          "assert safe_divide(7, 2) == 3.5\nassert safe_divide(1, 0) is None",
          "assert safe_divide(5, 0) is None\nassert safe_divide(9, 2) == 4.5",
          "assert safe_divide(3, 0) is None\nassert safe_divide(1, 4) == 0.25",
      ]),
    T("parse_int", "Write a function parse_int(s, default) returning int(s), or default when s is not an integer literal.",
      "parse_int(s, default)",
      """
      def parse_int(s, default):
          try:
              return int(s)
          except ValueError:
              return default
      """, """
      def parse_int(s, default):
          t = s.strip()
          if t.lstrip('-').isdigit() and t.count('-') <= 1 and not t.endswith('-'):
              return int(t)
          return default
      """, """
      def parse_int(s, default):
          return default
      """, """
      def parse_int(s, default):
          try:
              return int(s)
          except ValueError:
              return 0
      """, [
          "assert parse_int('42', 0) == 42\nassert parse_int('x', 7) == 7",
          "assert parse_int('-3', 1) == -3\nassert parse_int('4.5', -1) == -1",
          "assert parse_int('10', 5) == 10\nassert parse_int('', 9) == 9",
      ]),
    T("min_index", "Write a function min_index(xs) returning the index of the first occurrence of the smallest element.",
      "min_index(xs)",
      """
      def min_index(xs):
          best = 0
          for i in range(1, len(xs)):
              if xs[i] < xs[best]:
                  best = i
          return best
      """, """
      def min_index(xs):
          return xs.index(min(xs))
      """, """
      def min_index(xs):
          best = 0
          for i in range(1, len(xs)):
              if xs[i] <= xs[best]:
                  best = i
          return best
      """, """
      def min_index(xs):
          return min(xs)
      """, [
          "assert min_index([4, 2, 3, 2]) == 1",
          "assert min_index([5, 2, 2]) == 1",
          "assert min_index([9, 0, 7, 0]) == 1",
      ]),
    T("transpose", "Write a function transpose(m) returning the transpose of a rectangular matrix given as a list of rows.",
      "transpose(m)",
      """
      def transpose(m):
          return [list(row) for row in zip(*m)]
      """, """
      def transpose(m):
          rows, cols = len(m), len(m[0])
          return [[m[r][c] for r in range(rows)] for c in range(cols)]
      """, """
      def transpose(m):
          return m
      """, """
      def transpose(m):
          return [row[::-1] for row in m]
      """, [
          "assert transpose([[1, 2], [3, 4]]) == [[1, 3], [2, 4]]",
          "assert transpose([[1, 2, 3]]) == [[1], [2], [3]]",
          "assert transpose([[5, 6], [7, 8]]) == [[5, 7], [6, 8]]",
      ]),
    T("abs_diff", "Write a function abs_diff(a, b) returning the absolute difference of two numbers.",
      "abs_diff(a, b)",
      """
      def abs_diff(a, b):
          return abs(a - b)
      """, """
      def abs_diff(a, b):
          if a > b:
              return a - b
          return b - a
      """, """
      def abs_diff(a, b):
          return a - b
      """, """
      def abs_diff(a, b):
          return abs(a + b)
      """, [
          "assert abs_diff(3, 8) == 5",
          "assert abs_diff(2, 9) == 7\nassert abs_diff(4, 4) == 0",
          "assert abs_diff(-2, 3) == 5",
      ]),
    T("is_sorted", "Write a function is_sorted(xs) returning True when xs is in non-decreasing order.",
      "is_sorted(xs)",
      """
      def is_sorted(xs):
          return all(xs[i] <= xs[i + 1] for i in range(len(xs) - 1))
      """, """
      def is_sorted(xs):
          return xs == sorted(xs)
      """, """
      def is_sorted(xs):
          return all(xs[i] < xs[i + 1] for i in range(len(xs) - 1))
      """, """
      def is_sorted(xs):
          return xs[0] <= xs[-1]
      """, [
          "assert is_sorted([1, 2, 2, 5])\nassert not is_sorted([1, 3, 2])",
          "assert is_sorted([0, 0])\nassert not is_sorted([1, 5, 2, 6])",
          "assert is_sorted([4, 4, 9])\nassert not is_sorted([2, 9, 1, 3])",
      ]),
]

# Tasks for which the policy never produces a correct answer.
UNSOLVED = [
    T("rotate_left", "Write a function rotate_left(xs, k) rotating xs left by k positions.",
      "rotate_left(xs, k)",
      """
      def rotate_left(xs, k):
          k %= len(xs)
          return xs[k:] + xs[:k]
      """, """
      def rotate_left(xs, k):
          out = list(xs)
          for _ in range(k % len(xs)):
              out.append(out.pop(0))
          return out
      """, """
      def rotate_left(xs, k):
          return xs[-k:] + xs[:-k]
      """, """
      def rotate_left(xs, k):
          return xs[::-1]
      """, [
          "assert rotate_left([1, 2, 3, 4], 1) == [2, 3, 4, 1]",
          "assert rotate_left([1, 2, 3], 5) == [3, 1, 2]",
      ]),
    T("count_bits", "Write a function count_bits(n) counting the set bits of a non-negative integer.",
      "count_bits(n)",
      """
      def count_bits(n):
          return bin(n).count('1')
      """, """
      def count_bits(n):
          c = 0
          while n:
              c += n & 1
              n >>= 1
          return c
      """, """
      def count_bits(n):
          return n % 2
      """, """
      def count_bits(n):
          return len(bin(n)) - 2
      """, [
          "assert count_bits(7) == 3\nassert count_bits(8) == 1",
          "assert count_bits(10) == 2",
      ]),
    T("median", "Write a function median(xs) returning the median of a non-empty list of numbers.",
      "median(xs)",
      """
      def median(xs):
          s = sorted(xs)
          n = len(s)
          if n % 2:
              return s[n // 2]
          return (s[n // 2 - 1] + s[n // 2]) / 2
      """, """
      def median(xs):
          import statistics
          return statistics.median(xs)
      """, """
      def median(xs):
          return sorted(xs)[len(xs) // 2]
      """, """
      def median(xs):
          return sum(xs) / len(xs)
      """, [
          "assert median([3, 1, 8]) == 3\nassert median([4, 1, 3, 2]) == 2.5",
          "assert median([1, 2, 3, 10]) == 2.5",
      ]),
    T("title_case", "Write a function title_case(s) lower-casing everything but the first letter of each word.",
      "title_case(s)",
      """
      def title_case(s):
          return ' '.join(w[:1].upper() + w[1:].lower() for w in s.split(' '))
      """, """
      def title_case(s):
          return ' '.join(w.capitalize() for w in s.split(' '))
      """, """
      def title_case(s):
          return s.lower()
      """, """
      def title_case(s):
          return s.upper()
      """, [
          "assert title_case('hELLO wORLD') == 'Hello World'",
          "assert title_case('ab') == 'Ab'",
      ]),
]


def fence(code, lang="python"):
    return "```" + lang + "\n" + code + "\n```"


def starter(task):
    return "def " + task["sig"] + ":\n    ..."


def testgen_response(task, reference, tests):
    return ("[Analysis]\nImplement " + task["sig"] + " directly and check a few cases.\n"
            "[Solution]\n" + fence(reference) + "\n"
            "[Start Code]\n" + fence(starter(task)) + "\n"
            "[Test Code]\n" + fence(tests) + "\n")


def infinite_loop(task):
    return ("def " + task["sig"] + ":\n"
            "    n = 0\n"
            "    while True:\n"
            "        n += 1\n")


def syntax_invalid(task):
    return "def " + task["sig"] + "\n    return (\n"


def prose(code, n):
    openers = ["Here is a solution:\n\n", "Sure.\n\n", "The following function works:\n\n"]
    return openers[n % len(openers)] + fence(code) + "\n\nIt handles the examples above."


def instruction_id(i):
    return "fx-%02d" % i


def run(program):
    with tempfile.NamedTemporaryFile("w", suffix=".py", delete=False) as f:
        f.write(program)
        path = f.name
    try:
        return subprocess.run([sys.executable, "-S", path], capture_output=True,
                              timeout=10).returncode == 0
    finally:
        os.unlink(path)


def verify(task):
    for group in task["tests"]:
        for key in ("a", "b"):
            if not run(task[key] + "\n\n" + group):
                raise SystemExit("%s: solution %s fails:\n%s" % (task["name"], key, group))
        for key in ("w1", "w2"):
            if run(task[key] + "\n\n" + group):
                raise SystemExit("%s: wrong solution %s passes:\n%s" % (task["name"], key, group))


def write_jsonl(name, rows):
    with open(os.path.join(OUT, name), "w") as f:
        for row in rows:
            f.write(json.dumps(row, ensure_ascii=False) + "\n")


def main():
    for task in TASKS + UNSOLVED:
        verify(task)
    os.makedirs(OUT, exist_ok=True)

    instructions, responses, completions, solutions = [], [], [], []
    for i, task in enumerate(TASKS + UNSOLVED):
        iid = instruction_id(i)
        solved = i < len(TASKS)
        instructions.append({"id": iid, "instruction": task["text"], "source": "fixture"})

        tests = task["tests"]
        rs = [testgen_response(task, task["a"], tests[0])]
        if i % 4 == 1:
            # Reference contradicts its own tests; the filter must drop it.
            rs.append(testgen_response(task, task["w1"], tests[1]))
        else:
            rs.append(testgen_response(task, task["b"], tests[1 % len(tests)]))
        if i % 5 == 2:
            rs.append("[Analysis]\nNo tests this time.\n[Solution]\n" + fence(task["a"]) + "\n")
        elif len(tests) > 2:
            rs.append(testgen_response(task, task["a"], tests[2]))
        responses.append({"instruction_id": iid, "responses": rs})

        if solved:
            cs = [task["a"], prose(task["w1"], i), prose(task["b"], i + 1), syntax_invalid(task),
                  task["w2"], infinite_loop(task)]
            if i % 4 == 3:
                cs.append("import plum_fixture_missing_module\n\n" + task["a"])
        else:
            cs = [task["w1"], prose(task["w2"], i), syntax_invalid(task)]
        completions.append({"instruction_id": iid, "completions": cs})
        solutions.append({"instruction_id": iid, "name": task["name"], "solved": solved,
                          "correct": [task["a"], task["b"]], "wrong": [task["w1"], task["w2"]],
                          "tests": tests})

    write_jsonl("instructions.jsonl", instructions)
    write_jsonl("instructions_20.jsonl", instructions[:20])
    write_jsonl("testgen_stub.jsonl", responses)
    write_jsonl("policy_stub.jsonl", completions)
    write_jsonl("solutions.jsonl", solutions)
    print("wrote %d instructions to %s" % (len(instructions), OUT))


if __name__ == "__main__":
    main()
