"""
Words in the surface group generators.

Generators are lowercase letters 'a', 'b', ...; the inverse of a generator is
the same letter in uppercase. A word is a plain string of such letters.
"""
import re
import string

from errors import UnknownLabelError

_TOKEN = re.compile(r'([A-Za-z])(\^-1|\^\{-1\}|-)?')


def generator_labels(count):
    if count > len(string.ascii_lowercase):
        raise ValueError(f"at most {len(string.ascii_lowercase)} generators are supported, got {count}")
    return list(string.ascii_lowercase[:count])


def invert_letter(letter):
    return letter.swapcase()


def inverse(word):
    return ''.join(invert_letter(x) for x in reversed(word))


def free_reduce(word):
    out = []
    for letter in word:
        if out and out[-1] == invert_letter(letter):
            out.pop()
        else:
            out.append(letter)
    return ''.join(out)


def cyclic_reduce(word):
    word = free_reduce(word)
    start, end = 0, len(word)
    while end - start >= 2 and word[start] == invert_letter(word[end - 1]):
        start += 1
        end -= 1
    return word[start:end]


def is_cyclically_reduced(word):
    if free_reduce(word) != word:
        return False
    return len(word) < 2 or word[0] != invert_letter(word[-1])


def rotations(word):
    return [word[i:] + word[:i] for i in range(len(word))] or ['']


def letter_rank(letter):
    """a < A < b < B < ..."""
    return 2 * (ord(letter.lower()) - ord('a')) + (1 if letter.isupper() else 0)


def shortlex_key(word):
    return (len(word), [letter_rank(x) for x in word])


def power(word, n):
    return word * n if n >= 0 else inverse(word) * (-n)


def parse_word(text, labels):
    """
    Parse 'abAB', 'a b A B' or 'a b a^-1 b^-1' into a word over `labels`.
    Raises UnknownLabelError on letters outside the alphabet.
    """
    allowed = set(labels)
    compact = re.sub(r'[\s.*]', '', text)
    pos, out = 0, []
    while pos < len(compact):
        match = _TOKEN.match(compact, pos)
        if not match:
            raise UnknownLabelError(f"cannot parse {text!r} at position {pos}", word=text)
        letter, inverted = match.group(1), match.group(2)
        if letter.lower() not in allowed:
            raise UnknownLabelError(f"unknown generator {letter!r} in {text!r}", label=letter, labels=sorted(allowed))
        out.append(invert_letter(letter) if inverted else letter)
        pos = match.end()
    return ''.join(out)


def check_word(word, labels):
    allowed = set(labels)
    for letter in word:
        if letter.lower() not in allowed:
            raise UnknownLabelError(f"unknown generator {letter!r} in {word!r}", label=letter, labels=sorted(allowed))
    return word
