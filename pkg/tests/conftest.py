import pytest

from ifg.chart import string_to_fsa
from ifg.formats import parse_grammar_file

AGREEMENT_GRAMMAR = """\
% number agreement over a three-word sentence
s(S) -> np(NP) vp(VP) { [[S],(l,NP),(r,VP)], [[NP],(n,X)], [[VP],(n,X)] }.
vp(VP) -> v(V) a(A) { [[VP],(l,V),(r,A),(n,Y)], [[V],(n,Y)] }.
v(V) -> [read] { [[V],(lex,read),(n,sg)] }.
v(V) -> [read] { [[V],(lex,read),(n,pl)] }.
np(NP) -> [john] { [[NP],(lex,john),(n,sg)] }.
a(A) -> [here] { [[A],(lex,here)] }.
"""


@pytest.fixture(scope="session")
def agreement_text():
    return AGREEMENT_GRAMMAR


@pytest.fixture(scope="session")
def agreement_grammar():
    return parse_grammar_file(AGREEMENT_GRAMMAR)


@pytest.fixture()
def sentence_fsa():
    return string_to_fsa(["john", "read", "here"])
