import json
from pathlib import Path

import pytest

from coordnli import pairgen, treebank

DATA = Path(__file__).parent / "data"

FIG2_TREE = (
    "(S (NP (PRP He)) (VP (VBZ is) (NP (NP (DT a) (NNP Worcester) (NN resident))"
    " (CC and) (NP (NP (DT a) (NN member)) (PP (IN of) (NP (DT the)"
    " (NNP Democratic) (NNP Party)))))) (. .))"
)

FRANKLIN_TREE = (
    "(S (NP (NNP Gilbert)) (VP (VBD was) (NP (NP (DT the) (NN freshman)"
    " (NN football) (NN coach)) (PP (IN of) (NP (NNP Franklin) (CC and)"
    " (NNP Marshall) (NNP College))) (PP (IN in) (NP (CD 1938))))) (. .))"
)

GRAVITY_TREE = (
    "(S (NP (NP (DT All) (NNS devices)) (SBAR (S (NP (PRP they)) (VP (VBD tested)))))"
    " (VP (VBD did) (RB not) (VP (VB produce) (NP (NP (NN gravity)) (CC or)"
    " (NP (NN anti-gravity))))) (. .))"
)

PREMIERE_TREE = (
    "(S (NP (PRP It)) (VP (VP (VBD premiered) (PP (IN on) (NP (CD 27) (NNP June)"
    " (CD 2016)))) (CC and) (VP (VBZ airs) (NP (NNP Mon-Fri) (NN 10-11pm)"
    " (NNP IST)))) (. .))"
)

DEGREE_TREE = (
    "(S (NP (PRP He)) (VP (VP (VBD received) (NP (NN bachelor's) (NN degree))"
    " (PP (IN in) (NP (CD 1967)))) (CC and) (NP (NP (NN PhD)) (PP (IN in)"
    " (NP (CD 1973))))) (. .))"
)


def tree_and_sentence(bracketed, ner=None, source_id="t"):
    tree = treebank.parse_bracketed(bracketed)
    return tree, treebank.sentence_from_tree(tree, ner=ner, source_id=source_id)


@pytest.fixture(scope="session")
def table1_corpus():
    return treebank.load_corpus(DATA / "table1.trees", source_prefix="table1")


@pytest.fixture(scope="session")
def lexicon():
    return pairgen.ReplacementLexicon.from_dict(
        json.loads((DATA / "lexicon.json").read_text())
    )
