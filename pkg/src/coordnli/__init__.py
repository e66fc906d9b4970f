"""NLI stress-pair generation, labeling, training and evaluation over
conjunctive sentences, plus the two-round annotation protocol service."""

from .coordination import CoordinationInstance, SentenceFeatures, detect_features, find_coordinations
from .evalkit import EvalReport, LabeledDataset, cohen_kappa, evaluate, instability_stats, load_dataset, save_dataset
from .labeler import HeuristicConfig, build_adversarial_set, label_pair, label_pairs
from .pairgen import (
    GenerationConfig,
    NliPair,
    ReplacementLexicon,
    add_conjunct,
    either_or_probe,
    generate_pairs,
    remove_conjunct,
    replace_conjunct,
)
from .srl import TagLattice, constrained_viterbi, propagate_tags, recover_word_tags
from .fusion import FusionHead, fit_fusion_head, fuse_predict
from .training import (
    Example,
    HashedLinearClassifier,
    TrainSchedule,
    aft_train,
    hypothesis_only_train,
    iaft_train,
    toy_classifier,
)
from .treebank import ParseError, ParseNode, Sentence, parse_bracketed, serialize, yield_tokens

__version__ = "0.1.0"
